#include "simukit/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::kb {

namespace {

std::string strip_bold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
            ++i;
            continue;
        }
        out.push_back(s[i]);
    }
    return out;
}

bool is_bullet(std::string_view line) {
    auto t = trim(line);
    return starts_with(t, "- ") || starts_with(t, "* ") || t == "-";
}

std::string strip_bullet(std::string_view line) {
    auto t = trim(line);
    if (starts_with(t, "- ") || starts_with(t, "* ")) return trim(t.substr(2));
    if (t == "-") return "";
    return t;
}

std::string strip_decor(std::string_view s) {
    auto out = trim(strip_bold(s));
    while (!out.empty() && (out.back() == '.' || out.back() == ':')) out.pop_back();
    return trim(out);
}

// Extract the text between the first pair of backticks, if any.
std::optional<std::string> backticked(std::string_view s) {
    auto open = s.find('`');
    if (open == std::string_view::npos) return std::nullopt;
    auto close = s.find('`', open + 1);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(s.substr(open + 1, close - open - 1));
}

std::string unquote(std::string_view s) {
    auto t = trim(s);
    while (!t.empty() && (t.front() == '`' || t.front() == '\'')) t.erase(t.begin());
    while (!t.empty() && (t.back() == '`' || t.back() == '\'')) t.pop_back();
    return trim(t);
}

bool single_token(std::string_view s) {
    return !s.empty() && s.find(' ') == std::string_view::npos;
}

bool numeric_name(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

const PortSpec* find_port_role(const std::vector<PortSpec>& ports,
                               std::string_view name, PortRole role) {
    for (const auto& p : ports) {
        if (p.role == role && p.name == name) return &p;
    }
    return nullptr;
}

// Resolution order used for rule-produced names and ingest auto-declares.
const PortSpec* find_rule_port(const BlockDescriptor& desc, std::string_view name) {
    if (auto* p = find_port_role(desc.ports, name, PortRole::DedicatedInput)) return p;
    if (auto* p = find_port_role(desc.ports, name, PortRole::Conserving)) return p;
    return find_port_role(desc.ports, name, PortRole::DedicatedOutput);
}

struct RecordBuilder {
    BlockDescriptor desc;
    std::vector<std::string> raw_lines;
    bool saw_path = false;
    bool saw_ports = false;
    std::optional<PortRole> role_context;
    // Open "When ... :" group: indices into desc.exposure_rules / its values.
    int open_rule = -1;
    int open_value = -1;
    PortRole group_role = PortRole::Conserving;

    void close_group() {
        open_rule = -1;
        open_value = -1;
    }

    void add_port(const std::string& name, PortRole role) {
        if (name.empty() || name.find('/') != std::string::npos ||
            name.find(' ') != std::string::npos) {
            throw Error("MalformedRecord",
                        "record '" + desc.block_type + "': bad port name '" + name + "'");
        }
        if (find_port_role(desc.ports, name, role)) {
            throw Error("MalformedRecord", "record '" + desc.block_type +
                                               "': duplicate port '" + name + "'");
        }
        desc.ports.push_back(PortSpec{name, role, ""});
    }
};

constexpr std::string_view kSignClause = "a string of sign characters";

}  // namespace

std::string to_string(PortRole role) {
    switch (role) {
        case PortRole::DedicatedInput: return "dedicated-input";
        case PortRole::DedicatedOutput: return "dedicated-output";
        case PortRole::Conserving: return "conserving";
    }
    return "?";
}

const PortSpec* resolve_port(const BlockDescriptor& desc, std::string_view name,
                             PortSide side) {
    switch (side) {
        case PortSide::Source:
            if (auto* p = find_port_role(desc.ports, name, PortRole::DedicatedOutput)) return p;
            if (auto* p = find_port_role(desc.ports, name, PortRole::Conserving)) return p;
            return find_port_role(desc.ports, name, PortRole::DedicatedInput);
        case PortSide::Destination:
            if (auto* p = find_port_role(desc.ports, name, PortRole::DedicatedInput)) return p;
            if (auto* p = find_port_role(desc.ports, name, PortRole::Conserving)) return p;
            return find_port_role(desc.ports, name, PortRole::DedicatedOutput);
        case PortSide::Either:
            return find_rule_port(desc, name);
    }
    return nullptr;
}

std::vector<const PortSpec*> governed_ports(const BlockDescriptor& desc) {
    std::set<const PortSpec*> governed;
    for (const auto& rule : desc.exposure_rules) {
        if (rule.kind == ExposureRule::Kind::SignCount) {
            for (const auto& p : desc.ports) {
                if (p.role == PortRole::DedicatedInput && numeric_name(p.name)) {
                    int n = std::stoi(p.name);
                    if (n >= 1 && n <= rule.max_signs) governed.insert(&p);
                }
            }
            continue;
        }
        for (const auto& [value, names] : rule.values) {
            for (const auto& name : names) {
                if (auto* p = find_rule_port(desc, name)) governed.insert(p);
            }
        }
    }
    std::vector<const PortSpec*> out;
    for (const auto& p : desc.ports) {
        if (governed.count(&p)) out.push_back(&p);
    }
    return out;
}

std::vector<PortSpec> exposed_ports(const BlockDescriptor& desc,
                                    const ParamSettings& params) {
    auto value_of = [&](const std::string& key) -> std::optional<std::string> {
        for (const auto& p : params) {
            if (p.key == key) return p.value;  // first mention wins
        }
        return std::nullopt;
    };

    std::set<const PortSpec*> governed;
    for (auto* p : governed_ports(desc)) governed.insert(p);

    std::set<const PortSpec*> enabled;
    for (const auto& rule : desc.exposure_rules) {
        auto value = value_of(rule.parameter);
        if (!value) continue;  // unannotated rule keeps its ports hidden
        if (rule.kind == ExposureRule::Kind::SignCount) {
            if (value->empty() || static_cast<int>(value->size()) > rule.max_signs ||
                value->find_first_not_of("+-") != std::string::npos) {
                throw Error("UnknownParameterValue",
                            "'" + *value + "' is not an admissible '" + rule.parameter +
                                "' sign string for '" + desc.block_type + "'");
            }
            for (int i = 1; i <= static_cast<int>(value->size()); ++i) {
                if (auto* p = find_port_role(desc.ports, std::to_string(i),
                                             PortRole::DedicatedInput)) {
                    enabled.insert(p);
                }
            }
            continue;
        }
        const std::vector<std::string>* names = nullptr;
        for (const auto& [v, ns] : rule.values) {
            if (v == *value) {
                names = &ns;
                break;
            }
        }
        if (!names) {
            throw Error("UnknownParameterValue",
                        "'" + *value + "' is outside the domain of '" + rule.parameter +
                            "' for '" + desc.block_type + "'");
        }
        for (const auto& name : *names) {
            if (auto* p = find_rule_port(desc, name)) enabled.insert(p);
        }
    }

    std::vector<PortSpec> out;
    for (const auto& p : desc.ports) {
        if (!governed.count(&p) || enabled.count(&p)) out.push_back(p);
    }
    return out;
}

KnowledgeBase KnowledgeBase::ingest(const std::string& text) {
    KnowledgeBase out;
    std::optional<RecordBuilder> rec;

    auto finish = [&] {
        if (!rec) return;
        auto& r = *rec;
        if (!r.saw_path || r.desc.library_path.empty()) {
            throw Error("MalformedRecord",
                        "record '" + r.desc.block_type + "': missing **Path:** line");
        }
        if (!r.saw_ports) {
            throw Error("MalformedRecord",
                        "record '" + r.desc.block_type + "': missing **Ports:** section");
        }
        auto key = normalize_key(r.desc.block_type);
        if (out.by_type_.count(key)) {
            throw Error("DuplicateBlockType", "'" + r.desc.block_type + "'");
        }
        if (out.path_to_type_.count(r.desc.library_path)) {
            throw Error("MalformedRecord", "record '" + r.desc.block_type +
                                               "': duplicate library path '" +
                                               r.desc.library_path + "'");
        }
        r.desc.multi_input_exempt = (key == "electrical reference" ||
                                     key == "solver configuration");
        out.order_.push_back(key);
        out.path_to_type_[r.desc.library_path] = key;
        out.raw_records_[key] = join(r.raw_lines, "\n");
        out.by_type_[key] = std::move(r.desc);
        rec.reset();
    };

    for (const auto& line : split_lines(text)) {
        auto t = trim(line);

        if (starts_with(t, "## ")) {
            finish();
            rec.emplace();
            rec->desc.block_type = trim(t.substr(3));
            rec->raw_lines.push_back(line);
            continue;
        }
        if (!rec) continue;  // prose between records
        rec->raw_lines.push_back(line);

        if (t == "---") {
            finish();
            continue;
        }
        if (t.empty()) {
            rec->close_group();
            continue;
        }

        auto body = strip_bullet(line);
        auto plain = trim(strip_bold(body));

        if (starts_with(plain, "Path:")) {
            rec->desc.library_path = unquote(plain.substr(5));
            rec->saw_path = true;
            rec->close_group();
            continue;
        }
        if (strip_decor(plain) == "Ports") {
            rec->saw_ports = true;
            rec->role_context.reset();
            rec->close_group();
            continue;
        }

        auto header = strip_decor(plain);
        if (header == "Input Port" || header == "Input Ports") {
            rec->role_context = PortRole::DedicatedInput;
            rec->close_group();
            continue;
        }
        if (header == "Output Port" || header == "Output Ports") {
            rec->role_context = PortRole::DedicatedOutput;
            rec->close_group();
            continue;
        }

        if (starts_with(plain, "Port name:")) {
            auto name = strip_decor(plain.substr(10));
            rec->add_port(name, rec->role_context.value_or(PortRole::Conserving));
            rec->close_group();
            continue;
        }

        // Conditional exposure clause.
        if (is_bullet(line) && starts_with(to_lower(plain), "when ")) {
            rec->close_group();
            auto param = backticked(plain);
            auto set_pos = plain.find("is set to");
            if (!param || set_pos == std::string::npos) {
                throw Error("MalformedRecord", "record '" + rec->desc.block_type +
                                                   "': unparseable clause '" + plain + "'");
            }
            auto tail = trim(plain.substr(set_pos + 9));
            auto tail_lower = to_lower(tail);

            if (tail_lower.find(kSignClause) != std::string::npos) {
                int max_signs = 9;
                auto up_pos = tail_lower.find("up to");
                if (up_pos != std::string::npos) {
                    std::size_t i = up_pos + 5;
                    while (i < tail.size() && !std::isdigit(static_cast<unsigned char>(tail[i]))) ++i;
                    if (i < tail.size()) max_signs = std::stoi(tail.substr(i));
                }
                ExposureRule rule;
                rule.parameter = *param;
                rule.kind = ExposureRule::Kind::SignCount;
                rule.max_signs = max_signs;
                rec->desc.exposure_rules.push_back(std::move(rule));
                for (int i = 1; i <= max_signs; ++i) {
                    auto name = std::to_string(i);
                    if (!find_port_role(rec->desc.ports, name, PortRole::DedicatedInput)) {
                        rec->add_port(name, PortRole::DedicatedInput);
                    }
                }
                continue;
            }

            auto cut = tail.find_first_of(",:");
            auto value = unquote(tail.substr(0, cut));
            if (value.empty()) {
                throw Error("MalformedRecord", "record '" + rec->desc.block_type +
                                                   "': clause without a value");
            }

            int rule_idx = -1;
            for (std::size_t i = 0; i < rec->desc.exposure_rules.size(); ++i) {
                if (rec->desc.exposure_rules[i].parameter == *param &&
                    rec->desc.exposure_rules[i].kind == ExposureRule::Kind::ValueMap) {
                    rule_idx = static_cast<int>(i);
                    break;
                }
            }
            if (rule_idx < 0) {
                ExposureRule rule;
                rule.parameter = *param;
                rule.kind = ExposureRule::Kind::ValueMap;
                rec->desc.exposure_rules.push_back(std::move(rule));
                rule_idx = static_cast<int>(rec->desc.exposure_rules.size()) - 1;
            }
            auto& rule = rec->desc.exposure_rules[rule_idx];
            for (const auto& [v, names] : rule.values) {
                if (v == value) {
                    throw Error("MalformedRecord",
                                "record '" + rec->desc.block_type + "': duplicate clause for '" +
                                    rule.parameter + "' = '" + value + "'");
                }
            }
            rule.values.emplace_back(value, std::vector<std::string>{});

            if (tail_lower.find("no additional port") != std::string::npos ||
                trim(plain).back() != ':') {
                continue;  // closed empty clause
            }
            rec->open_rule = rule_idx;
            rec->open_value = static_cast<int>(rule.values.size()) - 1;
            rec->group_role = PortRole::Conserving;
            if (tail_lower.find("input port") != std::string::npos) {
                rec->group_role = PortRole::DedicatedInput;
            } else if (tail_lower.find("output port") != std::string::npos) {
                rec->group_role = PortRole::DedicatedOutput;
            }
            continue;
        }

        // Visual label mapping: "LConn1 appears as ~1".
        if (auto pos = plain.find(" appears as "); pos != std::string::npos) {
            auto name = strip_decor(plain.substr(0, pos));
            auto label = strip_decor(plain.substr(pos + 12));
            for (auto& p : rec->desc.ports) {
                if (p.name == name) {
                    p.visual_label = label;
                    break;
                }
            }
            rec->close_group();
            continue;
        }

        // Port bullet inside an open exposure clause.
        if (rec->open_rule >= 0 && is_bullet(line)) {
            auto name = strip_decor(plain);
            if (single_token(name)) {
                auto& entry =
                    rec->desc.exposure_rules[rec->open_rule].values[rec->open_value];
                entry.second.push_back(name);
                if (!find_rule_port(rec->desc, name)) {
                    rec->add_port(name, rec->group_role);
                }
                continue;
            }
        }

        // Anything else is descriptive prose.
        if (!is_bullet(line)) rec->close_group();
    }
    finish();
    return out;
}

const BlockDescriptor& KnowledgeBase::lookup(std::string_view block_type) const {
    auto key = normalize_key(block_type);
    auto it = by_type_.find(key);
    if (it != by_type_.end()) return it->second;

    // Nearest keys by edit distance, as a hint only.
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& [k, desc] : by_type_) {
        ranked.emplace_back(edit_distance(key, k), desc.block_type);
    }
    std::sort(ranked.begin(), ranked.end());
    std::string hint;
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
        if (i) hint += ", ";
        hint += "'" + ranked[i].second + "'";
    }
    std::string msg = "'" + std::string(block_type) + "' is not in the knowledge base";
    if (!hint.empty()) msg += " (nearest: " + hint + ")";
    throw Error("UnknownBlockType", msg);
}

const BlockDescriptor* KnowledgeBase::find(std::string_view block_type) const noexcept {
    auto it = by_type_.find(normalize_key(block_type));
    return it == by_type_.end() ? nullptr : &it->second;
}

const BlockDescriptor* KnowledgeBase::find_by_path(std::string_view library_path) const noexcept {
    auto it = path_to_type_.find(std::string(library_path));
    if (it == path_to_type_.end()) return nullptr;
    return &by_type_.at(it->second);
}

const std::string& KnowledgeBase::record_text(std::string_view block_type) const {
    lookup(block_type);  // throws with suggestions when absent
    return raw_records_.at(normalize_key(block_type));
}

std::vector<std::string> KnowledgeBase::block_types() const {
    std::vector<std::string> out;
    out.reserve(order_.size());
    for (const auto& key : order_) out.push_back(by_type_.at(key).block_type);
    return out;
}

KnowledgeBase ingest(const std::string& text) { return KnowledgeBase::ingest(text); }

KnowledgeBase ingest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("MalformedRecord", "cannot open KB document '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return KnowledgeBase::ingest(buf.str());
}

std::string render_record(const BlockDescriptor& desc) {
    std::ostringstream out;
    out << "## " << desc.block_type << "\n\n";
    out << "**Path:** `'" << desc.library_path << "'`\n\n";
    out << "**Ports:**\n\n";

    std::set<const PortSpec*> governed;
    for (auto* p : governed_ports(desc)) governed.insert(p);

    bool rules_emitted = false;
    auto emit_rules = [&] {
        if (rules_emitted) return;
        rules_emitted = true;
        for (const auto& rule : desc.exposure_rules) {
            if (rule.kind == ExposureRule::Kind::SignCount) {
                out << "- When **`" << rule.parameter
                    << "`** is set to a string of sign characters (**`+`**/**`-`**, up to **"
                    << rule.max_signs
                    << "** signs), the exposed input ports are **1** through the number of "
                       "signs.\n";
                continue;
            }
            for (const auto& [value, names] : rule.values) {
                if (names.empty()) {
                    out << "- When **`" << rule.parameter << "`** is set to **" << value
                        << "**, no additional port is exposed.\n";
                    continue;
                }
                PortRole role = PortRole::Conserving;
                if (auto* p = find_rule_port(desc, names.front())) role = p->role;
                const char* noun = role == PortRole::DedicatedInput    ? "input port"
                                   : role == PortRole::DedicatedOutput ? "output port"
                                                                       : "port";
                out << "- When **`" << rule.parameter << "`** is set to **" << value
                    << "**, the exposed " << noun << (names.size() == 1 ? " is" : "s are")
                    << ":\n";
                for (const auto& name : names) out << "  - **" << name << "**\n";
                out << "\n";
            }
        }
    };

    std::optional<PortRole> open_role;
    for (const auto& p : desc.ports) {
        if (governed.count(&p)) {
            emit_rules();
            continue;
        }
        if (p.role == PortRole::Conserving) {
            open_role.reset();
            out << "- **Port name:** **" << p.name << "**\n";
            continue;
        }
        if (open_role != p.role) {
            open_role = p.role;
            out << "- **" << (p.role == PortRole::DedicatedInput ? "Input" : "Output")
                << " Port:**\n";
        }
        out << "  - **Port name:** **" << p.name << "**\n";
    }
    emit_rules();

    std::vector<const PortSpec*> labeled;
    for (const auto& p : desc.ports) {
        if (!p.visual_label.empty()) labeled.push_back(&p);
    }
    if (!labeled.empty()) {
        out << "\n*In the visual simulation blocks, the port labels correspond as "
               "follows:*\n";
        for (auto* p : labeled) {
            out << "- **" << p->name << "** appears as **" << p->visual_label << "**.\n";
        }
    }

    out << "\n---\n";
    return out.str();
}

std::string render_kb(const KnowledgeBase& kb) {
    std::ostringstream out;
    for (const auto& type : kb.block_types()) {
        out << render_record(kb.lookup(type)) << "\n";
    }
    return out.str();
}

}  // namespace simukit::kb
