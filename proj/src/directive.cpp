#include "simukit/directive.hpp"

#include <cctype>
#include <optional>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::orchestrator {

namespace {

// Minimal tolerant reader over one brace-delimited object.
struct Reader {
    std::string_view s;
    std::size_t pos = 0;

    bool eof() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool consume(char c) {
        skip_ws();
        if (eof() || s[pos] != c) return false;
        ++pos;
        return true;
    }

    std::optional<std::string> read_string() {
        skip_ws();
        if (eof() || (s[pos] != '"' && s[pos] != '\'')) return std::nullopt;
        char quote = s[pos++];
        std::string out;
        while (!eof() && s[pos] != quote) {
            if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
            out.push_back(s[pos++]);
        }
        if (eof()) return std::nullopt;
        ++pos;  // closing quote
        return out;
    }

    std::optional<std::string> read_word() {
        skip_ws();
        std::size_t start = pos;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                          s[pos] == '_' || s[pos] == '.' || s[pos] == '-' ||
                          s[pos] == '+')) {
            ++pos;
        }
        if (pos == start) return std::nullopt;
        return std::string(s.substr(start, pos - start));
    }

    // Skip a parenthesized aside like "(Default is False)".
    void skip_aside() {
        skip_ws();
        if (eof() || s[pos] != '(') return;
        int depth = 0;
        while (!eof()) {
            if (s[pos] == '(') ++depth;
            if (s[pos] == ')') {
                --depth;
                ++pos;
                if (depth == 0) return;
                continue;
            }
            ++pos;
        }
    }
};

struct Value {
    enum class Kind { Bool, String, List, Other } kind = Kind::Other;
    bool b = false;
    std::string str;
    std::vector<std::string> list;
};

bool parse_value(Reader& r, Value& out);

bool skip_object(Reader& r) {
    if (!r.consume('{')) return false;
    while (true) {
        r.skip_ws();
        if (r.consume('}')) return true;
        if (r.eof()) return false;
        auto key = r.read_string();
        if (!key) key = r.read_word();
        if (!key || !r.consume(':')) return false;
        Value v;
        if (!parse_value(r, v)) return false;
        r.consume(',');
    }
}

bool parse_value(Reader& r, Value& out) {
    r.skip_ws();
    if (r.eof()) return false;
    char c = r.peek();
    if (c == '"' || c == '\'') {
        auto s = r.read_string();
        if (!s) return false;
        out.kind = Value::Kind::String;
        out.str = *s;
        r.skip_aside();
        return true;
    }
    if (c == '[') {
        ++r.pos;
        out.kind = Value::Kind::List;
        while (true) {
            r.skip_ws();
            if (r.consume(']')) break;
            if (r.eof()) return false;
            Value item;
            if (!parse_value(r, item)) return false;
            if (item.kind == Value::Kind::String) {
                out.list.push_back(item.str);
            } else if (item.kind == Value::Kind::Bool) {
                out.list.push_back(item.b ? "true" : "false");
            } else {
                return false;  // nested lists/objects are not directive payloads
            }
            r.consume(',');
        }
        r.skip_aside();
        return true;
    }
    if (c == '{') {
        if (!skip_object(r)) return false;
        out.kind = Value::Kind::Other;
        return true;
    }
    auto word = r.read_word();
    if (!word) return false;
    auto lower = to_lower(*word);
    if (lower == "true" || lower == "false") {
        out.kind = Value::Kind::Bool;
        out.b = (lower == "true");
    } else {
        out.kind = Value::Kind::Other;
        out.str = *word;
    }
    r.skip_aside();
    return true;
}

// Parses one object and pulls the key's value; returns false on syntax error.
bool parse_object_for(std::string_view object, const std::string& key,
                      std::optional<Value>& found) {
    Reader r{object};
    if (!r.consume('{')) return false;
    while (true) {
        r.skip_ws();
        if (r.consume('}')) return true;
        if (r.eof()) return false;
        auto k = r.read_string();
        if (!k) k = r.read_word();
        if (!k || !r.consume(':')) return false;
        Value v;
        if (!parse_value(r, v)) return false;
        if (*k == key) found = v;
        r.consume(',');
    }
}

// Top-level brace spans, left to right.
std::vector<std::string_view> object_spans(std::string_view text) {
    std::vector<std::string_view> spans;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '{') {
            if (depth == 0) start = i;
            ++depth;
        } else if (text[i] == '}') {
            if (depth > 0) {
                --depth;
                if (depth == 0) spans.push_back(text.substr(start, i - start + 1));
            }
        }
    }
    return spans;
}

}  // namespace

Directive extract_directive(const std::string& text, const std::string& key) {
    auto spans = object_spans(text);
    bool saw_key_malformed = false;

    for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
        std::optional<Value> found;
        bool ok = parse_object_for(*it, key, found);
        if (!ok) {
            if (it->find(key) != std::string_view::npos) saw_key_malformed = true;
            continue;
        }
        if (!found) continue;

        Directive d;
        d.key = key;
        switch (found->kind) {
            case Value::Kind::Bool:
                d.type = Directive::Type::Bool;
                d.bool_value = found->b;
                return d;
            case Value::Kind::List:
                d.type = Directive::Type::List;
                d.list_value = found->list;
                return d;
            case Value::Kind::String: {
                auto lower = to_lower(found->str);
                if (lower == "true" || lower == "false") {
                    d.type = Directive::Type::Bool;
                    d.bool_value = (lower == "true");
                    return d;
                }
                throw Error("DirectiveMalformed",
                            "key '" + key + "' holds a plain string, expected a boolean "
                            "or a list");
            }
            case Value::Kind::Other:
                throw Error("DirectiveMalformed",
                            "key '" + key + "' holds an unsupported value");
        }
    }

    if (saw_key_malformed) {
        throw Error("DirectiveMalformed",
                    "found '" + key + "' only inside an unparseable object");
    }
    throw Error("DirectiveNotFound", "no object with key '" + key + "' in the response");
}

}  // namespace simukit::orchestrator
