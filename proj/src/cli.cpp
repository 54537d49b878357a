#include "simukit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "simukit/codegen.hpp"
#include "simukit/conformance.hpp"
#include "simukit/diff.hpp"
#include "simukit/error.hpp"
#include "simukit/executor.hpp"
#include "simukit/jsonio.hpp"
#include "simukit/kb.hpp"
#include "simukit/netlist.hpp"
#include "simukit/orchestrator.hpp"
#include "simukit/text.hpp"

namespace simukit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDefaultKb = "fixtures/kb/simulink_blocks.md";

struct Config {
    std::string kb_path;
    std::string matlab_launcher;
    std::string endpoint;
    std::map<std::string, std::string> model_ids;
    orchestrator::Limits limits;
    std::string format = "text";
};

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

// Simple key = value config file. Keys: kb, matlab_launcher, endpoint,
// model.<Role>, max_review, max_build, format.
void load_config_file(Config& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ConfigError", "cannot open config '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        auto key = trim(t.substr(0, eq));
        auto value = trim(t.substr(eq + 1));
        if (key == "kb") config.kb_path = value;
        else if (key == "matlab_launcher") config.matlab_launcher = value;
        else if (key == "endpoint") config.endpoint = value;
        else if (key == "max_review") config.limits.max_review = std::stoi(value);
        else if (key == "max_build") config.limits.max_build = std::stoi(value);
        else if (key == "format") config.format = value;
        else if (starts_with(key, "model.")) config.model_ids[key.substr(6)] = value;
    }
}

std::string resolve_kb_path(const Config& config, const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (auto env = env_or_empty("SIMUKIT_KB"); !env.empty()) return env;
    if (!config.kb_path.empty()) return config.kb_path;
    if (fs::exists(kDefaultKb)) return kDefaultKb;
    throw Error("ConfigError",
                "no knowledge base given (use --kb, SIMUKIT_KB, or a config file)");
}

kb::KnowledgeBase load_kb(const Config& config, const std::string& flag_value,
                          std::string* resolved = nullptr) {
    auto path = resolve_kb_path(config, flag_value);
    if (resolved) *resolved = path;
    return kb::ingest_file(path);
}

void parse_limits(const std::string& spec, orchestrator::Limits& limits) {
    for (const auto& part : split_lines(spec)) (void)part;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        auto key = trim(item.substr(0, eq));
        auto value = std::stoi(trim(item.substr(eq + 1)));
        if (key == "max-review" || key == "max_review") limits.max_review = value;
        if (key == "max-build" || key == "max_build") limits.max_build = value;
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ConfigError", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool is_script_file(const std::string& path) { return ends_with(path, ".json"); }

codegen::BuildScript load_script(const std::string& path, const kb::KnowledgeBase& kb) {
    if (is_script_file(path)) return jsonio::script_from_file(path);
    auto net = netlist::parse_netlist_file(path);
    auto model = codegen::sanitize_model_name(fs::path(path).stem().string());
    return codegen::lower(net, kb, model, codegen::LowerOptions{false});
}

int cmd_kb_ingest(const Config& config, const std::string& file,
                  const std::string& format) {
    auto kb = kb::ingest_file(file);
    if (format == "json") {
        json j{{"count", kb.size()}, {"blocks", kb.block_types()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "ingested " << kb.size() << " block descriptions from " << file
                  << "\n";
        for (const auto& type : kb.block_types()) std::cout << "  " << type << "\n";
    }
    return 0;
}

int cmd_kb_show(const Config& config, const std::string& kb_flag,
                const std::string& type, const std::string& format) {
    auto kb = load_kb(config, kb_flag);
    const auto& desc = kb.lookup(type);
    if (format == "json") {
        json ports = json::array();
        for (const auto& p : desc.ports) {
            json pj{{"name", p.name}, {"role", kb::to_string(p.role)}};
            if (!p.visual_label.empty()) pj["visual_label"] = p.visual_label;
            ports.push_back(pj);
        }
        json j{{"block_type", desc.block_type},
               {"library_path", desc.library_path},
               {"ports", ports},
               {"multi_input_exempt", desc.multi_input_exempt},
               {"has_port_count_params", desc.has_port_count_params()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << kb::render_record(desc);
    }
    return 0;
}

int cmd_parse(const std::string& file, const std::string& format) {
    auto net = netlist::parse_netlist_file(file);
    if (format == "json") {
        json blocks = json::array();
        for (const auto& b : net.blocks) {
            blocks.push_back({{"name", b.name}, {"type", b.block_type}});
        }
        json j{{"blocks", blocks},
               {"connections", net.connections.size()},
               {"rendered", netlist::render(net)}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "parsed " << net.blocks.size() << " blocks, "
                  << net.connections.size() << " connections\n";
    }
    return 0;
}

int cmd_validate(const Config& config, const std::string& kb_flag,
                 const std::string& file, const std::string& format) {
    auto kb = load_kb(config, kb_flag);
    auto net = netlist::parse_netlist_file(file);
    auto report = conformance::validate(net, kb);
    if (format == "json") {
        std::cout << jsonio::to_json(report).dump(2) << "\n";
    } else {
        std::cout << conformance::render_report_text(report);
    }
    return report.pass ? 0 : 1;
}

int cmd_gen(const Config& config, const std::string& kb_flag, const std::string& file,
            const std::string& emit, const std::string& model_flag, bool autorouting,
            const std::string& out_dir) {
    auto kb = load_kb(config, kb_flag);
    auto net = netlist::parse_netlist_file(file);
    auto model = model_flag.empty()
                     ? codegen::sanitize_model_name(fs::path(file).stem().string())
                     : model_flag;
    auto script = codegen::lower(net, kb, model);  // enforces the validity gate

    codegen::RenderOptions render_options{autorouting};
    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);

    fs::path out_path;
    std::string text;
    if (emit == "matlab") {
        out_path = dir / (model + ".m");
        text = codegen::render_matlab(script, render_options);
    } else if (emit == "engine") {
        out_path = dir / (model + "_build.txt");
        text = codegen::render_engine_script(script, render_options);
    } else if (emit == "ir") {
        out_path = dir / (model + "_script.json");
        text = jsonio::to_json(script).dump(2) + "\n";
    } else {
        throw Error("ConfigError", "--emit must be matlab, engine, or ir");
    }
    std::ofstream out(out_path, std::ios::binary);
    out << text;
    std::cout << out_path.string() << "\n";
    return 0;
}

int cmd_dryrun(const Config& config, const std::string& kb_flag,
               const std::string& file, const std::string& format) {
    auto kb = load_kb(config, kb_flag);
    auto script = load_script(file, kb);
    auto result = executor::dry_run(script, kb);
    if (format == "json") {
        std::cout << jsonio::to_json(result).dump(2) << "\n";
    } else if (result.ok()) {
        std::cout << "dry run ok (" << script.commands.size() << " commands)\n";
    } else {
        std::cout << "dry run failed at command " << *result.failed_command_index << ": "
                  << result.error_message << "\n";
    }
    return result.ok() ? 0 : 1;
}

int cmd_exec(const Config& config, const std::string& kb_flag, const std::string& file,
             const std::string& matlab_flag, double timeout, const std::string& temp_dir,
             const std::string& format) {
    auto kb = load_kb(config, kb_flag);
    auto script = load_script(file, kb);

    executor::ExternalConfig external;
    external.matlab_launcher = !matlab_flag.empty() ? matlab_flag
                               : !env_or_empty("SIMUKIT_MATLAB").empty()
                                   ? env_or_empty("SIMUKIT_MATLAB")
                                   : config.matlab_launcher;
    external.timeout_s = timeout;
    external.temp_dir = temp_dir;

    auto result = executor::run_external(script, external);
    if (format == "json") {
        std::cout << jsonio::to_json(result).dump(2) << "\n";
    } else if (result.ok()) {
        std::cout << "external run ok\n";
    } else {
        std::cout << "external run failed: " << result.error_message << "\n";
    }
    return result.ok() ? 0 : 1;
}

int cmd_diff(const Config& config, const std::string& kb_flag, const std::string& gt,
             const std::string& gen, const std::string& format) {
    auto kb = load_kb(config, kb_flag);
    auto gt_net = netlist::parse_netlist_file(gt);
    auto gen_net = netlist::parse_netlist_file(gen);
    auto result = diff::accuracy(gt_net, gen_net, kb);
    if (format == "json") {
        std::cout << jsonio::to_json(result).dump(2) << "\n";
    } else {
        std::cout << "blocks " << result.b_match << "/" << result.b_gt << ", connections "
                  << result.c_match << "/" << result.c_gt << ", accuracy "
                  << diff::format_percent(result.percent()) << "\n";
    }
    return 0;
}

int cmd_run(const Config& config, const std::string& kb_flag,
            const std::string& task_dir, const std::string& replay_file,
            const std::string& endpoint_flag, const std::string& model_flag,
            const std::string& executor_kind, const std::string& limits_spec,
            const std::string& matlab_flag) {
    auto kb = load_kb(config, kb_flag);

    orchestrator::TaskInputs task;
    task.model_ids = config.model_ids;
    if (!model_flag.empty()) task.model_ids["default"] = model_flag;

    if (!task_dir.empty()) {
        fs::path dir(task_dir);
        task.task_name = dir.filename().string();
        task.model_name = codegen::sanitize_model_name(task.task_name);
        for (const char* name : {"explanation.md", "explanation.txt"}) {
            if (fs::exists(dir / name)) {
                task.simulation_explanation = slurp((dir / name).string());
                break;
            }
        }
        for (const char* name : {"diagram.png", "diagram.jpg"}) {
            if (fs::exists(dir / name)) {
                task.image_path = (dir / name).string();
                break;
            }
        }
    } else if (!replay_file.empty()) {
        task.task_name = fs::path(replay_file).stem().string();
        task.model_name = codegen::sanitize_model_name(task.task_name);
    }
    if (task.simulation_explanation.empty()) {
        task.simulation_explanation = "(no explanation provided)";
    }

    orchestrator::PipelineOptions options;
    options.limits = config.limits;
    if (!limits_spec.empty()) parse_limits(limits_spec, options.limits);
    options.backend = executor_kind == "matlab" ? orchestrator::ExecutorBackend::External
                                                : orchestrator::ExecutorBackend::DryRun;
    options.external.matlab_launcher = !matlab_flag.empty()
                                           ? matlab_flag
                                           : env_or_empty("SIMUKIT_MATLAB");
    if (options.external.matlab_launcher.empty()) {
        options.external.matlab_launcher = config.matlab_launcher;
    }

    std::unique_ptr<orchestrator::Transport> transport;
    if (!replay_file.empty()) {
        transport = std::make_unique<orchestrator::ReplayTransport>(
            orchestrator::ReplayTransport::from_file(replay_file));
        options.clock = [] { return std::string("1970-01-01T00:00:00Z"); };
    } else {
        auto endpoint = !endpoint_flag.empty() ? endpoint_flag
                        : !env_or_empty("SIMUKIT_ENDPOINT").empty()
                            ? env_or_empty("SIMUKIT_ENDPOINT")
                            : config.endpoint;
        if (endpoint.empty()) {
            throw Error("ConfigError", "run needs --replay <transcript> or --endpoint");
        }
        transport = std::make_unique<orchestrator::HttpTransport>(endpoint);
    }

    auto record = orchestrator::run_pipeline(task, kb, *transport, options);
    std::cout << jsonio::to_json(record).dump(2) << "\n";
    std::cerr << "final state: " << orchestrator::to_string(record.final_state) << "\n";
    return record.final_state == orchestrator::WorkflowState::Done ? 0 : 1;
}

int cmd_report(const Config& config, const std::string& kb_flag, const std::string& file,
               const std::string& model_flag) {
    auto kb = load_kb(config, kb_flag);
    auto net = netlist::parse_netlist_file(file);
    auto model = model_flag.empty()
                     ? codegen::sanitize_model_name(fs::path(file).stem().string())
                     : model_flag;
    auto script = codegen::lower(net, kb, model, codegen::LowerOptions{false});

    std::map<std::string, std::string> descriptions;
    for (const auto& b : net.blocks) {
        if (kb.find(b.block_type)) {
            descriptions[normalize_key(b.block_type)] = kb.record_text(b.block_type);
        }
    }
    std::cout << orchestrator::write_report(net, kb, script, descriptions);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"simukit - deterministic Simulink model-generation toolchain"};
    app.require_subcommand(1);

    std::string config_file, kb_flag, format = "text";
    app.add_option("--config", config_file, "key = value config file");
    app.add_option("--kb", kb_flag, "knowledge base document")->envname("SIMUKIT_KB");

    auto* kb_cmd = app.add_subcommand("kb", "knowledge base tools");
    kb_cmd->require_subcommand(1);
    std::string kb_ingest_file;
    auto* kb_ingest = kb_cmd->add_subcommand("ingest", "parse and index a KB document");
    kb_ingest->add_option("file", kb_ingest_file)->required();
    kb_ingest->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    std::string kb_show_type;
    auto* kb_show = kb_cmd->add_subcommand("show", "print one block descriptor");
    kb_show->add_option("block-type", kb_show_type)->required();
    kb_show->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string parse_file;
    auto* parse_cmd = app.add_subcommand("parse", "parse a netlist file");
    parse_cmd->add_option("file", parse_file)->required();
    parse_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string validate_file;
    auto* validate_cmd =
        app.add_subcommand("validate", "run the eight conformance checks");
    validate_cmd->add_option("file", validate_file)->required();
    validate_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string gen_file, gen_emit = "matlab", gen_model, gen_out;
    bool gen_autorouting = false;
    auto* gen_cmd = app.add_subcommand("gen", "lower a netlist to a build script");
    gen_cmd->add_option("file", gen_file)->required();
    gen_cmd->add_option("--emit", gen_emit)->check(CLI::IsMember({"matlab", "engine", "ir"}));
    gen_cmd->add_option("--model", gen_model, "model name (default: file stem)");
    gen_cmd->add_flag("--autorouting", gen_autorouting, "emit autorouting on add_line");
    gen_cmd->add_option("--out", gen_out, "output directory");

    std::string dryrun_file;
    auto* dryrun_cmd = app.add_subcommand("dryrun", "interpret a build script offline");
    dryrun_cmd->add_option("file", dryrun_file, "netlist or script JSON")->required();
    dryrun_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string exec_file, exec_matlab, exec_tempdir;
    double exec_timeout = 600.0;
    auto* exec_cmd = app.add_subcommand("exec", "run via an external MATLAB process");
    exec_cmd->add_option("file", exec_file, "netlist or script JSON")->required();
    exec_cmd->add_option("--matlab", exec_matlab, "MATLAB launcher path");
    exec_cmd->add_option("--timeout", exec_timeout, "seconds (default 600)");
    exec_cmd->add_option("--tempdir", exec_tempdir);
    exec_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string diff_gt, diff_gen;
    auto* diff_cmd = app.add_subcommand("diff", "reproduction accuracy vs ground truth");
    diff_cmd->add_option("gt", diff_gt)->required();
    diff_cmd->add_option("gen", diff_gen)->required();
    diff_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string run_task, run_replay, run_endpoint, run_model, run_executor = "dryrun";
    std::string run_limits, run_matlab;
    auto* run_cmd = app.add_subcommand("run", "drive the full agent workflow");
    run_cmd->add_option("--task", run_task, "task directory");
    run_cmd->add_option("--replay", run_replay, "replay transcript (JSONL)");
    run_cmd->add_option("--endpoint", run_endpoint)->envname("SIMUKIT_ENDPOINT");
    run_cmd->add_option("--model", run_model, "default model id for all roles");
    run_cmd->add_option("--executor", run_executor)
        ->check(CLI::IsMember({"dryrun", "matlab"}));
    run_cmd->add_option("--limits", run_limits, "max-review=3,max-build=5");
    run_cmd->add_option("--matlab", run_matlab)->envname("SIMUKIT_MATLAB");

    std::string report_file, report_model;
    auto* report_cmd = app.add_subcommand("report", "render the four-section report");
    report_cmd->add_option("file", report_file)->required();
    report_cmd->add_option("--model", report_model);

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Config config;
        if (!config_file.empty()) load_config_file(config, config_file);
        if (config.format != "text" && format == "text") format = config.format;

        if (kb_ingest->parsed()) return cmd_kb_ingest(config, kb_ingest_file, format);
        if (kb_show->parsed()) return cmd_kb_show(config, kb_flag, kb_show_type, format);
        if (parse_cmd->parsed()) return cmd_parse(parse_file, format);
        if (validate_cmd->parsed())
            return cmd_validate(config, kb_flag, validate_file, format);
        if (gen_cmd->parsed())
            return cmd_gen(config, kb_flag, gen_file, gen_emit, gen_model,
                           gen_autorouting, gen_out);
        if (dryrun_cmd->parsed()) return cmd_dryrun(config, kb_flag, dryrun_file, format);
        if (exec_cmd->parsed())
            return cmd_exec(config, kb_flag, exec_file, exec_matlab, exec_timeout,
                            exec_tempdir, format);
        if (diff_cmd->parsed()) return cmd_diff(config, kb_flag, diff_gt, diff_gen, format);
        if (run_cmd->parsed())
            return cmd_run(config, kb_flag, run_task, run_replay, run_endpoint, run_model,
                           run_executor, run_limits, run_matlab);
        if (report_cmd->parsed()) return cmd_report(config, kb_flag, report_file, report_model);
        return 2;
    } catch (const Error& e) {
        std::cerr << "simukit: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "simukit: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace simukit::cli
