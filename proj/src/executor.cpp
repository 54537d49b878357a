#include "simukit/executor.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::executor {

namespace fs = std::filesystem;
using codegen::AddBlock;
using codegen::AddLine;
using codegen::ArrangeSystem;
using codegen::BuildScript;
using codegen::NewSystem;
using codegen::OpenSystem;
using codegen::SaveSystem;
using codegen::SetParam;
using kb::PortRole;
using kb::PortSide;

namespace {

struct BlockState {
    std::string type_key;  // canonical block type
    ParamSettings params;  // SetParam history, first value wins per key
};

struct Endpoint {
    std::string block;
    std::string port;
};

std::optional<Endpoint> split_endpoint(const std::string& path) {
    auto slash = path.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == path.size()) {
        return std::nullopt;
    }
    return Endpoint{path.substr(0, slash), path.substr(slash + 1)};
}

}  // namespace

ExecutionResult dry_run(const BuildScript& script, const kb::KnowledgeBase& kb,
                        const AttachmentPolicy& policy) {
    auto started = std::chrono::steady_clock::now();
    ExecutionResult result;

    std::set<std::string> models;
    std::map<std::string, BlockState> blocks;  // display name -> state

    auto fail = [&](std::size_t index, std::string message) {
        result.status = ExecutionResult::Status::Failed;
        result.failed_command_index = index;
        result.error_message = std::move(message);
    };

    auto block_name_of = [&](const std::string& dest_path,
                             const std::string& model) -> std::string {
        if (starts_with(dest_path, model + "/")) return dest_path.substr(model.size() + 1);
        return dest_path;
    };

    for (std::size_t i = 0; i < script.commands.size(); ++i) {
        const auto& cmd = script.commands[i];

        if (const auto* c = std::get_if<NewSystem>(&cmd)) {
            models.insert(c->model);
        } else if (const auto* c = std::get_if<OpenSystem>(&cmd)) {
            if (!models.count(c->model)) {
                fail(i, "There is no system named '" + c->model + "'");
                break;
            }
        } else if (const auto* c = std::get_if<AddBlock>(&cmd)) {
            const auto* desc = kb.find_by_path(c->library_path);
            if (!desc) {
                fail(i, "There is no block named '" + c->library_path + "'");
                break;
            }
            auto name = block_name_of(c->dest_path, script.model_name);
            if (blocks.count(name)) {
                if (!c->make_name_unique) {
                    fail(i, "A block named '" + name + "' already exists");
                    break;
                }
                int k = 1;
                while (blocks.count(name + std::to_string(k))) ++k;
                name += std::to_string(k);
            }
            blocks[name] = BlockState{normalize_key(desc->block_type), {}};
        } else if (const auto* c = std::get_if<SetParam>(&cmd)) {
            auto name = block_name_of(c->block_path, script.model_name);
            auto it = blocks.find(name);
            if (it == blocks.end()) {
                fail(i, "There is no block named '" + name + "'");
                break;
            }
            it->second.params.push_back(ParamSetting{c->key, c->value});
            const auto& desc = kb.lookup(it->second.type_key);
            try {
                kb::exposed_ports(desc, it->second.params);
            } catch (const std::exception&) {
                fail(i, "Invalid setting in block '" + name + "' for parameter '" +
                            c->key + "'");
                break;
            }
        } else if (const auto* c = std::get_if<AddLine>(&cmd)) {
            auto src = split_endpoint(c->src);
            auto dst = split_endpoint(c->dst);
            if (!src || !dst) {
                fail(i, "Invalid line endpoint specification");
                break;
            }
            auto src_it = blocks.find(src->block);
            auto dst_it = blocks.find(dst->block);
            if (src_it == blocks.end() || dst_it == blocks.end()) {
                fail(i, "There is no block named '" +
                            (src_it == blocks.end() ? src->block : dst->block) + "'");
                break;
            }

            auto resolve = [&](const BlockState& state, const Endpoint& e,
                               PortSide side) -> const kb::PortSpec* {
                const auto& desc = kb.lookup(state.type_key);
                const auto* port = kb::resolve_port(desc, e.port, side);
                if (!port) return nullptr;
                // A governed port only exists once its parameter exposed it.
                for (const auto& exposed : kb::exposed_ports(desc, state.params)) {
                    if (exposed.name == port->name && exposed.role == port->role) {
                        return port;
                    }
                }
                return nullptr;
            };

            const auto* src_port = resolve(src_it->second, *src, PortSide::Source);
            const auto* dst_port = resolve(dst_it->second, *dst, PortSide::Destination);
            if (!src_port || !dst_port) {
                const auto& e = !src_port ? *src : *dst;
                fail(i, "There is no port named '" + e.port + "' on block '" + e.block +
                            "'");
                break;
            }
            if (src_port->role == PortRole::DedicatedInput) {
                fail(i, "Port '" + c->src + "' is an input port and cannot be a line "
                        "source");
                break;
            }
            if (dst_port->role == PortRole::DedicatedOutput) {
                fail(i, "Port '" + c->dst + "' is an output port and cannot be a line "
                        "destination");
                break;
            }

            int& src_occ = result.port_occupancy[src->block + "/" + src_port->name];
            int& dst_occ = result.port_occupancy[dst->block + "/" + dst_port->name];

            if (policy.reject_second_input_line &&
                dst_port->role == PortRole::DedicatedInput && dst_occ >= 1) {
                fail(i, kSecondLineMessage);
                break;
            }
            if (policy.reject_conserving_when_both_occupied &&
                src_port->role == PortRole::Conserving &&
                dst_port->role == PortRole::Conserving && src_occ >= 1 && dst_occ >= 1) {
                fail(i, kSecondLineMessage);
                break;
            }
            ++src_occ;
            ++dst_occ;
        } else if (const auto* c = std::get_if<ArrangeSystem>(&cmd)) {
            if (!models.count(c->model)) {
                fail(i, "There is no system named '" + c->model + "'");
                break;
            }
        } else if (const auto* c = std::get_if<SaveSystem>(&cmd)) {
            if (!models.count(c->model)) {
                fail(i, "There is no system named '" + c->model + "'");
                break;
            }
        }
    }

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

ExternalConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("LauncherNotFound", "cannot open config '" + path + "'");
    ExternalConfig config;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        auto key = trim(t.substr(0, eq));
        auto value = trim(t.substr(eq + 1));
        if (key == "matlab_launcher") config.matlab_launcher = value;
        else if (key == "timeout_s") config.timeout_s = std::stod(value);
        else if (key == "temp_dir") config.temp_dir = value;
    }
    return config;
}

ExecutionResult run_external(const BuildScript& script, const ExternalConfig& config) {
    if (config.matlab_launcher.empty() || !fs::exists(config.matlab_launcher)) {
        throw Error("LauncherNotFound",
                    "MATLAB launcher '" + config.matlab_launcher + "' does not exist");
    }

    fs::path base = config.temp_dir.empty() ? fs::temp_directory_path()
                                            : fs::path(config.temp_dir);
    std::mt19937_64 rng(std::random_device{}());
    fs::path dir;
    do {
        dir = base / ("simukit_run_" + std::to_string(rng()));
    } while (fs::exists(dir));
    fs::create_directories(dir);

    fs::path script_path = dir / (script.model_name + ".m");
    {
        std::ofstream out(script_path);
        out << codegen::render_matlab(script);
    }

    int err_pipe[2];
    if (pipe(err_pipe) != 0) {
        throw Error("LauncherNotFound", "cannot create pipe for launcher");
    }

    auto started = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid == 0) {
        close(err_pipe[0]);
        dup2(err_pipe[1], STDERR_FILENO);
        close(err_pipe[1]);
        int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, STDOUT_FILENO);
        if (chdir(dir.c_str()) != 0) _exit(127);
        std::string run_arg = "run('" + script_path.string() + "'); exit";
        execl(config.matlab_launcher.c_str(), config.matlab_launcher.c_str(), "-batch",
              run_arg.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(err_pipe[1]);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    std::string captured;
    int status = 0;
    bool finished = false;
    for (;;) {
        char buf[4096];
        ssize_t got;
        while ((got = read(err_pipe[0], buf, sizeof(buf))) > 0) {
            captured.append(buf, static_cast<std::size_t>(got));
        }
        pid_t waited = waitpid(pid, &status, WNOHANG);
        if (waited == pid) {
            finished = true;
            break;
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       started)
                             .count();
        if (elapsed > config.timeout_s) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }

    if (!finished) {
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        close(err_pipe[0]);
        throw Error("Timeout", "external run exceeded " +
                                   std::to_string(config.timeout_s) + " s");
    }

    char buf[4096];
    ssize_t got;
    while ((got = read(err_pipe[0], buf, sizeof(buf))) > 0) {
        captured.append(buf, static_cast<std::size_t>(got));
    }
    close(err_pipe[0]);

    ExecutionResult result;
    result.raw_output = captured;
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    bool exited_ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    if (!exited_ok) {
        result.status = ExecutionResult::Status::Failed;
        // First non-empty stderr line carries the headline error.
        for (const auto& line : split_lines(captured)) {
            auto t = trim(line);
            if (!t.empty()) {
                result.error_message = t;
                break;
            }
        }
        if (result.error_message.empty()) {
            result.error_message =
                "launcher exited with status " +
                std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
        }
    }
    return result;
}

}  // namespace simukit::executor
