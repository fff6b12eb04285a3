// lyosim: scenario-driven front end for the lyophilization simulator.
//
// Exit codes: 0 success, 1 usage or I/O problem, 2 schema violation,
// 3 simulation failure, 4 reference threshold exceeded (with --assert).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lyo/commands.hpp"
#include "lyo/errors.hpp"
#include "lyo/io.hpp"
#include "lyo/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kSchema = 2, kSimulation = 3, kThreshold = 4 };

struct Options {
    std::string command;
    std::string scenario;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool assert_refs = false;
    std::string sweep;
    std::string format = "csv";
};

struct Sweep {
    std::string path;
    double start = 0, stop = 0;
    std::size_t n = 0;

    double value(std::size_t i) const {
        if (n == 1) return start;
        return start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
};

Sweep parse_sweep(const std::string& spec) {
    // param=start:stop:n
    const auto eq = spec.find('=');
    const auto c1 = spec.find(':', eq == std::string::npos ? 0 : eq);
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (eq == std::string::npos || eq == 0 || c1 == std::string::npos || c2 == std::string::npos) {
        throw lyo::SchemaError("--sweep: expected param=start:stop:n, got '" + spec + "'");
    }
    Sweep s;
    s.path = spec.substr(0, eq);
    try {
        std::size_t used = 0;
        const std::string a = spec.substr(eq + 1, c1 - eq - 1), b = spec.substr(c1 + 1, c2 - c1 - 1),
                          c = spec.substr(c2 + 1);
        s.start = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        s.stop = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
        const long long n = std::stoll(c, &used);
        if (used != c.size() || n < 1) throw std::invalid_argument(c);
        s.n = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw lyo::SchemaError("--sweep: malformed numbers in '" + spec + "'");
    }
    return s;
}

json read_document(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw lyo::SchemaError(path + ": cannot open scenario file");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw lyo::SchemaError(path + ": " + e.what());
    }
}

std::string base_dir_of(const std::string& path) {
    if (path.empty()) return ".";
    const auto d = fs::path(path).parent_path();
    return d.empty() ? "." : d.string();
}

struct RunStatus {
    int code = kOk;
    std::string message;
    json summary;
};

std::mutex g_log_mutex;

void log_line(const std::string& s) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << s << '\n';
}

// One scenario run end-to-end: parse, simulate, write files.
RunStatus run_one(const Options& opt, const json& doc, const fs::path& out_dir) {
    RunStatus st;
    lyo::Scenario sc;
    try {
        sc = lyo::parse_scenario(doc, base_dir_of(opt.scenario));
        if (opt.seed) {
            sc.seed = *opt.seed;
            sc.cycle.freezing.protocol.seed = *opt.seed;
            sc.effective["seed"] = *opt.seed;
        }
    } catch (const lyo::SchemaError& e) {
        return {kSchema, std::string("schema error: ") + e.what(), {}};
    }

    fs::create_directories(out_dir);
    lyo::write_text((out_dir / "effective_parameters.json").string(), sc.effective.dump(2) + "\n");

    lyo::CommandOutput res;
    try {
        res = lyo::run_command(opt.command, sc);
    } catch (const lyo::SchemaError& e) {
        return {kSchema, std::string("schema error: ") + e.what(), {}};
    } catch (const lyo::SimulationError& e) {
        st.code = kSimulation;
        st.message = std::string("simulation failure [stage=") + e.stage() + "]: " + e.what();
        st.summary = {{"command", opt.command}, {"error", {{"stage", e.stage()}, {"message", e.what()}}}};
        lyo::write_text((out_dir / "summary.json").string(), st.summary.dump(2) + "\n");
        return st;
    } catch (const std::exception& e) {
        st.code = kSimulation;
        st.message = std::string("simulation failure [stage=unknown]: ") + e.what();
        st.summary = {{"command", opt.command}, {"error", {{"stage", "unknown"}, {"message", e.what()}}}};
        lyo::write_text((out_dir / "summary.json").string(), st.summary.dump(2) + "\n");
        return st;
    }

    for (const auto& [stem, table] : res.tables) {
        if (opt.format == "json") {
            lyo::write_text((out_dir / (stem + ".json")).string(), lyo::to_json(table).dump() + "\n");
        } else {
            lyo::write_text((out_dir / (stem + ".csv")).string(), lyo::to_csv(table));
        }
    }
    res.summary["seed"] = sc.seed;
    lyo::write_text((out_dir / "summary.json").string(), res.summary.dump(2) + "\n");
    st.summary = res.summary;
    if (opt.assert_refs && !res.references_passed) {
        st.code = kThreshold;
        std::string which;
        for (const auto& c : res.comparisons) {
            for (const auto& m : c.exceeded) which += " " + c.name + ":" + m;
        }
        st.message = "reference threshold exceeded:" + which;
    }
    return st;
}

int run_sweep(const Options& opt, const json& base, const fs::path& out_dir) {
    const Sweep sw = parse_sweep(opt.sweep);
    std::vector<RunStatus> results(sw.n);
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(sw.n, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next++; i < sw.n; i = next++) {
                json doc = base;
                char name[32];
                std::snprintf(name, sizeof name, "sweep_%03zu", i);
                try {
                    lyo::set_scenario_value(doc, sw.path, sw.value(i));
                    results[i] = run_one(opt, doc, out_dir / name);
                } catch (const lyo::SchemaError& e) {
                    results[i] = {kSchema, std::string("schema error: ") + e.what(), {}};
                } catch (const std::exception& e) {
                    results[i] = {kUsage, e.what(), {}};
                }
                if (!results[i].message.empty()) log_line(std::string(name) + ": " + results[i].message);
            }
        }));
    }
    for (auto& f : pool) f.get();

    // Index table: one row per run with its status and headline times.
    std::string csv = "index," + sw.path + ",exit_code,t_f5_s,t_d1_s,t_d2_s\n";
    int worst = kOk;
    for (std::size_t i = 0; i < sw.n; ++i) {
        const auto& r = results[i];
        worst = std::max(worst, r.code);
        auto pick = [&](std::initializer_list<const char*> path) {
            const json* j = &r.summary;
            for (const char* k : path) {
                if (!j->is_object() || !j->contains(k)) return std::string();
                j = &(*j)[k];
            }
            return j->is_number() ? lyo::format_double(j->get<double>()) : std::string();
        };
        csv += std::to_string(i) + "," + lyo::format_double(sw.value(i)) + "," + std::to_string(r.code) + "," +
               pick({"freezing", "t_f5_s"}) + "," + pick({"primary_drying", "t_d1_s"}) + "," +
               pick({"secondary_drying", "t_d2_s"}) + "\n";
    }
    fs::create_directories(out_dir);
    lyo::write_text((out_dir / "sweep_summary.csv").string(), csv);
    return worst;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("LYOSIM_OUT_DIR"); env && *env) return env;
    return "lyosim_out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous lyophilization simulator for suspended vials"};
    app.require_subcommand(1, 1);
    Options opt;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"freeze", "Freezing: preconditioning, VISF, nucleation, solidification, final cooling"},
        {"primary", "Primary drying from a uniform frozen product"},
        {"secondary", "Secondary drying (desorption of bound water)"},
        {"cycle", "Full cycle: freezing, primary and secondary drying chained"},
        {"failure", "Primary drying with a capacity-limited condenser against the baseline"},
        {"analyze", "Biot screening, cylinder conduction series and mass-transfer time scales"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", opt.scenario, "Scenario JSON file (defaults apply to anything omitted)");
        sub->add_option("--out", opt.out_dir, "Output directory (default: $LYOSIM_OUT_DIR or ./lyosim_out)");
        sub->add_option("--seed", opt.seed, "RNG seed, overrides the scenario");
        sub->add_flag("--assert", opt.assert_refs, "Exit 4 when a reference comparison exceeds its threshold");
        sub->add_option("--sweep", opt.sweep, "Parameter sweep param=start:stop:n (dotted scenario path)");
        sub->add_option("--format", opt.format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&opt, name = name] { opt.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const fs::path out_dir = opt.out_dir.empty() ? default_out_dir() : opt.out_dir;
    try {
        const json doc = read_document(opt.scenario);
        if (!opt.sweep.empty()) {
            const int code = run_sweep(opt, doc, out_dir);
            std::cout << "sweep written to " << out_dir.string() << " (exit " << code << ")\n";
            return code;
        }
        const RunStatus st = run_one(opt, doc, out_dir);
        if (st.code != kOk) {
            std::cerr << st.message << '\n';
        }
        if (st.code == kOk || st.code == kThreshold) {
            std::cout << opt.command << ": results written to " << out_dir.string() << '\n';
        }
        return st.code;
    } catch (const lyo::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
