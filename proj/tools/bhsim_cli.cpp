#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bhsim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(bhsim_status status) {
    return status == BHSIM_ERR_CONFIG ? kExitConfig : kExitRuntime;
}

int report_failure(const char* what, bhsim_status status) {
    std::cerr << what << ": " << bhsim_last_error() << "\n";
    return exit_code_for(status);
}

struct SimHandle {
    bhsim_sim* sim = nullptr;
    ~SimHandle() { bhsim_sim_destroy(sim); }
};

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { bhsim_free_string(value); }
    std::string str() const { return value ? value : ""; }
};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return static_cast<bool>(out);
}

// Applies command-line overrides on top of the config text. Leaves the text
// untouched when it is not valid JSON so the library reports the parse error.
std::string apply_overrides(const std::string& text, const long* seed,
                            bool schedule_log) {
    if (!seed && !schedule_log) return text;
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) return text;
    if (seed) root["seed"] = *seed;
    if (schedule_log) root["schedule_log"] = true;
    return root.dump();
}

int run_one(const std::string& config_text, const std::string& output_flag) {
    SimHandle handle;
    bhsim_status status = bhsim_sim_create(config_text.c_str(), &handle.sim);
    if (status != BHSIM_OK) return report_failure("config error", status);

    status = bhsim_sim_run(handle.sim);
    if (status != BHSIM_OK) return report_failure("run failed", status);

    std::string outdir = output_flag;
    if (outdir.empty()) {
        OwnedString hint;
        bhsim_sim_output_hint(handle.sim, &hint.value);
        outdir = hint.str();
    }
    if (outdir.empty()) outdir = "out";

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) {
        std::cerr << "cannot create output directory '" << outdir
                  << "': " << ec.message() << "\n";
        return kExitRuntime;
    }

    struct Artifact {
        const char* file;
        bhsim_status (*fetch)(const bhsim_sim*, char**);
        bool required;
    };
    const Artifact artifacts[] = {
        {"metrics.csv", bhsim_sim_metrics_csv, true},
        {"queues.csv", bhsim_sim_queue_csv, true},
        {"manifest.json", bhsim_sim_manifest, true},
        {"schedule_log.txt", bhsim_sim_schedule_log, false},
    };
    for (const Artifact& a : artifacts) {
        OwnedString content;
        status = a.fetch(handle.sim, &content.value);
        if (status != BHSIM_OK) {
            if (!a.required) continue;
            return report_failure(a.file, status);
        }
        if (!write_file(fs::path(outdir) / a.file, content.str())) {
            std::cerr << "cannot write " << (fs::path(outdir) / a.file).string()
                      << "\n";
            return kExitRuntime;
        }
    }

    double dl = 0.0, ul = 0.0;
    bhsim_sim_throughput_gbps(handle.sim, &dl, &ul);
    std::cout << "ran " << bhsim_sim_subframes_done(handle.sim)
              << " subframes (tree height "
              << bhsim_sim_tree_height(handle.sim) << ")\n"
              << "aggregate throughput: " << dl << " Gbps down, " << ul
              << " Gbps up\n"
              << "artifacts in " << outdir << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& output_flag,
            const long* seed, bool schedule_log) {
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config error: cannot read '" << config_path << "'\n";
        return kExitConfig;
    }
    return run_one(apply_overrides(text, seed, schedule_log), output_flag);
}

int cmd_sweep(const std::string& config_path, const std::string& output_flag,
              const std::vector<double>& demands, long seeds,
              const std::vector<std::string>& presets) {
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config error: cannot read '" << config_path << "'\n";
        return kExitConfig;
    }
    json base = json::parse(text, nullptr, false);
    if (base.is_discarded() || !base.is_object()) {
        std::cerr << "config error: '" << config_path
                  << "' is not a JSON object\n";
        return kExitConfig;
    }

    std::string outdir = output_flag.empty() ? "sweep" : output_flag;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) {
        std::cerr << "cannot create output directory '" << outdir
                  << "': " << ec.message() << "\n";
        return kExitRuntime;
    }

    std::ostringstream summary;
    summary << "preset,demand_gbps,mean_dl_gbps,mean_ul_gbps,mean_total_gbps\n";

    for (const std::string& preset : presets) {
        for (double demand : demands) {
            double dl_sum = 0.0, ul_sum = 0.0;
            for (long seed = 1; seed <= seeds; ++seed) {
                json cfg = base;
                if (!cfg.contains("topology") || !cfg["topology"].is_object()) {
                    std::cerr << "config error: topology: required field is "
                                 "missing\n";
                    return kExitConfig;
                }
                cfg["topology"]["preset"] = preset;
                if (cfg["topology"].contains("generate"))
                    cfg["topology"]["generate"]["seed"] = seed;
                cfg["seed"] = seed;
                // The offered load splits 2:1 between downlink and uplink.
                cfg["demand"] = json{
                    {"default", json{{"dl_gbps", demand * 2.0 / 3.0},
                                     {"ul_gbps", demand / 3.0}}}};

                SimHandle handle;
                bhsim_status status =
                    bhsim_sim_create(cfg.dump().c_str(), &handle.sim);
                if (status != BHSIM_OK)
                    return report_failure("config error", status);
                status = bhsim_sim_run(handle.sim);
                if (status != BHSIM_OK)
                    return report_failure("run failed", status);

                double dl = 0.0, ul = 0.0;
                bhsim_sim_throughput_gbps(handle.sim, &dl, &ul);
                dl_sum += dl;
                ul_sum += ul;
            }
            const double n = static_cast<double>(seeds);
            summary << preset << ',' << demand << ',' << dl_sum / n << ','
                    << ul_sum / n << ',' << (dl_sum + ul_sum) / n << "\n";
        }
    }

    const fs::path summary_path = fs::path(outdir) / "summary.csv";
    if (!write_file(summary_path, summary.str())) {
        std::cerr << "cannot write " << summary_path.string() << "\n";
        return kExitRuntime;
    }
    std::cout << "wrote " << summary_path.string() << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& log_path) {
    std::string text;
    if (!read_file(log_path, text)) {
        std::cerr << "config error: cannot read '" << log_path << "'\n";
        return kExitConfig;
    }
    OwnedString report;
    long violations = 0, reports = 0, schedules = 0;
    bhsim_status status = bhsim_validate_log(text.c_str(), &report.value,
                                             &violations, &reports, &schedules);
    if (status != BHSIM_OK) return report_failure("validate failed", status);
    if (violations > 0) {
        std::cerr << report.str();
        std::cerr << violations << " violation(s) in " << log_path << "\n";
        return kExitRuntime;
    }
    if (schedules == 0)
        std::cout << "warning: the log carries no grants; nothing to check\n";
    std::cout << "no violations (" << reports << " reports, " << schedules
              << " grants)\n";
    return kExitOk;
}

int cmd_gen_topology(int nodes, int max_children, double interference,
                     double multihop, long seed, long long rate,
                     const std::string& out_path) {
    OwnedString text;
    bhsim_status status = bhsim_generate_topology(
        nodes, max_children, interference, multihop,
        static_cast<unsigned long long>(seed), rate, &text.value);
    if (status != BHSIM_OK) return report_failure("generation failed", status);
    if (out_path.empty()) {
        std::cout << text.str();
    } else if (!write_file(out_path, text.str())) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backhaul scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output;
    long seed = 0;
    bool schedule_log = false;

    CLI::App* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("--config", config_path, "Scenario JSON file")->required();
    run->add_option("--output", output, "Artifact directory");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed, "Override the scenario seed");
    run->add_flag("--schedule-log", schedule_log,
                  "Record and emit the full schedule log");

    std::vector<double> demands{0.67, 1.33, 2.0, 2.67, 3.33};
    long seeds = 50;
    std::vector<std::string> presets{"MI-ER", "LI-LR2"};
    CLI::App* sweep =
        app.add_subcommand("sweep", "Sweep offered load over seeds");
    sweep->add_option("--config", config_path, "Base scenario JSON file")
        ->required();
    sweep->add_option("--output", output, "Summary directory");
    sweep->add_option("--demands", demands,
                      "Per-BS offered loads in Gbps (DL+UL)");
    sweep->add_option("--seeds", seeds, "Seeds per load point")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--presets", presets, "Scenario presets to compare");

    std::string log_path;
    CLI::App* validate =
        app.add_subcommand("validate", "Check a schedule log for violations");
    validate->add_option("log", log_path, "Schedule log file")->required();

    int nodes = 0;
    int max_children = 4;
    double interference = 0.0;
    double multihop = 0.0;
    long gen_seed = 1;
    long long rate = 55416;
    std::string gen_out;
    CLI::App* gen =
        app.add_subcommand("gen-topology", "Emit a random tree topology");
    gen->add_option("--nodes", nodes, "Number of BSs including the macro")
        ->required();
    gen->add_option("--max-children", max_children, "Fan-out bound");
    gen->add_option("--interference", interference,
                    "Fraction of link pairs that interfere");
    gen->add_option("--multihop", multihop,
                    "Fraction of links with expansion factor 2");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--rate", rate, "Link rate in bits per slot");
    gen->add_option("--output", gen_out, "Write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(config_path, output, seed_opt->count() ? &seed : nullptr,
                       schedule_log);
    if (sweep->parsed())
        return cmd_sweep(config_path, output, demands, seeds, presets);
    if (validate->parsed()) return cmd_validate(log_path);
    return cmd_gen_topology(nodes, max_children, interference, multihop,
                            gen_seed, rate, gen_out);
}
