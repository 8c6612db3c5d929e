#include "bhsim.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include "bhsim/engine.hpp"
#include "bhsim/metrics.hpp"
#include "bhsim/scenario.hpp"
#include "bhsim/schedule_log.hpp"
#include "bhsim/topology.hpp"
#include "bhsim/types.hpp"

struct bhsim_sim {
    bhsim::Scenario scenario;
    bhsim::Engine engine;

    explicit bhsim_sim(bhsim::Scenario s)
        : scenario(std::move(s)), engine(scenario.topology, scenario.engine) {}
};

namespace {

thread_local std::string t_last_error;

bhsim_status fail(bhsim_status code, const std::string& msg) {
    t_last_error = msg;
    return code;
}

bhsim_status from_exception(const std::exception& ex) {
    if (dynamic_cast<const bhsim::ConfigError*>(&ex) != nullptr ||
        dynamic_cast<const bhsim::TopologyError*>(&ex) != nullptr)
        return fail(BHSIM_ERR_CONFIG, ex.what());
    return fail(BHSIM_ERR_RUNTIME, ex.what());
}

bhsim_status give_string(const std::string& value, char** out) {
    char* copy = static_cast<char*>(std::malloc(value.size() + 1));
    if (!copy) return fail(BHSIM_ERR_RUNTIME, "out of memory");
    std::memcpy(copy, value.c_str(), value.size() + 1);
    *out = copy;
    return BHSIM_OK;
}

template <typename Load>
bhsim_status create_sim(Load load, bhsim_sim** out) {
    if (!out) return fail(BHSIM_ERR_ARGUMENT, "null output handle");
    *out = nullptr;
    try {
        *out = new bhsim_sim(load());
        return BHSIM_OK;
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

} // namespace

extern "C" {

const char* bhsim_version(void) { return "1.0.0"; }

const char* bhsim_last_error(void) { return t_last_error.c_str(); }

bhsim_status bhsim_sim_create(const char* config_json, bhsim_sim** out) {
    if (!config_json) return fail(BHSIM_ERR_ARGUMENT, "null config text");
    return create_sim(
        [&] { return bhsim::load_scenario(config_json); }, out);
}

bhsim_status bhsim_sim_create_from_file(const char* path, bhsim_sim** out) {
    if (!path) return fail(BHSIM_ERR_ARGUMENT, "null config path");
    return create_sim(
        [&] { return bhsim::load_scenario_file(path); }, out);
}

void bhsim_sim_destroy(bhsim_sim* sim) { delete sim; }

bhsim_status bhsim_sim_run(bhsim_sim* sim) {
    if (!sim) return fail(BHSIM_ERR_ARGUMENT, "null simulation handle");
    try {
        sim->engine.run();
        return BHSIM_OK;
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

bhsim_status bhsim_sim_step(bhsim_sim* sim, long subframes) {
    if (!sim) return fail(BHSIM_ERR_ARGUMENT, "null simulation handle");
    if (subframes < 1) return fail(BHSIM_ERR_ARGUMENT, "step count must be >= 1");
    try {
        const long remaining =
            sim->scenario.engine.num_subframes - sim->engine.subframes_done();
        for (long i = 0; i < subframes && i < remaining; ++i) sim->engine.step();
        return BHSIM_OK;
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

long bhsim_sim_subframes_done(const bhsim_sim* sim) {
    return sim ? sim->engine.subframes_done() : 0;
}

int bhsim_sim_tree_height(const bhsim_sim* sim) {
    return sim ? sim->engine.tree_height() : 0;
}

bhsim_status bhsim_sim_delivered_bits(const bhsim_sim* sim, long long* dl,
                                      long long* ul) {
    if (!sim || !dl || !ul)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    long long dl_total = 0, ul_total = 0;
    for (const bhsim::MetricsRecord& rec : sim->engine.records()) {
        for (std::int64_t b : rec.dl_bits) dl_total += b;
        for (std::int64_t b : rec.ul_bits) ul_total += b;
    }
    *dl = dl_total;
    *ul = ul_total;
    return BHSIM_OK;
}

bhsim_status bhsim_sim_throughput_gbps(const bhsim_sim* sim, double* dl,
                                       double* ul) {
    if (!sim || !dl || !ul)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    const long done = sim->engine.subframes_done();
    if (done < 1) return fail(BHSIM_ERR_ARGUMENT, "no subframes have run yet");
    long long dl_bits = 0, ul_bits = 0;
    bhsim_sim_delivered_bits(sim, &dl_bits, &ul_bits);
    const double seconds =
        static_cast<double>(done) * sim->scenario.engine.clock.subframe_duration;
    *dl = static_cast<double>(dl_bits) / seconds / 1e9;
    *ul = static_cast<double>(ul_bits) / seconds / 1e9;
    return BHSIM_OK;
}

bhsim_status bhsim_sim_metrics_csv(const bhsim_sim* sim, char** out) {
    if (!sim || !out)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    try {
        return give_string(bhsim::metrics_to_csv(sim->engine.records()), out);
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

bhsim_status bhsim_sim_queue_csv(const bhsim_sim* sim, char** out) {
    if (!sim || !out)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    try {
        return give_string(bhsim::queue_snapshot_csv(sim->engine), out);
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

bhsim_status bhsim_sim_manifest(const bhsim_sim* sim, char** out) {
    if (!sim || !out)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    try {
        return give_string(bhsim::scenario_manifest(sim->scenario), out);
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

bhsim_status bhsim_sim_schedule_log(const bhsim_sim* sim, char** out) {
    if (!sim || !out)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    if (!sim->scenario.engine.keep_schedule_log)
        return fail(BHSIM_ERR_ARGUMENT,
                    "the scenario did not enable the schedule log");
    try {
        return give_string(
            bhsim::write_schedule_log(sim->engine.topology(),
                                      sim->scenario.engine.clock.data_slots(),
                                      sim->engine.schedule_log()),
            out);
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

bhsim_status bhsim_sim_output_hint(const bhsim_sim* sim, char** out) {
    if (!sim || !out)
        return fail(BHSIM_ERR_ARGUMENT, "null handle or output pointer");
    return give_string(sim->scenario.output, out);
}

void bhsim_free_string(char* s) { std::free(s); }

bhsim_status bhsim_validate_log(const char* log_text, char** report,
                                long* violations, long* report_count,
                                long* schedule_count) {
    if (!log_text || !report || !violations)
        return fail(BHSIM_ERR_ARGUMENT, "null input or output pointer");
    try {
        std::size_t reports = 0, schedules = 0;
        const std::vector<std::string> found =
            bhsim::validate_schedule_log(log_text, &reports, &schedules);
        std::string joined;
        for (const std::string& v : found) {
            joined += v;
            joined += '\n';
        }
        *violations = static_cast<long>(found.size());
        if (report_count) *report_count = static_cast<long>(reports);
        if (schedule_count) *schedule_count = static_cast<long>(schedules);
        return give_string(joined, report);
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

bhsim_status bhsim_generate_topology(int num_nodes, int max_children,
                                     double interference_pair_fraction,
                                     double multihop_fraction,
                                     unsigned long long seed,
                                     long long rate_per_slot, char** out) {
    if (!out) return fail(BHSIM_ERR_ARGUMENT, "null output pointer");
    try {
        const bhsim::TreeTopology topo = bhsim::generate_tree(
            num_nodes, max_children, interference_pair_fraction,
            multihop_fraction, seed, rate_per_slot);
        return give_string(bhsim::serialize_topology(topo), out);
    } catch (const std::exception& ex) {
        return from_exception(ex);
    }
}

} // extern "C"
