#pragma once

#include <cstdint>
#include <string>

#include "bhsim/engine.hpp"
#include "bhsim/topology.hpp"

namespace bhsim {

// A fully resolved experiment: topology with preset and per-node radio
// overrides already applied, every engine parameter explicit.
struct Scenario {
    std::string name;
    TreeTopology topology;
    EngineConfig engine;
    std::int64_t rate_per_slot = 0;  // uniform link rate, bits per slot
    std::string output;              // artifact directory; empty lets the CLI pick
};

// Parses and validates a scenario from JSON text. Throws ConfigError with a
// message that names the offending field.
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Canonical JSON echo of a resolved scenario: the topology is inlined with
// preset and overrides baked in, demand is spelled out in integer bits per
// subframe for every small cell, and the link rate is integer bits per slot.
// Feeding the result back through load_scenario reproduces the run exactly.
std::string scenario_manifest(const Scenario& s);

// Queue occupancy per BS after a run, one CSV row per node:
// node,dl_packets,ul_packets.
std::string queue_snapshot_csv(const Engine& engine);

} // namespace bhsim
