#include "bhsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "bhsim/traffic.hpp"
#include "bhsim/types.hpp"

namespace bhsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw ConfigError(field + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(join(path, it.key()), "unknown field");
    }
}

const json& require_object(const json& obj, const std::string& path,
                           const char* key) {
    const json* v = find(obj, key);
    if (!v) fail(join(path, key), "required field is missing");
    if (!v->is_object()) fail(join(path, key), "must be an object");
    return *v;
}

long get_integer(const json& obj, const std::string& path, const char* key,
                 std::optional<long> fallback, long min_value) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        fail(join(path, key), "required field is missing");
    }
    if (!v->is_number_integer())
        fail(join(path, key), "must be an integer");
    const long value = v->get<long>();
    if (value < min_value)
        fail(join(path, key), "must be at least " + std::to_string(min_value));
    return value;
}

double get_number(const json& obj, const std::string& path, const char* key,
                  std::optional<double> fallback, double min_value,
                  bool exclusive) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        fail(join(path, key), "required field is missing");
    }
    if (!v->is_number()) fail(join(path, key), "must be a number");
    const double value = v->get<double>();
    if (value < min_value || (exclusive && value == min_value))
        fail(join(path, key), std::string("must be ") +
                                  (exclusive ? "greater than " : "at least ") +
                                  std::to_string(min_value));
    return value;
}

bool get_bool(const json& obj, const std::string& path, const char* key,
              bool fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(join(path, key), "must be true or false");
    return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const char* key, const std::string& fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) fail(join(path, key), "must be a string");
    return v->get<std::string>();
}

// One direction of a demand entry: either <dir>_bits (bits per subframe) or
// <dir>_gbps, never both. Gbps values are scaled by the subframe duration and
// rounded to the nearest whole bit.
std::int64_t demand_bits(const json& obj, const std::string& path,
                         const char* bits_key, const char* gbps_key,
                         double subframe_duration) {
    const json* bits = find(obj, bits_key);
    const json* gbps = find(obj, gbps_key);
    if (bits && gbps)
        fail(join(path, gbps_key),
             std::string("give either ") + bits_key + " or " + gbps_key +
                 ", not both");
    if (bits) return get_integer(obj, path, bits_key, std::nullopt, 0);
    if (!gbps) return 0;
    const double rate = get_number(obj, path, gbps_key, std::nullopt, 0.0, false);
    return std::llround(rate * 1e9 * subframe_duration);
}

DemandSegment parse_segment(const json& obj, const std::string& path,
                            double subframe_duration,
                            std::optional<long> default_start) {
    if (!obj.is_object()) fail(path, "must be an object");
    check_keys(obj, path, {"start", "dl_bits", "dl_gbps", "ul_bits", "ul_gbps"});
    DemandSegment seg;
    seg.start_subframe = get_integer(obj, path, "start", default_start, 1);
    seg.dl_bits = demand_bits(obj, path, "dl_bits", "dl_gbps", subframe_duration);
    seg.ul_bits = demand_bits(obj, path, "ul_bits", "ul_gbps", subframe_duration);
    return seg;
}

DemandProfile parse_profile(const json& obj, const std::string& path,
                            double subframe_duration) {
    if (!obj.is_object()) fail(path, "must be an object");
    DemandProfile profile;
    const json* segments = find(obj, "segments");
    if (segments) {
        check_keys(obj, path, {"segments"});
        if (!segments->is_array() || segments->empty())
            fail(join(path, "segments"), "must be a non-empty array");
        long index = 0;
        for (const json& seg : *segments) {
            const std::string seg_path =
                join(path, "segments[" + std::to_string(index++) + "]");
            profile.segments.push_back(
                parse_segment(seg, seg_path, subframe_duration, std::nullopt));
        }
    } else {
        profile.segments.push_back(parse_segment(obj, path, subframe_duration, 1));
    }
    try {
        validate_profile(profile);
    } catch (const std::exception& ex) {
        fail(path, ex.what());
    }
    return profile;
}

TreeTopology resolve_topology(const json& spec, std::int64_t explicit_rate,
                              std::int64_t default_rate,
                              std::int64_t* rate_out) {
    check_keys(spec, "topology",
               {"file", "text", "generate", "preset", "radio_chains"});
    const json* file = find(spec, "file");
    const json* text = find(spec, "text");
    const json* gen = find(spec, "generate");
    if ((file != nullptr) + (text != nullptr) + (gen != nullptr) != 1)
        fail("topology", "give exactly one of file, text or generate");

    TreeTopology topo;
    if (gen) {
        const std::string path = "topology.generate";
        check_keys(*gen, path,
                   {"num_nodes", "max_children", "interference_pair_fraction",
                    "multihop_fraction", "seed"});
        const long num_nodes = get_integer(*gen, path, "num_nodes", std::nullopt, 2);
        const long max_children = get_integer(*gen, path, "max_children", 4, 1);
        const double pair_fraction = get_number(
            *gen, path, "interference_pair_fraction", 0.0, 0.0, false);
        const double multihop = get_number(*gen, path, "multihop_fraction", 0.0,
                                           0.0, false);
        if (pair_fraction > 1.0)
            fail(join(path, "interference_pair_fraction"), "must be at most 1");
        if (multihop > 1.0)
            fail(join(path, "multihop_fraction"), "must be at most 1");
        const long seed = get_integer(*gen, path, "seed", 1, 0);
        const std::int64_t rate =
            explicit_rate > 0 ? explicit_rate : default_rate;
        try {
            topo = generate_tree(static_cast<int>(num_nodes),
                                 static_cast<int>(max_children), pair_fraction,
                                 multihop, static_cast<std::uint64_t>(seed),
                                 rate);
        } catch (const std::exception& ex) {
            fail(path, ex.what());
        }
        *rate_out = rate;
    } else {
        std::string topo_text;
        std::string source;
        if (file) {
            if (!file->is_string()) fail("topology.file", "must be a string");
            source = "topology.file";
            std::ifstream in(file->get<std::string>());
            if (!in) fail(source, "cannot read '" + file->get<std::string>() + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            topo_text = buf.str();
        } else {
            if (!text->is_string()) fail("topology.text", "must be a string");
            source = "topology.text";
            topo_text = text->get<std::string>();
        }
        try {
            topo = parse_topology(topo_text);
        } catch (const std::exception& ex) {
            fail(source, ex.what());
        }
        std::int64_t rate = topo.links[1].rate_per_slot;
        for (NodeId i = 1; i < topo.num_nodes; ++i)
            if (topo.links[i].rate_per_slot != rate)
                fail(source, "links must all carry the same rate per slot");
        if (explicit_rate > 0 && rate != explicit_rate)
            fail(source, "link rates (" + std::to_string(rate) +
                             " bits per slot) disagree with the configured "
                             "link rate (" +
                             std::to_string(explicit_rate) + ")");
        *rate_out = rate;
    }

    const json* preset = find(spec, "preset");
    if (preset) {
        if (!preset->is_string()) fail("topology.preset", "must be a string");
        try {
            apply_preset(topo, preset_from_string(preset->get<std::string>()));
        } catch (const std::exception& ex) {
            fail("topology.preset", ex.what());
        }
    }

    const json* radios = find(spec, "radio_chains");
    if (radios) {
        if (!radios->is_object())
            fail("topology.radio_chains", "must map node ids to chain counts");
        for (auto it = radios->begin(); it != radios->end(); ++it) {
            const std::string path = "topology.radio_chains." + it.key();
            NodeId id = -1;
            try {
                size_t used = 0;
                id = std::stoi(it.key(), &used);
                if (used != it.key().size()) id = -1;
            } catch (const std::exception&) {
                id = -1;
            }
            if (id < 0 || id >= topo.num_nodes) fail(path, "unknown node id");
            if (!it->is_number_integer() || it->get<long>() < 1)
                fail(path, "must be an integer of at least 1");
            topo.radio_chains[id] = static_cast<int>(it->get<long>());
        }
    }

    try {
        validate_topology(topo);
    } catch (const std::exception& ex) {
        fail("topology", ex.what());
    }
    return topo;
}

} // namespace

Scenario load_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        fail("config", std::string("invalid JSON: ") + ex.what());
    }
    if (!root.is_object()) fail("config", "top level must be an object");
    check_keys(root, "",
               {"name", "topology", "slots_per_subframe", "subframe_duration_s",
                "link_rate_gbps", "link_rate_bits_per_slot", "control_sub_slots",
                "demand", "filter", "demand_stat_window", "enhancement",
                "num_subframes", "arrivals", "seed", "schedule_log", "output"});

    Scenario s;
    s.name = get_string(root, "", "name", "");
    s.output = get_string(root, "", "output", "");

    s.engine.clock.slots_per_subframe =
        static_cast<int>(get_integer(root, "", "slots_per_subframe", 24, 3));
    s.engine.clock.control_slots = 2;
    s.engine.clock.subframe_duration =
        get_number(root, "", "subframe_duration_s", 1e-4, 0.0, true);

    const json* rate_bits = find(root, "link_rate_bits_per_slot");
    const json* rate_gbps = find(root, "link_rate_gbps");
    if (rate_bits && rate_gbps)
        fail("link_rate_gbps",
             "give either link_rate_bits_per_slot or link_rate_gbps, not both");
    std::int64_t explicit_rate = 0;
    if (rate_bits)
        explicit_rate = get_integer(root, "", "link_rate_bits_per_slot",
                                    std::nullopt, 1);
    else if (rate_gbps)
        explicit_rate = static_cast<std::int64_t>(
            std::floor(get_number(root, "", "link_rate_gbps", std::nullopt, 0.0,
                                  true) *
                       1e9 * s.engine.clock.subframe_duration /
                       s.engine.clock.slots_per_subframe));
    // Default physical rate: 13.3 Gbps spread over the subframe's slots.
    const std::int64_t default_rate = static_cast<std::int64_t>(
        std::floor(13.3 * 1e9 * s.engine.clock.subframe_duration /
                   s.engine.clock.slots_per_subframe));
    if (rate_gbps && explicit_rate < 1)
        fail("link_rate_gbps", "rate is below one bit per slot");

    s.topology = resolve_topology(require_object(root, "", "topology"),
                                  explicit_rate, default_rate, &s.rate_per_slot);
    s.engine.packet_bits = s.rate_per_slot;

    s.engine.n_sub =
        static_cast<int>(get_integer(root, "", "control_sub_slots", 8, 1));
    s.engine.num_subframes = get_integer(root, "", "num_subframes", 1000, 1);
    if (s.engine.num_subframes < s.topology.depth)
        fail("num_subframes",
             "must cover the pipeline fill; the tree height is " +
                 std::to_string(s.topology.depth));
    s.engine.enhancement = get_bool(root, "", "enhancement", true);
    s.engine.keep_schedule_log = get_bool(root, "", "schedule_log", false);
    s.engine.seed =
        static_cast<std::uint64_t>(get_integer(root, "", "seed", 1, 0));
    s.engine.demand_stat_window =
        static_cast<int>(get_integer(root, "", "demand_stat_window", 1, 1));

    const std::string arrivals = get_string(root, "", "arrivals", "deterministic");
    if (arrivals == "deterministic")
        s.engine.arrivals = ArrivalKind::Deterministic;
    else if (arrivals == "stochastic")
        s.engine.arrivals = ArrivalKind::Stochastic;
    else
        fail("arrivals", "must be 'deterministic' or 'stochastic'");

    const json* filter = find(root, "filter");
    if (filter) {
        if (!filter->is_object()) fail("filter", "must be an object");
        check_keys(*filter, "filter", {"window", "threshold"});
        s.engine.filter_window =
            static_cast<int>(get_integer(*filter, "filter", "window", 10, 1));
        s.engine.filter_threshold =
            get_number(*filter, "filter", "threshold", 0.5, 0.0, false);
    } else {
        s.engine.filter_window = 10;
        s.engine.filter_threshold = 0.5;
    }

    s.engine.profiles.assign(s.topology.num_nodes, DemandProfile{});
    const json* demand = find(root, "demand");
    if (demand) {
        if (!demand->is_object()) fail("demand", "must be an object");
        check_keys(*demand, "demand", {"default", "nodes"});
        const json* fallback = find(*demand, "default");
        if (fallback) {
            const DemandProfile profile = parse_profile(
                *fallback, "demand.default", s.engine.clock.subframe_duration);
            for (NodeId i = 1; i < s.topology.num_nodes; ++i)
                s.engine.profiles[i] = profile;
        }
        const json* nodes = find(*demand, "nodes");
        if (nodes) {
            if (!nodes->is_object())
                fail("demand.nodes", "must map node ids to profiles");
            for (auto it = nodes->begin(); it != nodes->end(); ++it) {
                const std::string path = "demand.nodes." + it.key();
                NodeId id = -1;
                try {
                    size_t used = 0;
                    id = std::stoi(it.key(), &used);
                    if (used != it.key().size()) id = -1;
                } catch (const std::exception&) {
                    id = -1;
                }
                if (id == kMacroId)
                    fail(path, "the macro has no access traffic of its own");
                if (id < 1 || id >= s.topology.num_nodes)
                    fail(path, "unknown node id");
                s.engine.profiles[id] = parse_profile(
                    *it, path, s.engine.clock.subframe_duration);
            }
        }
    }

    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("config", "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string scenario_manifest(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["topology"] = json{{"text", serialize_topology(s.topology)}};
    j["slots_per_subframe"] = s.engine.clock.slots_per_subframe;
    j["subframe_duration_s"] = s.engine.clock.subframe_duration;
    j["link_rate_bits_per_slot"] = s.rate_per_slot;
    j["control_sub_slots"] = s.engine.n_sub;
    j["num_subframes"] = s.engine.num_subframes;
    j["enhancement"] = s.engine.enhancement;
    j["arrivals"] = s.engine.arrivals == ArrivalKind::Stochastic
                        ? "stochastic"
                        : "deterministic";
    j["seed"] = s.engine.seed;
    j["filter"] = json{{"window", s.engine.filter_window},
                       {"threshold", s.engine.filter_threshold}};
    j["demand_stat_window"] = s.engine.demand_stat_window;
    j["schedule_log"] = s.engine.keep_schedule_log;
    j["output"] = s.output;

    json nodes = json::object();
    for (NodeId i = 1; i < s.topology.num_nodes; ++i) {
        json segs = json::array();
        const DemandProfile& p = s.engine.profiles[i];
        if (p.segments.empty()) {
            segs.push_back(json{{"start", 1}, {"dl_bits", 0}, {"ul_bits", 0}});
        } else {
            for (const DemandSegment& seg : p.segments)
                segs.push_back(json{{"start", seg.start_subframe},
                                    {"dl_bits", seg.dl_bits},
                                    {"ul_bits", seg.ul_bits}});
        }
        nodes[std::to_string(i)] = json{{"segments", segs}};
    }
    j["demand"] = json{{"nodes", nodes}};
    return j.dump(2) + "\n";
}

std::string queue_snapshot_csv(const Engine& engine) {
    std::ostringstream out;
    out << "node,dl_packets,ul_packets\n";
    for (NodeId i = 0; i < engine.topology().num_nodes; ++i) {
        const QueueState& q = engine.node(i).queues;
        out << i << ',' << q.dl_total() << ',' << q.ul_total() << '\n';
    }
    return out.str();
}

} // namespace bhsim
