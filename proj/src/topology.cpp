#include "bhsim/topology.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace bhsim {

namespace {

// Fills children lists, heights, depth and Euler intervals from parent[].
void finalize(TreeTopology& t) {
    // Heights first: computing them rejects bad parent links and cycles
    // before anything below indexes through parent[].
    t.height = compute_heights(t);
    t.depth = t.height[kMacroId];

    t.children.assign(t.num_nodes, {});
    for (NodeId i = 1; i < t.num_nodes; ++i) t.children[t.parent[i]].push_back(i);
    for (auto& c : t.children) std::sort(c.begin(), c.end());

    t.tin.assign(t.num_nodes, 0);
    t.tout.assign(t.num_nodes, 0);
    int timer = 0;
    // Iterative DFS from the macro in child-id order.
    std::vector<std::pair<NodeId, size_t>> stack{{kMacroId, 0}};
    t.tin[kMacroId] = timer++;
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < t.children[node].size()) {
            NodeId c = t.children[node][idx++];
            t.tin[c] = timer++;
            stack.emplace_back(c, 0);
        } else {
            t.tout[node] = timer;
            stack.pop_back();
        }
    }
}

std::uint64_t next_rand(std::uint64_t& state) {
    // splitmix64; stable across platforms and standard libraries.
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t rand_below(std::uint64_t& state, std::uint64_t n) {
    return next_rand(state) % n;
}

double rand_unit(std::uint64_t& state) {
    return static_cast<double>(next_rand(state) >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<int> compute_heights(const TreeTopology& t) {
    // Process nodes deepest-first; parent[] indices always point to earlier
    // nodes only in generated trees, so use an explicit order by repeated
    // relaxation to stay safe for parsed inputs.
    std::vector<int> h(t.num_nodes, 1);
    std::vector<std::vector<NodeId>> kids(t.num_nodes);
    for (NodeId i = 1; i < t.num_nodes; ++i) {
        if (t.parent[i] < 0 || t.parent[i] >= t.num_nodes)
            throw TopologyError("node " + std::to_string(i) + " has invalid parent");
        kids[t.parent[i]].push_back(i);
    }
    // Topological pass from leaves upward.
    std::vector<int> pending(t.num_nodes, 0);
    for (NodeId i = 0; i < t.num_nodes; ++i) pending[i] = static_cast<int>(kids[i].size());
    std::vector<NodeId> ready;
    for (NodeId i = 0; i < t.num_nodes; ++i)
        if (pending[i] == 0) ready.push_back(i);
    int visited = 0;
    while (!ready.empty()) {
        NodeId n = ready.back();
        ready.pop_back();
        ++visited;
        if (n == kMacroId) continue;
        NodeId p = t.parent[n];
        h[p] = std::max(h[p], h[n] + 1);
        if (--pending[p] == 0) ready.push_back(p);
    }
    if (visited != t.num_nodes)
        throw TopologyError("parent links contain a cycle");
    return h;
}

void validate_topology(const TreeTopology& t) {
    if (t.num_nodes < 2) throw TopologyError("fewer than 2 nodes");
    if (t.parent.size() != static_cast<size_t>(t.num_nodes) ||
        t.radio_chains.size() != static_cast<size_t>(t.num_nodes) ||
        t.links.size() != static_cast<size_t>(t.num_nodes))
        throw TopologyError("field sizes disagree with num_nodes");
    if (t.parent[kMacroId] != -1) throw TopologyError("macro must have parent -1");
    for (NodeId i = 1; i < t.num_nodes; ++i) {
        if (t.parent[i] < 0 || t.parent[i] >= t.num_nodes || t.parent[i] == i)
            throw TopologyError("node " + std::to_string(i) + " has invalid parent");
        const LogicalLink& l = t.links[i];
        if (l.child != i || l.parent != t.parent[i])
            throw TopologyError("link record of node " + std::to_string(i) + " is inconsistent");
        if (l.alpha != 1 && l.alpha != 2)
            throw TopologyError("link alpha of node " + std::to_string(i) + " must be 1 or 2");
        if (l.rate_per_slot <= 0)
            throw TopologyError("link rate of node " + std::to_string(i) + " must be positive");
    }
    for (NodeId i = 0; i < t.num_nodes; ++i)
        if (t.radio_chains[i] < 1)
            throw TopologyError("radio chains of node " + std::to_string(i) + " must be >= 1");

    // Reachability doubles as the acyclicity check (cycle would strand nodes).
    std::vector<int> h = compute_heights(t);
    if (h != t.height) throw TopologyError("stored heights are stale");
    if (t.depth != h[kMacroId]) throw TopologyError("stored depth is stale");
    for (NodeId i = 1; i < t.num_nodes; ++i)
        if (t.height[t.parent[i]] < t.height[i] + 1)
            throw TopologyError("height invariant violated at node " + std::to_string(i));

    if (t.interference.size() != t.num_nodes)
        throw TopologyError("interference matrix size mismatch");
    for (NodeId a = 0; a < t.num_nodes; ++a) {
        if (t.interference.interferes(a, a))
            throw TopologyError("interference diagonal must be zero");
        for (NodeId b = 0; b < t.num_nodes; ++b)
            if (t.interference.interferes(a, b) != t.interference.interferes(b, a))
                throw TopologyError("interference matrix must be symmetric");
    }
}

TreeTopology generate_tree(int num_nodes, int max_children,
                           double interference_pair_fraction,
                           double multihop_fraction, std::uint64_t seed,
                           std::int64_t rate_per_slot) {
    if (num_nodes < 2) throw ConfigError("generate_tree: num_nodes must be >= 2");
    if (max_children < 1) throw ConfigError("generate_tree: max_children must be >= 1");
    if (rate_per_slot <= 0) throw ConfigError("generate_tree: rate_per_slot must be positive");

    std::uint64_t rng = seed * 0x2545f4914f6cdd1dull + 0x9e3779b97f4a7c15ull;

    TreeTopology t;
    t.num_nodes = num_nodes;
    t.parent.assign(num_nodes, -1);
    t.links.resize(num_nodes);
    t.radio_chains.assign(num_nodes, 1);
    t.interference = InterferenceMatrix(num_nodes);

    // Deployments keep relay chains short: every new BS hooks onto the
    // shallowest BS that still has link capacity, ties broken at random.
    std::vector<int> child_count(num_nodes, 0);
    std::vector<int> node_depth(num_nodes, 0);
    for (NodeId i = 1; i < num_nodes; ++i) {
        std::vector<NodeId> open;
        int best = num_nodes;
        for (NodeId j = 0; j < i; ++j) {
            if (child_count[j] >= max_children) continue;
            if (node_depth[j] < best) {
                best = node_depth[j];
                open.clear();
            }
            if (node_depth[j] == best) open.push_back(j);
        }
        NodeId p = open[rand_below(rng, open.size())];
        ++child_count[p];
        node_depth[i] = node_depth[p] + 1;
        t.parent[i] = p;
        LogicalLink& l = t.links[i];
        l.child = i;
        l.parent = p;
        l.alpha = rand_unit(rng) < multihop_fraction ? 2 : 1;
        l.rate_per_slot = rate_per_slot;
    }

    finalize(t);

    // Only link pairs touching a common BS are candidates: sibling links under
    // one parent, and a node's parent link against each of its child links.
    for (NodeId n = 0; n < num_nodes; ++n) {
        const auto& kids = t.children[n];
        for (size_t a = 0; a < kids.size(); ++a) {
            for (size_t b = a + 1; b < kids.size(); ++b)
                if (rand_unit(rng) < interference_pair_fraction)
                    t.interference.set(kids[a], kids[b], true);
            if (n != kMacroId && rand_unit(rng) < interference_pair_fraction)
                t.interference.set(n, kids[a], true);
        }
    }

    // Default radio counts are generous enough never to bind; presets override.
    for (NodeId n = 0; n < num_nodes; ++n)
        t.radio_chains[n] = static_cast<int>(t.children[n].size()) + 1;

    validate_topology(t);
    return t;
}

void apply_preset(TreeTopology& t, Preset p) {
    switch (p) {
    case Preset::None:
        return;
    case Preset::MiEr:
        t.interference = InterferenceMatrix(t.num_nodes);
        for (NodeId n = 0; n < t.num_nodes; ++n)
            t.radio_chains[n] = static_cast<int>(t.children[n].size()) + 1;
        return;
    case Preset::LiLr2:
        t.radio_chains[kMacroId] = 2;
        for (NodeId n = 1; n < t.num_nodes; ++n) t.radio_chains[n] = 1;
        return;
    }
}

Preset preset_from_string(const std::string& s) {
    if (s == "none") return Preset::None;
    if (s == "MI-ER") return Preset::MiEr;
    if (s == "LI-LR2") return Preset::LiLr2;
    throw ConfigError("preset: unknown value '" + s + "' (expected none, MI-ER or LI-LR2)");
}

std::string preset_to_string(Preset p) {
    switch (p) {
    case Preset::MiEr: return "MI-ER";
    case Preset::LiLr2: return "LI-LR2";
    default: return "none";
    }
}

std::string serialize_topology(const TreeTopology& t) {
    std::ostringstream out;
    out << "nodes " << t.num_nodes << "\n";
    for (NodeId i = 0; i < t.num_nodes; ++i) {
        // id, parent (-1 for macro), alpha (0 for macro), radio chains, rate.
        int alpha = i == kMacroId ? 0 : t.links[i].alpha;
        std::int64_t rate = i == kMacroId ? 0 : t.links[i].rate_per_slot;
        out << "node " << i << ' ' << t.parent[i] << ' ' << alpha << ' '
            << t.radio_chains[i] << ' ' << rate << "\n";
    }
    for (NodeId a = 1; a < t.num_nodes; ++a)
        for (NodeId b = a + 1; b < t.num_nodes; ++b)
            if (t.interference.interferes(a, b))
                out << "pair " << a << ' ' << b << "\n";
    return out.str();
}

TreeTopology parse_topology(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    if (!(in >> tok) || tok != "nodes")
        throw TopologyError("topology text must start with a 'nodes' record");
    int n = 0;
    if (!(in >> n) || n < 2) throw TopologyError("invalid node count");

    TreeTopology t;
    t.num_nodes = n;
    t.parent.assign(n, -2);
    t.links.resize(n);
    t.radio_chains.assign(n, 0);
    t.interference = InterferenceMatrix(n);

    std::vector<std::pair<NodeId, NodeId>> pairs;
    while (in >> tok) {
        if (tok == "node") {
            NodeId id;
            int parent, alpha, radios;
            std::int64_t rate;
            if (!(in >> id >> parent >> alpha >> radios >> rate))
                throw TopologyError("malformed node record");
            if (id < 0 || id >= n) throw TopologyError("node id out of range");
            if (t.parent[id] != -2) throw TopologyError("duplicate node record " + std::to_string(id));
            t.parent[id] = parent;
            t.radio_chains[id] = radios;
            if (id != kMacroId) {
                t.links[id] = LogicalLink{id, parent, alpha, rate};
            }
        } else if (tok == "pair") {
            NodeId a, b;
            if (!(in >> a >> b)) throw TopologyError("malformed pair record");
            if (a <= 0 || a >= n || b <= 0 || b >= n || a == b)
                throw TopologyError("pair record references invalid link");
            pairs.emplace_back(a, b);
        } else {
            throw TopologyError("unknown record '" + tok + "'");
        }
    }
    for (NodeId i = 0; i < n; ++i)
        if (t.parent[i] == -2) throw TopologyError("missing node record " + std::to_string(i));

    finalize(t);
    for (auto [a, b] : pairs) t.interference.set(a, b, true);
    validate_topology(t);
    return t;
}

} // namespace bhsim
