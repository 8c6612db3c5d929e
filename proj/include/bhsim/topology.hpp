#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

// Parent link of a non-macro node. Link identity equals the child node id:
// L_i is the one link that ends at node i.
struct LogicalLink {
    NodeId child = 0;
    NodeId parent = 0;
    int alpha = 1;                    // slot expansion factor, 1 or 2
    std::int64_t rate_per_slot = 0;   // bits carried by one allocated slot
};

// Symmetric link-pair interference flags, indexed by link id (= child id).
// Row/column 0 is unused since the macro has no parent link.
class InterferenceMatrix {
public:
    InterferenceMatrix() = default;
    explicit InterferenceMatrix(int num_nodes)
        : n_(num_nodes), bits_(static_cast<size_t>(num_nodes) * num_nodes, 0) {}

    bool interferes(NodeId a, NodeId b) const {
        if (a == b) return false;
        return bits_[static_cast<size_t>(a) * n_ + b] != 0;
    }
    void set(NodeId a, NodeId b, bool v) {
        if (a == b) return;
        bits_[static_cast<size_t>(a) * n_ + b] = v ? 1 : 0;
        bits_[static_cast<size_t>(b) * n_ + a] = v ? 1 : 0;
    }
    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct TreeTopology {
    int num_nodes = 0;
    std::vector<NodeId> parent;              // parent[0] == -1
    std::vector<std::vector<NodeId>> children; // sorted ascending
    std::vector<LogicalLink> links;          // links[i] is the parent link of node i; links[0] unused
    InterferenceMatrix interference;
    std::vector<int> radio_chains;           // per node, >= 1
    std::vector<int> height;                 // leaves 1, macro == depth
    int depth = 0;                           // H

    // Euler intervals for O(1) subtree membership tests.
    std::vector<int> tin, tout;

    bool is_leaf(NodeId id) const { return children[id].empty(); }
    // True when `node` lies in the subtree rooted at `root` (inclusive).
    bool in_subtree(NodeId root, NodeId node) const {
        return tin[root] <= tin[node] && tout[node] <= tout[root];
    }
    int alpha_of(NodeId child) const { return links[child].alpha; }
};

// Builds a random tree. Node 0 is the macro; every other node attaches to a
// uniformly chosen earlier node that still has capacity. A multihop_fraction
// share of links gets alpha=2, and interference_pair_fraction of the link
// pairs sharing an endpoint BS are flagged as interfering. Deterministic for
// a fixed seed.
TreeTopology generate_tree(int num_nodes, int max_children,
                           double interference_pair_fraction,
                           double multihop_fraction, std::uint64_t seed,
                           std::int64_t rate_per_slot);

// Recomputes per-node heights (leaves 1, internal 1 + max child height).
std::vector<int> compute_heights(const TreeTopology& t);

// Checks every structural invariant; throws TopologyError with a description
// of the first violation found.
void validate_topology(const TreeTopology& t);

// Scenario presets from the evaluation setup. MI_ER clears all interference
// and raises radio counts so they never bind; LI_LR2 keeps interference and
// pins 2 radio chains at the macro, 1 at small cells.
enum class Preset { None, MiEr, LiLr2 };

void apply_preset(TreeTopology& t, Preset p);

Preset preset_from_string(const std::string& s);
std::string preset_to_string(Preset p);

// Plain-text serialization: one "node" record per node and one "pair" record
// per interfering link pair. parse(serialize(t)) reproduces t exactly.
std::string serialize_topology(const TreeTopology& t);
TreeTopology parse_topology(const std::string& text);

} // namespace bhsim
