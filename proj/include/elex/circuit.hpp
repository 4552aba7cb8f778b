#pragma once

// Node-element graph and its decomposition into maximal series branches.
// The branch is the unit the topology-dependent equation rules operate on:
// a chain of two-terminal elements whose interior nodes have degree exactly
// two, terminated by junction nodes (degree >= 3, ground, or an endpoint of
// a voltage source).

#include "elex/netlist.hpp"
#include "elex/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace elex {

struct GraphNode {
    std::string name;
    bool is_ground = false;
    bool touches_source = false;
    std::vector<std::pair<Index, int>> incident;  // (element, +1 at p / -1 at n)

    [[nodiscard]] int degree() const { return static_cast<int>(incident.size()); }
};

struct GraphElement {
    std::string name;
    ElementKind kind = ElementKind::Resistor;
    Index p = -1;
    Index n = -1;
    Real value = 0;
    Real v_on = 0;
    Real ic = 0;
    const GateSchedule* gate = nullptr;  // switches only
    Index branch = -1;                   // filled by decompose_branches
    int sw_ordinal = -1;                 // position among switches+diodes
    int state_slot = -1;                 // position among capacitors resp. inductors
};

class CircuitGraph {
  public:
    /// Build from a validated doc; indices follow netlist order.
    static CircuitGraph build(const NetlistDoc& doc);

    std::vector<GraphNode> nodes;
    std::vector<GraphElement> elements;
    Index ground = -1;
    std::vector<Index> switch_elements;     // switches + diodes, element order
    std::vector<Index> capacitor_elements;  // element order
    std::vector<Index> inductor_elements;   // element order

    [[nodiscard]] Index node_index(const std::string& name) const;
    [[nodiscard]] const GraphElement* find_element(const std::string& name) const;
    [[nodiscard]] Index other_node(Index elem, Index node) const;
};

/// On/off assignment for every switch and diode, ordered by element index.
/// The key under which assembled systems and their factorizations are cached.
class SwitchConfig {
  public:
    SwitchConfig() = default;
    explicit SwitchConfig(int count) : count_(count) {}

    [[nodiscard]] int size() const { return count_; }
    [[nodiscard]] bool on(int i) const { return (bits_ >> i) & 1u; }
    void set(int i, bool on) {
        if (on)
            bits_ |= (std::uint64_t{1} << i);
        else
            bits_ &= ~(std::uint64_t{1} << i);
    }
    [[nodiscard]] std::uint64_t key() const { return bits_; }

    /// "10..." in switch-ordinal order, '1' = on.
    [[nodiscard]] std::string to_string() const {
        std::string s(static_cast<std::size_t>(count_), '0');
        for (int i = 0; i < count_; ++i)
            if (on(i)) s[static_cast<std::size_t>(i)] = '1';
        return s;
    }

    friend bool operator==(const SwitchConfig& a, const SwitchConfig& b) {
        return a.count_ == b.count_ && a.bits_ == b.bits_;
    }

  private:
    std::uint64_t bits_ = 0;
    int count_ = 0;
};

struct Branch {
    Index id = -1;
    std::vector<Index> elements;  // chain order, head to tail
    std::vector<int> elem_sign;   // +1 when the element's p->n follows head->tail
    Index head = -1;
    Index tail = -1;
    std::vector<Index> interior_nodes;
    int inductor_count = 0;
    int switch_count = 0;  // switches + diodes
    bool has_other = false;  // any non-switch, non-inductor element
    bool is_switch_only = false;
    bool is_source_only = false;

    [[nodiscard]] int sign_of(Index elem) const;
};

enum class BranchState { On, Off, NoSwitch };

/// Maximal series chains between junction nodes; partitions the element set.
/// Throws AssemblyError when the graph is disconnected (names the stranded
/// nodes).
[[nodiscard]] std::vector<Branch> decompose_branches(CircuitGraph& g);

/// ON: has switches and all of them on. OFF: at least one off switch.
[[nodiscard]] std::vector<BranchState> classify_branches(const CircuitGraph& g,
                                                         const std::vector<Branch>& branches,
                                                         const SwitchConfig& cfg);

/// True iff the branch lies on a closed loop whose every element conducts
/// (off switches removed; everything else, capacitors included, conducts).
[[nodiscard]] bool conduction_path_exists(const CircuitGraph& g,
                                          const std::vector<Branch>& branches,
                                          const SwitchConfig& cfg, Index branch_id);

/// Groups (size >= 2) of switch-only ON branches sharing both terminal nodes.
[[nodiscard]] std::vector<std::vector<Index>> parallel_on_groups(
    const CircuitGraph& g, const std::vector<Branch>& branches,
    const std::vector<BranchState>& status);

/// Line-oriented dump of branches, statuses and parallel groups.
[[nodiscard]] std::string dump_topology(const CircuitGraph& g,
                                        const std::vector<Branch>& branches,
                                        const SwitchConfig& cfg);

}  // namespace elex
