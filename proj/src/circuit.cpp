#include "elex/circuit.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace elex {

CircuitGraph CircuitGraph::build(const NetlistDoc& doc) {
    CircuitGraph g;
    std::unordered_map<std::string, Index> node_of;
    auto intern = [&](const std::string& name) -> Index {
        auto it = node_of.find(name);
        if (it != node_of.end()) return it->second;
        const Index idx = static_cast<Index>(g.nodes.size());
        node_of.emplace(name, idx);
        GraphNode n;
        n.name = name;
        n.is_ground = (name == "0");
        g.nodes.push_back(std::move(n));
        if (name == "0") g.ground = idx;
        return idx;
    };

    for (const ElementDecl& decl : doc.elements) {
        GraphElement e;
        e.name = decl.name;
        e.kind = decl.kind;
        e.p = intern(decl.node_p);
        e.n = intern(decl.node_n);
        e.value = decl.value;
        e.v_on = decl.v_on;
        e.ic = decl.has_ic ? decl.ic : 0;
        e.gate = (decl.kind == ElementKind::Switch && decl.gate) ? &*decl.gate : nullptr;
        const Index idx = static_cast<Index>(g.elements.size());
        g.nodes[e.p].incident.emplace_back(idx, +1);
        g.nodes[e.n].incident.emplace_back(idx, -1);
        if (decl.kind == ElementKind::Vdc) {
            g.nodes[e.p].touches_source = true;
            g.nodes[e.n].touches_source = true;
        }
        if (is_switch_kind(decl.kind)) {
            e.sw_ordinal = static_cast<int>(g.switch_elements.size());
            g.switch_elements.push_back(idx);
        }
        if (decl.kind == ElementKind::Capacitor) {
            e.state_slot = static_cast<int>(g.capacitor_elements.size());
            g.capacitor_elements.push_back(idx);
        }
        if (decl.kind == ElementKind::Inductor) {
            e.state_slot = static_cast<int>(g.inductor_elements.size());
            g.inductor_elements.push_back(idx);
        }
        g.elements.push_back(std::move(e));
    }
    return g;
}

Index CircuitGraph::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name == name) return static_cast<Index>(i);
    }
    return -1;
}

const GraphElement* CircuitGraph::find_element(const std::string& name) const {
    for (const GraphElement& e : elements) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

Index CircuitGraph::other_node(Index elem, Index node) const {
    const GraphElement& e = elements[elem];
    return e.p == node ? e.n : e.p;
}

int Branch::sign_of(Index elem) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i] == elem) return elem_sign[i];
    }
    return 0;
}

namespace {

bool is_junction(const GraphNode& n) {
    return n.degree() != 2 || n.is_ground || n.touches_source;
}

}  // namespace

std::vector<Branch> decompose_branches(CircuitGraph& g) {
    // Connectivity first: every node reachable from node 0 of the graph.
    if (!g.nodes.empty()) {
        std::vector<bool> seen(g.nodes.size(), false);
        std::vector<Index> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const Index at = stack.back();
            stack.pop_back();
            for (const auto& [elem, pol] : g.nodes[at].incident) {
                (void)pol;
                const Index next = g.other_node(elem, at);
                if (!seen[next]) {
                    seen[next] = true;
                    stack.push_back(next);
                }
            }
        }
        std::string stranded;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            if (!seen[i]) stranded += (stranded.empty() ? "" : ", ") + g.nodes[i].name;
        }
        if (!stranded.empty()) {
            throw AssemblyError("disconnected circuit; stranded nodes: " + stranded);
        }
    }

    std::vector<Branch> branches;
    std::vector<bool> assigned(g.elements.size(), false);

    // Walk from `node` away from `from_elem` through degree-2 non-junction
    // nodes; appends (element, entry-node) pairs until a junction is reached.
    auto walk = [&](Index node, Index from_elem,
                    std::vector<std::pair<Index, Index>>& out) -> Index {
        Index at = node;
        Index prev = from_elem;
        while (!is_junction(g.nodes[at])) {
            const auto& inc = g.nodes[at].incident;
            // degree == 2 here: take the element that is not `prev`
            const Index next_elem = (inc[0].first == prev) ? inc[1].first : inc[0].first;
            out.emplace_back(next_elem, at);
            prev = next_elem;
            at = g.other_node(next_elem, at);
        }
        return at;
    };

    for (std::size_t seed = 0; seed < g.elements.size(); ++seed) {
        if (assigned[seed]) continue;
        const GraphElement& e = g.elements[seed];

        // Orient the chain so the seed element runs p -> n.
        std::vector<std::pair<Index, Index>> back;   // toward head, from e.p
        std::vector<std::pair<Index, Index>> front;  // toward tail, from e.n
        const Index head = walk(e.p, static_cast<Index>(seed), back);
        const Index tail = walk(e.n, static_cast<Index>(seed), front);

        Branch b;
        b.id = static_cast<Index>(branches.size());
        b.head = head;
        b.tail = tail;

        // back is ordered from e.p outward; reverse it and fix entry nodes.
        for (auto it = back.rbegin(); it != back.rend(); ++it) {
            const auto [elem, entry] = *it;
            // walking backward we entered through `entry` == node closer to e;
            // traversing head->tail the element is crossed toward `entry`.
            const Index far_node = g.other_node(elem, entry);
            b.elements.push_back(elem);
            b.elem_sign.push_back(g.elements[elem].p == far_node ? +1 : -1);
            b.interior_nodes.push_back(entry);
        }
        b.elements.push_back(static_cast<Index>(seed));
        b.elem_sign.push_back(+1);
        for (const auto& [elem, entry] : front) {
            b.interior_nodes.push_back(entry);
            b.elements.push_back(elem);
            b.elem_sign.push_back(g.elements[elem].p == entry ? +1 : -1);
        }

        for (const Index elem : b.elements) {
            assigned[elem] = true;
            g.elements[elem].branch = b.id;
            const GraphElement& ge = g.elements[elem];
            if (ge.kind == ElementKind::Inductor) ++b.inductor_count;
            if (is_switch_kind(ge.kind)) ++b.switch_count;
            if (ge.kind != ElementKind::Inductor && !is_switch_kind(ge.kind)) b.has_other = true;
        }
        b.is_switch_only = b.switch_count > 0 && !b.has_other && b.inductor_count == 0;
        b.is_source_only =
            b.elements.size() == 1 && g.elements[b.elements[0]].kind == ElementKind::Vdc;
        branches.push_back(std::move(b));
    }
    return branches;
}

std::vector<BranchState> classify_branches(const CircuitGraph& g,
                                           const std::vector<Branch>& branches,
                                           const SwitchConfig& cfg) {
    std::vector<BranchState> status(branches.size(), BranchState::NoSwitch);
    for (const Branch& b : branches) {
        if (b.switch_count == 0) continue;
        bool all_on = true;
        for (const Index elem : b.elements) {
            const GraphElement& e = g.elements[elem];
            if (is_switch_kind(e.kind) && !cfg.on(e.sw_ordinal)) {
                all_on = false;
                break;
            }
        }
        status[b.id] = all_on ? BranchState::On : BranchState::Off;
    }
    return status;
}

bool conduction_path_exists(const CircuitGraph& g, const std::vector<Branch>& branches,
                            const SwitchConfig& cfg, Index branch_id) {
    const Branch& b = branches[branch_id];
    auto conducts = [&](const GraphElement& e) {
        return !is_switch_kind(e.kind) || cfg.on(e.sw_ordinal);
    };
    for (const Index elem : b.elements) {
        if (!conducts(g.elements[elem])) return false;
    }
    if (b.head == b.tail) return true;  // the branch is a loop by itself

    // Reachability tail -> head through conducting elements outside the branch.
    std::vector<bool> in_branch(g.elements.size(), false);
    for (const Index elem : b.elements) in_branch[elem] = true;
    std::vector<bool> seen(g.nodes.size(), false);
    std::vector<Index> stack{b.tail};
    seen[b.tail] = true;
    while (!stack.empty()) {
        const Index at = stack.back();
        stack.pop_back();
        if (at == b.head) return true;
        for (const auto& [elem, pol] : g.nodes[at].incident) {
            (void)pol;
            if (in_branch[elem] || !conducts(g.elements[elem])) continue;
            const Index next = g.other_node(elem, at);
            if (!seen[next]) {
                seen[next] = true;
                stack.push_back(next);
            }
        }
    }
    return false;
}

std::vector<std::vector<Index>> parallel_on_groups(const CircuitGraph& g,
                                                   const std::vector<Branch>& branches,
                                                   const std::vector<BranchState>& status) {
    (void)g;
    std::map<std::pair<Index, Index>, std::vector<Index>> by_terminals;
    for (const Branch& b : branches) {
        if (!b.is_switch_only || status[b.id] != BranchState::On) continue;
        const auto key = std::minmax(b.head, b.tail);
        by_terminals[{key.first, key.second}].push_back(b.id);
    }
    std::vector<std::vector<Index>> groups;
    for (auto& [key, ids] : by_terminals) {
        (void)key;
        if (ids.size() >= 2) groups.push_back(std::move(ids));
    }
    return groups;
}

std::string dump_topology(const CircuitGraph& g, const std::vector<Branch>& branches,
                          const SwitchConfig& cfg) {
    const std::vector<BranchState> status = classify_branches(g, branches, cfg);
    std::ostringstream os;
    int current = 0;
    for (const Branch& b : branches) {
        os << "branch " << b.id << ": " << g.nodes[b.head].name << " -> "
           << g.nodes[b.tail].name << " [";
        for (std::size_t i = 0; i < b.elements.size(); ++i) {
            if (i) os << ' ';
            if (b.elem_sign[i] < 0) os << '~';
            os << g.elements[b.elements[i]].name;
        }
        os << "]";
        if (b.is_source_only) {
            os << " source";
        } else {
            os << " current=i_" << ++current;
        }
        if (b.inductor_count > 0) os << " inductors=" << b.inductor_count;
        if (b.switch_count > 0) {
            os << " switches=" << b.switch_count
               << " status=" << (status[b.id] == BranchState::On ? "ON" : "OFF");
        }
        if (b.is_switch_only) os << " switch-only";
        os << "\n";
    }
    const auto groups = parallel_on_groups(g, branches, status);
    for (const auto& grp : groups) {
        os << "parallel-on group:";
        for (const Index id : grp) os << " " << id;
        os << "\n";
    }
    if (groups.empty()) os << "parallel-on groups: none\n";
    return os.str();
}

}  // namespace elex
