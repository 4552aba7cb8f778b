#pragma once

// Assembly of the per-configuration algebraic system A*x = b.
//
// Rows come in three families:
//   ES    element stamps, independent of topology
//   CTDC  topology rows valid for every switch configuration
//         (KCL at junction nodes, branch-current ties)
//   CTDV  rows that depend on the active on/off configuration
//         (series-inductor derivative ties, derivative-sum nodes, open-path
//         i_Ld = 0 replacement, OFF/ON switch-branch voltage bookkeeping)
//
// The matrix depends only on the switch configuration; states and source
// values enter the right-hand side. Systems are therefore assembled once per
// configuration and the rhs is refreshed per solve through `RhsBinding`s.

#include "elex/circuit.hpp"
#include "elex/lu.hpp"
#include "elex/netlist.hpp"
#include "elex/types.hpp"

#include <string>
#include <vector>

namespace elex {

/// Known state entering a solve: one voltage per capacitor, one current per
/// inductor (element order).
struct StateVector {
    Vector cap_v;
    Vector ind_i;
};

/// Column layout of the unknown vector: node voltages (non-ground, node
/// order), branch currents (branch order, sources skipped), then i_L/i_Ld per
/// inductor and i_sw/V_sw per switch and diode.
struct VarCatalog {
    int size = 0;
    std::vector<int> node_var;    // per node index, -1 for ground
    std::vector<int> branch_var;  // per branch id, -1 for source-only branches
    std::vector<int> il_var;      // per element index, -1 unless inductor
    std::vector<int> ild_var;
    std::vector<int> isw_var;  // per element index, -1 unless switch/diode
    std::vector<int> vsw_var;
    std::vector<std::string> names;  // per column, for dumps

    static VarCatalog build(const CircuitGraph& g, const std::vector<Branch>& branches);
};

struct RhsBinding {
    enum class Kind { CapVoltage, IndCurrent };
    int row = 0;
    Kind kind = Kind::CapVoltage;
    int state_slot = 0;
};

struct AssembledSystem {
    Matrix A;
    Vector b0;                          // configuration-constant part of b
    std::vector<RhsBinding> bindings;   // state-dependent part of b
    std::vector<std::string> row_tags;  // provenance, one per row

    void fill_rhs(const StateVector& state, Vector& b) const {
        b = b0;
        for (const RhsBinding& bind : bindings) {
            b(bind.row) += (bind.kind == RhsBinding::Kind::CapVoltage)
                               ? state.cap_v(bind.state_slot)
                               : state.ind_i(bind.state_slot);
        }
    }
};

struct AssemblyOptions {
    /// Disable the topology-aware substitutions: keep the inductor tie even
    /// without a conduction path, write plain KCL at all-inductor nodes, and
    /// write all N switch KVLs in parallel ON groups. Reproduces the singular
    /// matrices the topology-aware rows exist to avoid.
    bool naive = false;
};

/// Build the square system for one switch configuration. Throws AssemblyError
/// on unsupported topology or a row/column count mismatch.
[[nodiscard]] AssembledSystem assemble_system(const CircuitGraph& g,
                                              const std::vector<Branch>& branches,
                                              const VarCatalog& catalog,
                                              const SwitchConfig& cfg,
                                              const AssemblyOptions& opts = {});

/// One equation per line, "[tag] c1*x1 + c2*x2 ... = rhs", with the rhs
/// evaluated for the given state.
[[nodiscard]] std::string dump_system(const AssembledSystem& sys, const VarCatalog& catalog,
                                      const StateVector& state);

/// Zero-initialized state honoring netlist ic= overrides.
[[nodiscard]] StateVector initial_state(const CircuitGraph& g);

/// Signed sum of branch currents into each non-ground node that is not a
/// source endpoint (source currents are not unknowns). Used by the KCL
/// residual property.
[[nodiscard]] Real max_kcl_residual(const CircuitGraph& g, const std::vector<Branch>& branches,
                                    const VarCatalog& catalog, const Vector& x);

}  // namespace elex
