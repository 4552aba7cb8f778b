#pragma once

// SPICE-like netlist dialect:
//
//   * comment (also ";")
//   V1 1 0 10
//   L1 1 2 100e-6 [ic=0.5]
//   S1 2 0 von=0 pulse(period=1e-4 duty=0.6 delay=0)
//   S2 a b von=0 events(0:on 6e-5:off)
//   D1 2 3 von=0
//   .title boost converter
//   .tran 1e-6 5e-3 [hmin=1e-12] [hmax=5e-5]
//   .method fe|rkf [tol=1e-6]
//   .probe v(3) i(L1)
//
// Element kind comes from the first letter of the name (V R C L S D).
// Node "0" is ground. Diodes carry no gate: their on/off state belongs to
// the solver's consistency loop.

#include "elex/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace elex {

enum class ElementKind { Vdc, Resistor, Capacitor, Inductor, Switch, Diode };

[[nodiscard]] const char* kind_name(ElementKind k);
[[nodiscard]] bool is_switch_kind(ElementKind k);

/// Gate drive of a controlled switch: always on/off, a periodic pulse, or an
/// explicit time-sorted event list. Diodes have none.
struct GateSchedule {
    enum class Kind { Constant, Pulse, Events };
    Kind kind = Kind::Constant;
    bool constant_on = false;
    Real period = 0;
    Real duty = 0;
    Real delay = 0;
    std::vector<std::pair<Real, bool>> events;  // (time, on), sorted by time

    [[nodiscard]] bool on_at(Real t) const;
    /// Next gate edge strictly after t, or +inf when there is none.
    [[nodiscard]] Real next_edge_after(Real t) const;
};

struct ElementDecl {
    std::string name;
    ElementKind kind = ElementKind::Resistor;
    std::string node_p;
    std::string node_n;
    Real value = 0;   // volts / ohms / farads / henries; unused for S and D
    Real v_on = 0;    // on-state drop for switches and diodes
    std::optional<GateSchedule> gate;  // switches only
    Real ic = 0;      // initial V_C or I_L
    bool has_ic = false;
};

enum class Method { Fe, Rkf };

struct Probe {
    enum class Kind { NodeVoltage, ElementCurrent };
    Kind kind = Kind::NodeVoltage;
    std::string target;

    [[nodiscard]] std::string label() const;
    friend bool operator==(const Probe&, const Probe&) = default;
};

struct SimDirectives {
    Real t_stop = 0;
    Real h_init = 0;
    Real h_min = 0;
    Real h_max = 0;
    Method method = Method::Rkf;
    Real rkf_tol = 1e-6;
    std::vector<Probe> probes;
};

struct NetlistDoc {
    std::string title;
    std::vector<ElementDecl> elements;
    std::vector<std::string> node_names;  // union of element nodes, first-seen order
    SimDirectives directives;
};

struct Diagnostic {
    int line = 0;
    int col = 0;
    std::string message;

    [[nodiscard]] std::string to_string() const;
};

struct ParseResult {
    std::optional<NetlistDoc> doc;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return doc.has_value() && diagnostics.empty(); }
};

/// Parse a netlist document. Total: collects diagnostics instead of throwing,
/// and never crashes on arbitrary byte input.
[[nodiscard]] ParseResult parse_netlist(const std::string& text);

struct ValidationFinding {
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    [[nodiscard]] bool ok() const { return findings.empty(); }
};

/// Semantic checks on a parsed doc: ground present, no dangling non-source
/// nodes, parameters positive. An empty report means simulation-ready.
[[nodiscard]] ValidationReport validate(const NetlistDoc& doc);

/// Canonical text form; parse_netlist(serialize_netlist(doc)) reproduces doc.
[[nodiscard]] std::string serialize_netlist(const NetlistDoc& doc);

[[nodiscard]] bool structurally_equal(const NetlistDoc& a, const NetlistDoc& b);

}  // namespace elex
