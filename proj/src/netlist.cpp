#include "elex/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace elex {

const char* kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Vdc: return "vdc";
        case ElementKind::Resistor: return "resistor";
        case ElementKind::Capacitor: return "capacitor";
        case ElementKind::Inductor: return "inductor";
        case ElementKind::Switch: return "switch";
        case ElementKind::Diode: return "diode";
    }
    return "?";
}

bool is_switch_kind(ElementKind k) {
    return k == ElementKind::Switch || k == ElementKind::Diode;
}

bool GateSchedule::on_at(Real t) const {
    switch (kind) {
        case Kind::Constant:
            return constant_on;
        case Kind::Pulse: {
            if (t < delay) return false;
            const Real phase = std::fmod(t - delay, period);
            return phase < duty * period;
        }
        case Kind::Events: {
            bool on = false;
            for (const auto& [et, eon] : events) {
                if (et > t) break;
                on = eon;
            }
            return on;
        }
    }
    return false;
}

Real GateSchedule::next_edge_after(Real t) const {
    constexpr Real inf = std::numeric_limits<Real>::infinity();
    switch (kind) {
        case Kind::Constant:
            return inf;
        case Kind::Pulse: {
            if (t < delay) return delay;
            const Real k = std::floor((t - delay) / period);
            // candidate edges in period k and k+1
            for (const Real cand : {delay + k * period,
                                    delay + (k + duty) * period,
                                    delay + (k + 1) * period,
                                    delay + (k + 1 + duty) * period}) {
                if (cand > t) return cand;
            }
            return inf;
        }
        case Kind::Events: {
            for (const auto& [et, eon] : events) {
                (void)eon;
                if (et > t) return et;
            }
            return inf;
        }
    }
    return inf;
}

std::string Probe::label() const {
    return (kind == Kind::NodeVoltage ? "v(" : "i(") + target + ")";
}

std::string Diagnostic::to_string() const {
    std::ostringstream os;
    os << line << ":" << col << ": " << message;
    return os.str();
}

namespace {

struct Token {
    std::string text;
    int col = 0;  // 1-based
};

// Split a line into whitespace-separated tokens, keeping "(...)" groups
// attached to the preceding word: "pulse(period=1 duty=0.5)" is one token.
std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        int depth = 0;
        while (i < line.size()) {
            const char c = line[i];
            if (c == '(') ++depth;
            if (c == ')' && depth > 0) --depth;
            if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) break;
            ++i;
        }
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

bool parse_real(const std::string& s, Real& out) {
    const char* begin = s.c_str();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct LineParser {
    std::vector<Diagnostic>& diags;
    int line_no;

    void error(int col, const std::string& msg) { diags.push_back({line_no, col, msg}); }
};

// "key=value" -> (key, value); returns false if there is no '='.
bool split_kv(const std::string& tok, std::string& key, std::string& value) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    key = lower(tok.substr(0, eq));
    value = tok.substr(eq + 1);
    return true;
}

// "name(body)" -> (name, body); returns false otherwise.
bool split_call(const std::string& tok, std::string& name, std::string& body) {
    const auto open = tok.find('(');
    if (open == std::string::npos || tok.back() != ')') return false;
    name = lower(tok.substr(0, open));
    body = tok.substr(open + 1, tok.size() - open - 2);
    return true;
}

std::optional<GateSchedule> parse_schedule(const std::string& tok, LineParser& lp, int col) {
    GateSchedule sched;
    const std::string low = lower(tok);
    if (low == "on" || low == "off") {
        sched.kind = GateSchedule::Kind::Constant;
        sched.constant_on = (low == "on");
        return sched;
    }
    std::string name, body;
    if (!split_call(tok, name, body)) {
        lp.error(col, "unrecognized switch token '" + tok + "'");
        return std::nullopt;
    }
    if (name == "pulse") {
        sched.kind = GateSchedule::Kind::Pulse;
        bool has_period = false;
        for (const Token& t : tokenize(body)) {
            std::string key, value;
            Real x = 0;
            if (!split_kv(t.text, key, value) || !parse_real(value, x)) {
                lp.error(col, "bad pulse parameter '" + t.text + "'");
                return std::nullopt;
            }
            if (key == "period") {
                sched.period = x;
                has_period = true;
            } else if (key == "duty") {
                sched.duty = x;
            } else if (key == "delay") {
                sched.delay = x;
            } else {
                lp.error(col, "unknown pulse parameter '" + key + "'");
                return std::nullopt;
            }
        }
        if (!has_period || sched.period <= 0) {
            lp.error(col, "pulse() requires period > 0");
            return std::nullopt;
        }
        if (sched.duty < 0 || sched.duty > 1) {
            lp.error(col, "pulse() duty must lie in [0,1]");
            return std::nullopt;
        }
        return sched;
    }
    if (name == "events") {
        sched.kind = GateSchedule::Kind::Events;
        for (const Token& t : tokenize(body)) {
            const auto colon = t.text.find(':');
            Real when = 0;
            if (colon == std::string::npos || !parse_real(t.text.substr(0, colon), when)) {
                lp.error(col, "bad event '" + t.text + "' (want time:on|off)");
                return std::nullopt;
            }
            const std::string st = lower(t.text.substr(colon + 1));
            if (st != "on" && st != "off") {
                lp.error(col, "bad event state '" + st + "'");
                return std::nullopt;
            }
            sched.events.emplace_back(when, st == "on");
        }
        if (!std::is_sorted(sched.events.begin(), sched.events.end(),
                            [](const auto& a, const auto& b) { return a.first < b.first; })) {
            lp.error(col, "events() must be sorted by time");
            return std::nullopt;
        }
        return sched;
    }
    lp.error(col, "unknown schedule '" + name + "' (want on, off, pulse(), events())");
    return std::nullopt;
}

std::optional<ElementKind> kind_from_name(const std::string& name) {
    switch (std::toupper(static_cast<unsigned char>(name[0]))) {
        case 'V': return ElementKind::Vdc;
        case 'R': return ElementKind::Resistor;
        case 'C': return ElementKind::Capacitor;
        case 'L': return ElementKind::Inductor;
        case 'S': return ElementKind::Switch;
        case 'D': return ElementKind::Diode;
        default: return std::nullopt;
    }
}

bool parse_probe_token(const std::string& tok, Probe& probe) {
    std::string name, body;
    if (!split_call(tok, name, body) || body.empty()) return false;
    if (name == "v") {
        probe = {Probe::Kind::NodeVoltage, body};
        return true;
    }
    if (name == "i") {
        probe = {Probe::Kind::ElementCurrent, body};
        return true;
    }
    return false;
}

}  // namespace

ParseResult parse_netlist(const std::string& text) {
    ParseResult result;
    NetlistDoc doc;
    std::vector<Diagnostic>& diags = result.diagnostics;
    std::unordered_set<std::string> names;
    bool saw_tran = false;
    bool saw_method = false;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        LineParser lp{diags, line_no};
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::vector<Token> toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0].text;
        if (head[0] == '*' || head[0] == ';') continue;

        if (head[0] == '.') {
            const std::string directive = lower(head);
            if (directive == ".title") {
                const auto pos = line.find(head);
                std::string rest = line.substr(pos + head.size());
                const auto first = rest.find_first_not_of(" \t");
                doc.title = (first == std::string::npos) ? "" : rest.substr(first);
            } else if (directive == ".tran") {
                if (toks.size() < 3) {
                    lp.error(toks[0].col, ".tran wants: .tran h_init t_stop [hmin=..] [hmax=..]");
                    continue;
                }
                Real h = 0, tstop = 0;
                if (!parse_real(toks[1].text, h) || !parse_real(toks[2].text, tstop)) {
                    lp.error(toks[1].col, ".tran arguments must be numbers");
                    continue;
                }
                doc.directives.h_init = h;
                doc.directives.t_stop = tstop;
                for (std::size_t i = 3; i < toks.size(); ++i) {
                    std::string key, value;
                    Real x = 0;
                    if (!split_kv(toks[i].text, key, value) || !parse_real(value, x)) {
                        lp.error(toks[i].col, "bad .tran option '" + toks[i].text + "'");
                        continue;
                    }
                    if (key == "hmin") {
                        doc.directives.h_min = x;
                    } else if (key == "hmax") {
                        doc.directives.h_max = x;
                    } else {
                        lp.error(toks[i].col, "unknown .tran option '" + key + "'");
                    }
                }
                saw_tran = true;
            } else if (directive == ".method") {
                if (toks.size() < 2) {
                    lp.error(toks[0].col, ".method wants fe or rkf");
                    continue;
                }
                const std::string m = lower(toks[1].text);
                if (m == "fe") {
                    doc.directives.method = Method::Fe;
                } else if (m == "rkf") {
                    doc.directives.method = Method::Rkf;
                } else {
                    lp.error(toks[1].col, "unknown method '" + toks[1].text + "'");
                    continue;
                }
                for (std::size_t i = 2; i < toks.size(); ++i) {
                    std::string key, value;
                    Real x = 0;
                    if (split_kv(toks[i].text, key, value) && key == "tol" && parse_real(value, x)) {
                        doc.directives.rkf_tol = x;
                    } else {
                        lp.error(toks[i].col, "bad .method option '" + toks[i].text + "'");
                    }
                }
                saw_method = true;
            } else if (directive == ".probe") {
                if (toks.size() < 2) {
                    lp.error(toks[0].col, ".probe wants v(node) or i(elem)");
                    continue;
                }
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    Probe p;
                    if (!parse_probe_token(toks[i].text, p)) {
                        lp.error(toks[i].col, "bad probe '" + toks[i].text + "'");
                        continue;
                    }
                    doc.directives.probes.push_back(p);
                }
            } else if (directive == ".end") {
                break;
            } else {
                lp.error(toks[0].col, "unknown directive '" + head + "'");
            }
            continue;
        }

        // element line
        const auto kind = kind_from_name(head);
        if (!kind) {
            lp.error(toks[0].col, "unknown element kind '" + head +
                                      "' (accepted: V R C L S D)");
            continue;
        }
        if (names.contains(head)) {
            lp.error(toks[0].col, "duplicate element name '" + head + "'");
            continue;
        }
        if (toks.size() < 3) {
            lp.error(toks[0].col, "element '" + head + "' wants two nodes");
            continue;
        }
        ElementDecl decl;
        decl.name = head;
        decl.kind = *kind;
        decl.node_p = toks[1].text;
        decl.node_n = toks[2].text;
        if (decl.node_p == decl.node_n) {
            lp.error(toks[1].col, "element '" + head + "' connects a node to itself");
            continue;
        }

        std::size_t next = 3;
        const bool wants_value = !is_switch_kind(decl.kind);
        if (wants_value) {
            if (toks.size() < 4 || !parse_real(toks[3].text, decl.value)) {
                lp.error(toks[0].col, "element '" + head + "' wants a numeric value");
                continue;
            }
            next = 4;
        }

        bool line_ok = true;
        for (std::size_t i = next; i < toks.size() && line_ok; ++i) {
            std::string key, value;
            Real x = 0;
            if (split_kv(toks[i].text, key, value)) {
                if (key == "von" && is_switch_kind(decl.kind) && parse_real(value, x)) {
                    decl.v_on = x;
                } else if (key == "ic" &&
                           (decl.kind == ElementKind::Capacitor ||
                            decl.kind == ElementKind::Inductor) &&
                           parse_real(value, x)) {
                    decl.ic = x;
                    decl.has_ic = true;
                } else {
                    lp.error(toks[i].col, "bad parameter '" + toks[i].text + "' for " +
                                              kind_name(decl.kind) + " '" + head + "'");
                    line_ok = false;
                }
            } else if (decl.kind == ElementKind::Switch) {
                auto sched = parse_schedule(toks[i].text, lp, toks[i].col);
                if (!sched) {
                    line_ok = false;
                } else if (decl.gate) {
                    lp.error(toks[i].col, "switch '" + head + "' has two schedules");
                    line_ok = false;
                } else {
                    decl.gate = *sched;
                }
            } else {
                lp.error(toks[i].col, "unexpected token '" + toks[i].text + "'");
                line_ok = false;
            }
        }
        if (!line_ok) continue;

        if (decl.kind == ElementKind::Switch && !decl.gate) {
            decl.gate = GateSchedule{};  // defaults to constant off
        }
        names.insert(decl.name);
        doc.elements.push_back(std::move(decl));
    }

    if (doc.elements.empty()) {
        diags.push_back({line_no, 1, "no elements"});
    }
    if (!saw_tran) {
        diags.push_back({line_no, 1, "missing .tran directive"});
    }
    (void)saw_method;  // .method optional; defaults to rkf

    if (!diags.empty()) {
        return result;
    }

    // Node set = union of element nodes, first-seen order.
    std::unordered_set<std::string> seen;
    for (const ElementDecl& e : doc.elements) {
        for (const std::string* n : {&e.node_p, &e.node_n}) {
            if (seen.insert(*n).second) doc.node_names.push_back(*n);
        }
    }

    // Derived step-control defaults.
    SimDirectives& d = doc.directives;
    if (d.h_min <= 0) d.h_min = std::min(d.h_init, 1e-15);
    if (d.h_max <= 0) d.h_max = (d.t_stop > 0) ? d.t_stop : d.h_init;
    if (d.h_init <= 0) {
        diags.push_back({line_no, 1, ".tran h_init must be positive"});
    } else if (!(d.h_min <= d.h_init && d.h_init <= d.h_max)) {
        diags.push_back({line_no, 1, ".tran wants h_min <= h_init <= h_max"});
    } else if (d.t_stop > 0 && d.h_max > d.t_stop) {
        diags.push_back({line_no, 1, ".tran wants h_max <= t_stop"});
    }
    if (d.t_stop < 0) {
        diags.push_back({line_no, 1, ".tran t_stop must be >= 0"});
    }
    if (d.rkf_tol <= 0) {
        diags.push_back({line_no, 1, ".method tol must be positive"});
    }
    if (!diags.empty()) {
        return result;
    }

    result.doc = std::move(doc);
    return result;
}

ValidationReport validate(const NetlistDoc& doc) {
    ValidationReport report;
    auto add = [&](const std::string& m) { report.findings.push_back({m}); };

    bool has_ground = false;
    std::unordered_map<std::string, int> degree;
    std::unordered_set<std::string> source_nodes;
    for (const ElementDecl& e : doc.elements) {
        ++degree[e.node_p];
        ++degree[e.node_n];
        if (e.node_p == "0" || e.node_n == "0") has_ground = true;
        if (e.kind == ElementKind::Vdc) {
            source_nodes.insert(e.node_p);
            source_nodes.insert(e.node_n);
        }
    }
    if (!has_ground) add("no ground node (node \"0\" never appears)");

    for (const std::string& n : doc.node_names) {
        if (degree[n] == 1 && !source_nodes.contains(n)) {
            add("dangling node '" + n + "' (degree 1 on a non-source node)");
        }
    }

    for (const ElementDecl& e : doc.elements) {
        switch (e.kind) {
            case ElementKind::Resistor:
            case ElementKind::Capacitor:
            case ElementKind::Inductor:
                if (!(e.value > 0)) {
                    add("non-positive parameter on '" + e.name + "'");
                }
                break;
            case ElementKind::Switch:
            case ElementKind::Diode:
                if (e.v_on < 0) {
                    add("negative von on '" + e.name + "'");
                }
                break;
            case ElementKind::Vdc:
                break;
        }
    }

    // Probes must reference known nodes / elements.
    for (const Probe& p : doc.directives.probes) {
        if (p.kind == Probe::Kind::NodeVoltage) {
            if (std::find(doc.node_names.begin(), doc.node_names.end(), p.target) ==
                doc.node_names.end()) {
                add("probe " + p.label() + " names an unknown node");
            }
        } else {
            if (std::none_of(doc.elements.begin(), doc.elements.end(),
                             [&](const ElementDecl& e) { return e.name == p.target; })) {
                add("probe " + p.label() + " names an unknown element");
            }
        }
    }
    return report;
}

namespace {

std::string real_str(Real x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string schedule_str(const GateSchedule& s) {
    switch (s.kind) {
        case GateSchedule::Kind::Constant:
            return s.constant_on ? "on" : "off";
        case GateSchedule::Kind::Pulse:
            return "pulse(period=" + real_str(s.period) + " duty=" + real_str(s.duty) +
                   " delay=" + real_str(s.delay) + ")";
        case GateSchedule::Kind::Events: {
            std::string out = "events(";
            bool first = true;
            for (const auto& [t, on] : s.events) {
                if (!first) out += ' ';
                out += real_str(t);
                out += on ? ":on" : ":off";
                first = false;
            }
            return out + ")";
        }
    }
    return "";
}

}  // namespace

std::string serialize_netlist(const NetlistDoc& doc) {
    std::ostringstream os;
    if (!doc.title.empty()) os << ".title " << doc.title << "\n";
    for (const ElementDecl& e : doc.elements) {
        os << e.name << ' ' << e.node_p << ' ' << e.node_n;
        if (!is_switch_kind(e.kind)) os << ' ' << real_str(e.value);
        if (is_switch_kind(e.kind)) os << " von=" << real_str(e.v_on);
        if (e.has_ic) os << " ic=" << real_str(e.ic);
        if (e.kind == ElementKind::Switch && e.gate) os << ' ' << schedule_str(*e.gate);
        os << "\n";
    }
    const SimDirectives& d = doc.directives;
    os << ".method " << (d.method == Method::Fe ? "fe" : "rkf") << " tol=" << real_str(d.rkf_tol)
       << "\n";
    os << ".tran " << real_str(d.h_init) << ' ' << real_str(d.t_stop)
       << " hmin=" << real_str(d.h_min) << " hmax=" << real_str(d.h_max) << "\n";
    for (const Probe& p : d.probes) os << ".probe " << p.label() << "\n";
    return os.str();
}

bool structurally_equal(const NetlistDoc& a, const NetlistDoc& b) {
    if (a.elements.size() != b.elements.size()) return false;
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        const ElementDecl& x = a.elements[i];
        const ElementDecl& y = b.elements[i];
        if (x.name != y.name || x.kind != y.kind || x.node_p != y.node_p ||
            x.node_n != y.node_n || x.value != y.value || x.v_on != y.v_on ||
            x.ic != y.ic || x.has_ic != y.has_ic || x.gate.has_value() != y.gate.has_value()) {
            return false;
        }
        if (x.gate) {
            const GateSchedule& g = *x.gate;
            const GateSchedule& h = *y.gate;
            if (g.kind != h.kind || g.constant_on != h.constant_on || g.period != h.period ||
                g.duty != h.duty || g.delay != h.delay || g.events != h.events) {
                return false;
            }
        }
    }
    const SimDirectives& p = a.directives;
    const SimDirectives& q = b.directives;
    return a.node_names == b.node_names && p.t_stop == q.t_stop && p.h_init == q.h_init &&
           p.h_min == q.h_min && p.h_max == q.h_max && p.method == q.method &&
           p.rkf_tol == q.rkf_tol && p.probes == q.probes;
}

}  // namespace elex
