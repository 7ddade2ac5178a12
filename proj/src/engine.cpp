#include "mirrorsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "mirrorsim/error.hpp"

namespace mirrorsim::engine {

using devices::MemristorState;
using netlist::to_lower;

void SimOptions::validate_tolerances() const {
  if (!(abstol > 0.0) || !(reltol > 0.0) || !(vntol > 0.0)) throw Error("tolerances must be positive");
  if (max_newton_iters < 1) throw Error("max_newton_iters must be at least 1");
  if (gmin < 0.0) throw Error("gmin must be nonnegative");
  if (source_steps < 1) throw Error("source_steps must be at least 1");
  if (!(temp > 0.0)) throw Error("temperature must be positive");
  if (!(max_voltage_step > 0.0)) throw Error("max_voltage_step must be positive");
}

double SimOptions::validate_transient() const {
  validate_tolerances();
  if (!(t_stop > 0.0)) throw Error("t_stop must be positive");
  const double step = dt > 0.0 ? dt : t_stop / 10000.0;
  if (dt < 0.0) throw Error("dt must be positive");
  if (t_stop < step) throw Error("t_stop must be at least dt");
  return step;
}

std::size_t unknown_count(const Circuit& circuit) {
  return static_cast<std::size_t>(circuit.node_count() - 1) + circuit.sources.size();
}

namespace {

// Node index -> unknown index, -1 for ground.
inline int row(int node) { return node - 1; }

inline double node_v(std::span<const double> x, int node) { return node == 0 ? 0.0 : x[row(node)]; }

void stamp_conductance(DenseMatrix& g, int a, int b, double c) {
  const int ra = row(a), rb = row(b);
  if (ra >= 0) g(ra, ra) += c;
  if (rb >= 0) g(rb, rb) += c;
  if (ra >= 0 && rb >= 0) {
    g(ra, rb) -= c;
    g(rb, ra) -= c;
  }
}

double memristor_resistance(const netlist::MemristorInstance& m, const MemristorState& s) {
  return devices::memristance(devices::clamp_state(s, m.params), m.params);
}

}  // namespace

MnaSystem assemble_system(const Circuit& circuit, std::span<const double> guess,
                          std::span<const MemristorState> states, const StampContext& ctx) {
  const std::size_t n = unknown_count(circuit);
  const int nodes = circuit.node_count() - 1;
  MnaSystem sys{DenseMatrix(n), std::vector<double>(n, 0.0)};
  auto& g = sys.g;
  auto& rhs = sys.rhs;

  // gmin shunts only nodes touched by a MOSFET, so linear networks stay exact.
  if (ctx.gmin > 0.0) {
    std::vector<bool> shunt(static_cast<std::size_t>(nodes) + 1, false);
    for (const auto& m : circuit.mosfets) {
      for (int t : {m.drain, m.gate, m.source, m.bulk}) shunt[static_cast<std::size_t>(t)] = true;
    }
    for (int i = 0; i < nodes; ++i) {
      if (shunt[static_cast<std::size_t>(i) + 1]) g(i, i) += ctx.gmin;
    }
  }
  for (const auto& r : circuit.resistors) {
    stamp_conductance(g, r.a, r.b, 1.0 / devices::resistor_value(r.params, ctx.temp));
  }
  for (std::size_t k = 0; k < circuit.memristors.size(); ++k) {
    const auto& m = circuit.memristors[k];
    stamp_conductance(g, m.a, m.b, 1.0 / memristor_resistance(m, states[k]));
  }
  for (const auto& m : circuit.mosfets) {
    const double vgs = node_v(guess, m.gate) - node_v(guess, m.source);
    const double vds = node_v(guess, m.drain) - node_v(guess, m.source);
    const auto e = devices::mosfet_evaluate(vgs, vds, m.params, ctx.temp);
    const double ieq = e.id - e.gm * vgs - e.gds * vds;
    const int d = row(m.drain), gt = row(m.gate), s = row(m.source);
    // Current leaving the drain node: gm (vg - vs) + gds (vd - vs) + ieq.
    if (d >= 0) {
      if (gt >= 0) g(d, gt) += e.gm;
      if (s >= 0) g(d, s) -= e.gm + e.gds;
      g(d, d) += e.gds;
      rhs[d] -= ieq;
    }
    if (s >= 0) {
      if (gt >= 0) g(s, gt) -= e.gm;
      g(s, s) += e.gm + e.gds;
      if (d >= 0) g(s, d) -= e.gds;
      rhs[s] += ieq;
    }
  }
  for (std::size_t k = 0; k < circuit.sources.size(); ++k) {
    const auto& v = circuit.sources[k];
    const int br = nodes + static_cast<int>(k);
    const int p = row(v.pos), q = row(v.neg);
    if (p >= 0) {
      g(p, br) += 1.0;
      g(br, p) += 1.0;
    }
    if (q >= 0) {
      g(q, br) -= 1.0;
      g(br, q) -= 1.0;
    }
    rhs[br] = ctx.source_scale * v.spec.value_at(ctx.time);
  }
  return sys;
}

namespace {

void check_ground_paths(const Circuit& circuit) {
  const int n = circuit.node_count();
  std::vector<std::vector<int>> adj(n);
  auto link = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (const auto& r : circuit.resistors) link(r.a, r.b);
  for (const auto& m : circuit.memristors) link(m.a, m.b);
  for (const auto& v : circuit.sources) link(v.pos, v.neg);
  for (const auto& m : circuit.mosfets) {
    // Only the channel conducts; gate and bulk are insulated.
    link(m.drain, m.source);
  }
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : adj[u]) {
      if (!seen[w]) seen[w] = true, stack.push_back(w);
    }
  }
  for (int i = 1; i < n; ++i) {
    if (!seen[i]) {
      throw SingularMatrix("node '" + circuit.node_names[i] + "' has no DC path to ground");
    }
  }
}

std::vector<bool> mosfet_nodes(const Circuit& circuit) {
  std::vector<bool> out(circuit.node_count(), false);
  for (const auto& m : circuit.mosfets) {
    out[m.drain] = out[m.gate] = out[m.source] = out[m.bulk] = true;
  }
  return out;
}

double max_node_residual(const MnaSystem& sys, std::span<const double> x, int nodes) {
  const auto gx = sys.g.multiply(x);
  double worst = 0.0;
  for (int i = 0; i < nodes; ++i) worst = std::max(worst, std::abs(gx[i] - sys.rhs[i]));
  return worst;
}

struct NewtonOutcome {
  bool converged = false;
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;
  std::vector<std::string> trace;
};

NewtonOutcome newton(const Circuit& circuit, const SimOptions& opts, std::span<const MemristorState> states,
                     StampContext ctx, std::vector<double> x) {
  const int nodes = circuit.node_count() - 1;
  const auto limited_nodes = mosfet_nodes(circuit);
  NewtonOutcome out;
  MnaSystem sys = assemble_system(circuit, x, states, ctx);
  for (int iter = 1; iter <= opts.max_newton_iters; ++iter) {
    std::vector<double> next = solve_dense(sys.g, sys.rhs);
    bool small = true;
    bool limited = false;
    double max_dv = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      double delta = next[i] - x[i];
      if (static_cast<int>(i) < nodes) {
        if (limited_nodes[i + 1] && std::abs(delta) > opts.max_voltage_step) {
          delta = std::copysign(opts.max_voltage_step, delta);
          next[i] = x[i] + delta;
          limited = true;
        }
        max_dv = std::max(max_dv, std::abs(delta));
        if (std::abs(delta) > opts.vntol + opts.reltol * std::abs(next[i])) small = false;
      } else if (std::abs(delta) > opts.abstol + opts.reltol * std::abs(next[i])) {
        small = false;
      }
    }
    x = std::move(next);
    sys = assemble_system(circuit, x, states, ctx);
    const double residual = max_node_residual(sys, x, nodes);
    char line[128];
    std::snprintf(line, sizeof line, "iter %3d  max|dV| = %.3e V  max KCL residual = %.3e A%s", iter, max_dv,
                  residual, limited ? "  (step limited)" : "");
    out.trace.emplace_back(line);
    out.iterations = iter;
    out.residual = residual;
    if (small && !limited && residual < opts.abstol) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

OperatingPoint make_operating_point(const Circuit& circuit, std::vector<double> x,
                                    std::span<const MemristorState> states, double temp) {
  OperatingPoint op;
  const int nodes = circuit.node_count() - 1;
  op.node_voltages.assign(circuit.node_count(), 0.0);
  for (int i = 1; i <= nodes; ++i) op.node_voltages[i] = x[row(i)];
  const auto& v = op.node_voltages;
  for (std::size_t k = 0; k < circuit.sources.size(); ++k) op.source_currents.push_back(x[nodes + k]);
  for (const auto& r : circuit.resistors) {
    op.resistor_currents.push_back((v[r.a] - v[r.b]) / devices::resistor_value(r.params, temp));
  }
  for (std::size_t k = 0; k < circuit.memristors.size(); ++k) {
    const auto& m = circuit.memristors[k];
    op.memristor_currents.push_back((v[m.a] - v[m.b]) / memristor_resistance(m, states[k]));
  }
  for (const auto& m : circuit.mosfets) {
    op.mosfet_currents.push_back(
        devices::mosfet_current(v[m.gate] - v[m.source], v[m.drain] - v[m.source], m.params, temp));
  }
  op.solution = std::move(x);
  return op;
}

}  // namespace

OperatingPoint solve_operating_point(const Circuit& circuit, const SimOptions& opts,
                                     std::span<const MemristorState> states, double time,
                                     std::span<const double> initial_guess) {
  opts.validate_tolerances();
  if (circuit.sources.empty()) throw Error("circuit has no sources");
  if (states.size() != circuit.memristors.size()) throw Error("memristor state count mismatch");
  check_ground_paths(circuit);

  const std::size_t n = unknown_count(circuit);
  std::vector<double> guess(n, 0.0);
  if (initial_guess.size() == n) guess.assign(initial_guess.begin(), initial_guess.end());

  StampContext ctx{opts.temp, time, 1.0, opts.gmin};
  NewtonOutcome result = newton(circuit, opts, states, ctx, guess);
  int total_iters = result.iterations;
  if (!result.converged) {
    std::vector<double> x(n, 0.0);
    for (int step = 1; step <= opts.source_steps; ++step) {
      ctx.source_scale = static_cast<double>(step) / opts.source_steps;
      result = newton(circuit, opts, states, ctx, x);
      total_iters += result.iterations;
      if (!result.converged) {
        char what[160];
        std::snprintf(what, sizeof what,
                      "Newton iteration did not converge (source stepping failed at %.0f%% of full scale)",
                      100.0 * ctx.source_scale);
        throw NonConvergence(what, std::move(result.trace), time);
      }
      x = result.x;
    }
  }
  OperatingPoint op = make_operating_point(circuit, std::move(result.x), states, opts.temp);
  op.iterations = total_iters;
  const auto res = kcl_residuals(circuit, op, states, opts, time);
  for (double r : res) op.max_kcl_residual = std::max(op.max_kcl_residual, std::abs(r));
  return op;
}

OperatingPoint solve_dc(const Circuit& circuit, const SimOptions& opts) {
  const auto states = circuit.initial_states();
  try {
    return solve_operating_point(circuit, opts, states, 0.0);
  } catch (const NonConvergence& e) {
    throw NonConvergence(e.what(), e.trace(), -1.0);
  }
}

std::vector<double> kcl_residuals(const Circuit& circuit, const OperatingPoint& op,
                                  std::span<const MemristorState> states, const SimOptions& opts,
                                  double time) {
  (void)time;
  const auto& v = op.node_voltages;
  std::vector<double> leaving(circuit.node_count(), 0.0);
  auto flow = [&](int a, int b, double i) {
    leaving[a] += i;
    leaving[b] -= i;
  };
  for (const auto& r : circuit.resistors) {
    flow(r.a, r.b, (v[r.a] - v[r.b]) / devices::resistor_value(r.params, opts.temp));
  }
  for (std::size_t k = 0; k < circuit.memristors.size(); ++k) {
    const auto& m = circuit.memristors[k];
    flow(m.a, m.b, (v[m.a] - v[m.b]) / memristor_resistance(m, states[k]));
  }
  for (const auto& m : circuit.mosfets) {
    flow(m.drain, m.source,
         devices::mosfet_current(v[m.gate] - v[m.source], v[m.drain] - v[m.source], m.params, opts.temp));
  }
  for (std::size_t k = 0; k < circuit.sources.size(); ++k) {
    const auto& s = circuit.sources[k];
    flow(s.pos, s.neg, op.source_currents[k]);
  }
  return {leaving.begin() + 1, leaving.end()};
}

namespace {

template <class Range>
std::optional<std::size_t> find_named(const Range& items, std::string_view name) {
  const std::string key = to_lower(name);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (to_lower(items[i].name) == key) return i;
  }
  return std::nullopt;
}

}  // namespace

double OperatingPoint::voltage(const Circuit& circuit, std::string_view node) const {
  const auto idx = circuit.find_node(node);
  if (!idx) throw LookupError("unknown node '" + std::string(node) + "'");
  return node_voltages[*idx];
}

double OperatingPoint::current(const Circuit& circuit, std::string_view device) const {
  if (auto i = find_named(circuit.resistors, device)) return resistor_currents[*i];
  if (auto i = find_named(circuit.memristors, device)) return memristor_currents[*i];
  if (auto i = find_named(circuit.mosfets, device)) return mosfet_currents[*i];
  if (auto i = find_named(circuit.sources, device)) return source_currents[*i];
  throw LookupError("unknown device '" + std::string(device) + "'");
}

namespace {

enum class ProbeKind { Voltage, Current, Memristance, Position };

struct ResolvedProbe {
  ProbeKind kind;
  std::string target;
  std::size_t memristor = 0;
};

ResolvedProbe resolve_probe(const Circuit& circuit, const std::string& probe) {
  const std::string p = to_lower(probe);
  if (p.size() < 4 || p[1] != '(' || p.back() != ')') {
    throw LookupError("malformed probe '" + probe + "' (expected v(node), i(dev), r(mem) or w(mem))");
  }
  const std::string target = p.substr(2, p.size() - 3);
  switch (p[0]) {
    case 'v':
      if (!circuit.find_node(target)) throw LookupError("probe '" + probe + "': unknown node");
      return {ProbeKind::Voltage, target};
    case 'i':
      if (!find_named(circuit.resistors, target) && !find_named(circuit.memristors, target) &&
          !find_named(circuit.mosfets, target) && !find_named(circuit.sources, target)) {
        throw LookupError("probe '" + probe + "': unknown device");
      }
      return {ProbeKind::Current, target};
    case 'r':
    case 'w': {
      const auto idx = find_named(circuit.memristors, target);
      if (!idx) throw LookupError("probe '" + probe + "': unknown memristor");
      return {p[0] == 'r' ? ProbeKind::Memristance : ProbeKind::Position, target, *idx};
    }
    default:
      throw LookupError("unknown probe kind in '" + probe + "'");
  }
}

const char* unit_of(ProbeKind k) {
  switch (k) {
    case ProbeKind::Voltage: return "V";
    case ProbeKind::Current: return "A";
    case ProbeKind::Memristance: return "Ohm";
    case ProbeKind::Position: return "m";
  }
  return "";
}

}  // namespace

std::vector<std::string> default_probes(const Circuit& circuit) {
  std::vector<std::string> out;
  for (int i = 1; i < circuit.node_count(); ++i) out.push_back("v(" + circuit.node_names[i] + ")");
  for (const auto& s : circuit.sources) out.push_back("i(" + s.name + ")");
  for (const auto& r : circuit.resistors) out.push_back("i(" + r.name + ")");
  for (const auto& m : circuit.memristors) out.push_back("i(" + m.name + ")");
  for (const auto& m : circuit.mosfets) out.push_back("i(" + m.name + ")");
  for (const auto& m : circuit.memristors) out.push_back("r(" + m.name + ")");
  return out;
}

TransientResult simulate_transient(const Circuit& circuit, const SimOptions& opts,
                                   std::span<const std::string> probes) {
  const double dt = opts.validate_transient();
  std::vector<ResolvedProbe> resolved;
  TransientResult result;
  for (const auto& p : probes) {
    resolved.push_back(resolve_probe(circuit, p));
    result.waveforms.push_back({p, unit_of(resolved.back().kind), {}, {}});
  }
  const auto steps = static_cast<long>(std::llround(opts.t_stop / dt));
  for (auto& w : result.waveforms) {
    w.t.reserve(steps + 1);
    w.values.reserve(steps + 1);
  }

  auto states = circuit.initial_states();
  auto record = [&](double t, const OperatingPoint& op) {
    for (std::size_t k = 0; k < resolved.size(); ++k) {
      const auto& r = resolved[k];
      double value = 0.0;
      switch (r.kind) {
        case ProbeKind::Voltage: value = op.voltage(circuit, r.target); break;
        case ProbeKind::Current: value = op.current(circuit, r.target); break;
        case ProbeKind::Memristance:
          value = devices::memristance(states[r.memristor], circuit.memristors[r.memristor].params);
          break;
        case ProbeKind::Position: value = states[r.memristor].w; break;
      }
      result.waveforms[k].t.push_back(t);
      result.waveforms[k].values.push_back(value);
    }
  };

  OperatingPoint op = solve_operating_point(circuit, opts, states, 0.0);
  record(0.0, op);
  std::vector<MemristorState> guess(states.size());
  for (long n = 1; n <= steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    guess = states;
    std::vector<double> start = op.solution;
    bool settled = circuit.memristors.empty();
    for (int it = 0; it < std::max(1, opts.max_state_iters); ++it) {
      try {
        op = solve_operating_point(circuit, opts, guess, t, start);
      } catch (NonConvergence& e) {
        throw NonConvergence(std::string(e.what()) + " at t = " + std::to_string(t) + " s", e.trace(), t);
      }
      if (circuit.memristors.empty()) break;
      double change = 0.0;
      for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& m = circuit.memristors[k];
        MemristorState next{states[k].w + dt * devices::memristor_dwdt(guess[k], op.memristor_currents[k], m.params)};
        next = devices::clamp_state(next, m.params);
        change = std::max(change, std::abs(next.w - guess[k].w) / m.params.length);
        guess[k] = next;
      }
      start = op.solution;
      if (change < opts.reltol) {
        settled = true;
        break;
      }
    }
    if (!settled) {
      throw NonConvergence("memristor state iteration did not converge at t = " + std::to_string(t) + " s", {}, t);
    }
    states = guess;
    record(t, op);
  }
  result.final_states = std::move(states);
  result.final_op = std::move(op);
  return result;
}

std::vector<Waveform> run_transient(const Circuit& circuit, const SimOptions& opts,
                                    std::span<const std::string> probes) {
  return simulate_transient(circuit, opts, probes).waveforms;
}

}  // namespace mirrorsim::engine
