#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "mirrorsim/error.hpp"
#include "mirrorsim/netlist.hpp"

namespace mirrorsim::netlist {

std::optional<int> Circuit::find_node(std::string_view name) const {
  const std::string key = to_lower(name);
  for (int i = 0; i < node_count(); ++i) {
    if (node_names[i] == key) return i;
  }
  return std::nullopt;
}

std::vector<devices::MemristorState> Circuit::initial_states() const {
  std::vector<devices::MemristorState> out;
  out.reserve(memristors.size());
  for (const auto& m : memristors) out.push_back(m.initial);
  return out;
}

Circuit with_initial_states(Circuit circuit, const std::vector<devices::MemristorState>& states) {
  if (states.size() != circuit.memristors.size()) {
    throw Error("state vector size does not match the memristor count");
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    circuit.memristors[i].initial = devices::clamp_state(states[i], circuit.memristors[i].params);
  }
  return circuit;
}

namespace {

enum class ModelType { Nmos, Pmos, Memristor };

struct ModelDef {
  ModelType type;
  std::vector<Param> params;
  int line;
};

class Elaborator {
 public:
  explicit Elaborator(const NetlistAst& ast) : ast_(ast) {}

  Circuit run() {
    collect_params();
    collect_models();
    circuit_.node_names.push_back("0");
    for (const auto& card : ast_.cards) {
      if (const auto* e = std::get_if<ElementCard>(&card)) add_element(*e);
    }
    for (const auto& card : ast_.cards) {
      if (const auto* d = std::get_if<DirectiveCard>(&card)) apply_directive(*d);
    }
    check_connectivity();
    return std::move(circuit_);
  }

 private:
  [[noreturn]] static void fail(int line, const std::string& what) {
    throw ElaborationError("line " + std::to_string(line) + ": " + what);
  }

  double resolve(const Value& v, int line) const {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* s = std::get_if<std::string>(&v)) {
      const auto it = params_.find(to_lower(*s));
      if (it == params_.end()) fail(line, "undefined parameter '" + *s + "'");
      return it->second;
    }
    fail(line, "unexpected function value '" + std::get<Call>(v).name + "'");
  }

  void collect_params() {
    for (const auto& card : ast_.cards) {
      const auto* d = std::get_if<DirectiveCard>(&card);
      if (!d || d->kind != DirectiveKind::Param) continue;
      for (const auto& p : d->params) params_[p.key] = resolve(p.value, d->line);
    }
  }

  void collect_models() {
    for (const auto& card : ast_.cards) {
      const auto* d = std::get_if<DirectiveCard>(&card);
      if (!d || d->kind != DirectiveKind::Model) continue;
      const std::string name = to_lower(std::get<std::string>(d->args[0]));
      const std::string type = to_lower(std::get<std::string>(d->args[1]));
      ModelType t;
      if (type == "nmos") {
        t = ModelType::Nmos;
      } else if (type == "pmos") {
        t = ModelType::Pmos;
      } else if (type == "mem" || type == "memristor") {
        t = ModelType::Memristor;
      } else {
        fail(d->line, "unknown model type '" + type + "'");
      }
      if (models_.count(name)) fail(d->line, "duplicate model '" + name + "'");
      models_[name] = {t, d->params, d->line};
    }
  }

  int intern(const std::string& node) {
    const std::string key = to_lower(node);
    for (int i = 0; i < static_cast<int>(circuit_.node_names.size()); ++i) {
      if (circuit_.node_names[i] == key) return i;
    }
    circuit_.node_names.push_back(key);
    return static_cast<int>(circuit_.node_names.size()) - 1;
  }

  const ModelDef& model_for(const ElementCard& e, ModelType expected_a, std::optional<ModelType> expected_b = {}) {
    const std::string name = to_lower(std::get<std::string>(e.args.front()));
    const auto it = models_.find(name);
    if (it == models_.end()) fail(e.line, e.name + ": undefined model '" + name + "'");
    if (it->second.type != expected_a && (!expected_b || it->second.type != *expected_b)) {
      fail(e.line, e.name + ": model '" + name + "' has the wrong device type");
    }
    return it->second;
  }

  void set_mosfet_param(devices::MosfetParams& p, const Param& param, int line) const {
    const double v = resolve(param.value, line);
    const std::string& k = param.key;
    if (k == "vth0" || k == "vto") {
      p.vth0 = std::abs(v);
    } else if (k == "k_prime" || k == "kp") {
      p.k_prime = v;
    } else if (k == "width" || k == "w") {
      p.width = v;
    } else if (k == "length" || k == "l") {
      p.length = v;
    } else if (k == "lambda") {
      p.lambda = v;
    } else if (k == "n_sub" || k == "n") {
      p.n_sub = v;
    } else if (k == "t_ox" || k == "tox") {
      p.t_ox = v;
    } else if (k == "m_ox") {
      p.m_ox = v;
    } else if (k == "phi_ox") {
      p.phi_ox = v;
    } else if (k == "vth_tc") {
      p.vth_tc = v;
    } else if (k == "mobility_exp" || k == "bex") {
      p.mobility_exp = v;
    } else {
      fail(line, "unknown MOSFET parameter '" + k + "'");
    }
  }

  // Returns false for instance-only keys the caller handles itself.
  bool set_memristor_param(devices::MemristorParams& p, const Param& param, int line) const {
    const std::string& k = param.key;
    if (k == "w0" || k == "m0") return false;
    const double v = resolve(param.value, line);
    if (k == "r_on" || k == "ron") {
      p.r_on = v;
    } else if (k == "r_off" || k == "roff") {
      p.r_off = v;
    } else if (k == "length" || k == "d") {
      p.length = v;
    } else if (k == "mobility" || k == "uv") {
      p.mobility = v;
    } else if (k == "polarity") {
      p.polarity = static_cast<int>(v);
    } else if (k == "window_exponent" || k == "p") {
      p.window_exponent = static_cast<int>(v);
    } else {
      fail(line, "unknown memristor parameter '" + k + "'");
    }
    return true;
  }

  template <class Params>
  Params validated(Params p, const ElementCard& e) {
    try {
      p.validate();
    } catch (const DomainError& err) {
      fail(e.line, e.name + ": " + err.what());
    }
    return p;
  }

  void add_element(const ElementCard& e) {
    std::vector<int> nodes;
    for (const auto& n : e.nodes) nodes.push_back(intern(n));
    switch (e.device_letter()) {
      case 'r': {
        devices::ResistorParams p;
        p.r_nominal = resolve(e.args.front(), e.line);
        for (const auto& param : e.params) {
          const double v = resolve(param.value, e.line);
          if (param.key == "tc" || param.key == "temp_coeff") {
            p.temp_coeff = v;
          } else if (param.key == "footprint_w" || param.key == "fw") {
            p.footprint_w = v;
          } else if (param.key == "footprint_l" || param.key == "fl") {
            p.footprint_l = v;
          } else {
            fail(e.line, e.name + ": unknown resistor parameter '" + param.key + "'");
          }
        }
        circuit_.resistors.push_back({e.name, nodes[0], nodes[1], validated(p, e)});
        break;
      }
      case 'y': {
        const auto& model = model_for(e, ModelType::Memristor);
        devices::MemristorParams p;
        for (const auto& param : model.params) {
          if (!set_memristor_param(p, param, model.line)) fail(model.line, "'" + param.key + "' is an instance parameter");
        }
        std::optional<double> w0, m0;
        for (const auto& param : e.params) {
          if (!set_memristor_param(p, param, e.line)) {
            (param.key == "w0" ? w0 : m0) = resolve(param.value, e.line);
          }
        }
        p = validated(p, e);
        if (w0 && m0) fail(e.line, e.name + ": give either w0 or m0, not both");
        devices::MemristorState state;
        if (m0) {
          try {
            state = devices::state_for_resistance(*m0, p);
          } catch (const DomainError& err) {
            fail(e.line, e.name + ": " + err.what());
          }
        } else if (w0) {
          if (*w0 < 0.0 || *w0 > p.length) fail(e.line, e.name + ": w0 outside [0, length]");
          state.w = *w0;
        }
        circuit_.memristors.push_back({e.name, nodes[0], nodes[1], p, state});
        break;
      }
      case 'm': {
        const auto& model = model_for(e, ModelType::Nmos, ModelType::Pmos);
        devices::MosfetParams p = model.type == ModelType::Pmos ? devices::MosfetParams::pmos_default()
                                                                : devices::MosfetParams::nmos_default();
        for (const auto& param : model.params) set_mosfet_param(p, param, model.line);
        for (const auto& param : e.params) set_mosfet_param(p, param, e.line);
        circuit_.mosfets.push_back({e.name, nodes[0], nodes[1], nodes[2], nodes[3], validated(p, e)});
        break;
      }
      case 'v': {
        circuit_.sources.push_back({e.name, nodes[0], nodes[1], source_spec(e)});
        break;
      }
      default:
        fail(e.line, "unknown device letter in '" + e.name + "'");
    }
  }

  devices::SourceSpec source_spec(const ElementCard& e) const {
    if (!e.params.empty()) fail(e.line, e.name + ": sources take no key=value parameters");
    std::size_t i = 0;
    const auto& args = e.args;
    if (const auto* s = std::get_if<std::string>(&args[0]); s && to_lower(*s) == "dc") {
      if (args.size() != 2) fail(e.line, e.name + ": expected 'DC <value>'");
      i = 1;
    }
    if (const auto* call = std::get_if<Call>(&args[i])) {
      if (call->name != "sin") fail(e.line, e.name + ": unknown source function '" + call->name + "'");
      if (args.size() != 1) fail(e.line, e.name + ": SIN(...) must be the only source argument");
      if (call->args.size() < 3 || call->args.size() > 4) {
        fail(e.line, e.name + ": SIN expects (offset amplitude frequency [phase])");
      }
      auto spec = devices::SourceSpec::sine(call->args[0], call->args[1], call->args[2],
                                            call->args.size() == 4 ? call->args[3] : 0.0);
      if (!(spec.frequency > 0.0)) fail(e.line, e.name + ": SIN frequency must be positive");
      return spec;
    }
    if (args.size() != i + 1) fail(e.line, e.name + ": too many source arguments");
    return devices::SourceSpec::dc(resolve(args[i], e.line));
  }

  void apply_directive(const DirectiveCard& d) {
    switch (d.kind) {
      case DirectiveKind::Tran: {
        TranDirective t{resolve(d.args[0], d.line), resolve(d.args[1], d.line)};
        if (!(t.step > 0.0) || !(t.stop >= t.step)) fail(d.line, ".tran: need 0 < step <= stop");
        circuit_.tran = t;
        break;
      }
      case DirectiveKind::Dc: {
        DcSweepDirective s{std::get<std::string>(d.args[0]), resolve(d.args[1], d.line),
                           resolve(d.args[2], d.line), resolve(d.args[3], d.line)};
        const bool found = std::any_of(circuit_.sources.begin(), circuit_.sources.end(),
                                       [&](const auto& v) { return to_lower(v.name) == to_lower(s.source); });
        if (!found) fail(d.line, ".dc: unknown source '" + s.source + "'");
        if (s.step == 0.0 || (s.stop - s.start) / s.step < 0.0) fail(d.line, ".dc: step does not reach stop");
        circuit_.dc_sweep = s;
        break;
      }
      case DirectiveKind::Temp: {
        const double k = constants::celsius_to_kelvin(resolve(d.args[0], d.line));
        if (!(k > 0.0)) fail(d.line, ".temp: below absolute zero");
        circuit_.temp = k;
        break;
      }
      default:
        break;
    }
  }

  void check_connectivity() {
    const int n = circuit_.node_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto join = [&](std::initializer_list<int> nodes) {
      const int root = find(*nodes.begin());
      for (int x : nodes) parent[find(x)] = root;
    };
    std::vector<bool> used(n, false);
    auto mark = [&](std::initializer_list<int> nodes) {
      for (int x : nodes) used[x] = true;
      join(nodes);
    };
    for (const auto& r : circuit_.resistors) mark({r.a, r.b});
    for (const auto& m : circuit_.memristors) mark({m.a, m.b});
    for (const auto& m : circuit_.mosfets) mark({m.drain, m.gate, m.source, m.bulk});
    for (const auto& v : circuit_.sources) mark({v.pos, v.neg});

    if (circuit_.sources.empty()) throw ElaborationError("circuit has no sources");
    if (!used[0]) throw ElaborationError("missing ground: no device connects to node 0");
    std::vector<bool> source_component(n, false);
    for (const auto& v : circuit_.sources) source_component[find(v.pos)] = true;
    for (int i = 1; i < n; ++i) {
      if (!source_component[find(i)]) {
        throw ElaborationError("floating node '" + circuit_.node_names[i] + "' is not connected to any source");
      }
      if (find(i) != find(0)) {
        throw ElaborationError("missing ground: node '" + circuit_.node_names[i] + "' has no path to node 0");
      }
    }
  }

  const NetlistAst& ast_;
  Circuit circuit_;
  std::map<std::string, double> params_;
  std::map<std::string, ModelDef> models_;
};

}  // namespace

Circuit elaborate(const NetlistAst& ast) { return Elaborator(ast).run(); }

}  // namespace mirrorsim::netlist
