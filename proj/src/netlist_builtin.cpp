#include <sstream>

#include "mirrorsim/error.hpp"
#include "mirrorsim/netlist.hpp"

namespace mirrorsim::netlist {

bool uses_memristors(MirrorKind kind) {
  return kind == MirrorKind::TwoMemristors || kind == MirrorKind::PmosMemristor;
}

bool uses_pmos(MirrorKind kind) {
  return kind == MirrorKind::PmosResistor || kind == MirrorKind::PmosMemristor;
}

std::string_view short_name(MirrorKind kind) {
  switch (kind) {
    case MirrorKind::TwoResistors: return "2r";
    case MirrorKind::TwoMemristors: return "2m";
    case MirrorKind::PmosResistor: return "pmos-r";
    case MirrorKind::PmosMemristor: return "pmos-m";
  }
  return "";
}

std::optional<MirrorKind> kind_from_short_name(std::string_view name) {
  for (auto k : {MirrorKind::TwoResistors, MirrorKind::TwoMemristors, MirrorKind::PmosResistor,
                 MirrorKind::PmosMemristor}) {
    if (to_lower(name) == short_name(k)) return k;
  }
  return std::nullopt;
}

void MirrorConfig::validate() const {
  if (!(vdd > 0.0)) throw Error("mirror config: vdd must be positive");
  if (!(r_load > 0.0)) throw Error("mirror config: load resistance must be positive");
  if (uses_pmos(kind) && !vbias) throw Error("mirror config: vbias is required for PMOS variants");
  if (!uses_pmos(kind) && vbias) throw Error("mirror config: vbias only applies to PMOS variants");
  if (uses_memristors(kind)) {
    devices::MemristorParams p = memristor;
    p.r_off = r_load;
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw Error(std::string("mirror config: ") + e.what());
    }
    if (m0 < p.r_on || m0 > p.r_off) throw Error("mirror config: m0 must lie in [r_on, r_load]");
  }
  if (supply) supply->validate();
  nmos.validate();
  if (uses_pmos(kind)) pmos.validate();
}

namespace {

std::string mosfet_model(std::string_view name, const devices::MosfetParams& p) {
  std::ostringstream s;
  s << ".model " << name << (p.polarity == devices::Polarity::Pmos ? " PMOS" : " NMOS")
    << " vth0=" << format_number(p.vth0) << " k_prime=" << format_number(p.k_prime)
    << " lambda=" << format_number(p.lambda) << "\n+ width=" << format_number(p.width)
    << " length=" << format_number(p.length) << " n_sub=" << format_number(p.n_sub)
    << " t_ox=" << format_number(p.t_ox) << "\n+ m_ox=" << format_number(p.m_ox)
    << " phi_ox=" << format_number(p.phi_ox) << " vth_tc=" << format_number(p.vth_tc)
    << " mobility_exp=" << format_number(p.mobility_exp) << '\n';
  return s.str();
}

const char* title_for(MirrorKind kind) {
  switch (kind) {
    case MirrorKind::TwoResistors: return "current mirror with two resistive loads";
    case MirrorKind::TwoMemristors: return "current mirror with two memristive loads";
    case MirrorKind::PmosResistor: return "current mirror with PMOS input load and resistive output load";
    case MirrorKind::PmosMemristor: return "current mirror with PMOS input load and memristive output load";
  }
  return "";
}

}  // namespace

NetlistAst builtin_mirror(const MirrorConfig& config) {
  config.validate();
  const bool mem = uses_memristors(config.kind);
  const bool pmos = uses_pmos(config.kind);
  std::ostringstream s;
  s << "* " << title_for(config.kind) << '\n';
  s << mosfet_model("NMOD", config.nmos);
  if (pmos) s << mosfet_model("PMOD", config.pmos);
  if (mem) {
    const auto& m = config.memristor;
    s << ".model MEMMOD MEM r_on=" << format_number(m.r_on) << " r_off=" << format_number(config.r_load)
      << " length=" << format_number(m.length) << "\n+ mobility=" << format_number(m.mobility)
      << " polarity=" << m.polarity << " window_exponent=" << m.window_exponent << '\n';
  }
  s << kSupplyName << " vdd 0 ";
  if (config.supply && config.supply->kind == devices::SourceKind::Sine) {
    const auto& sp = *config.supply;
    s << "SIN(" << format_number(sp.dc_value) << ' ' << format_number(sp.amplitude) << ' '
      << format_number(sp.frequency) << ' ' << format_number(sp.phase) << ")\n";
  } else {
    s << "DC " << format_number(config.supply ? config.supply->dc_value : config.vdd) << '\n';
  }
  if (pmos) s << kBiasName << " nb 0 DC " << format_number(*config.vbias) << '\n';

  // Memristors are oriented with n+ at the drain so the supply current drives
  // them toward r_off.
  const std::string load = format_number(config.r_load);
  const std::string tc = " tc=" + format_number(config.resistor_tc);
  if (pmos) {
    s << kPmosName << " d1 nb vdd vdd PMOD\n";
  } else if (mem) {
    s << "Y1 d1 vdd MEMMOD m0=" << format_number(config.m0) << '\n';
  } else {
    s << "R1 vdd d1 " << load << tc << '\n';
  }
  if (mem) {
    s << "Y2 d2 vdd MEMMOD m0=" << format_number(config.m0) << '\n';
  } else {
    s << "R2 vdd d2 " << load << tc << '\n';
  }
  s << kInputTransistor << " d1 d1 0 0 NMOD\n";
  s << kOutputTransistor << " d2 d1 0 0 NMOD\n";
  s << ".end\n";
  return parse(s.str());
}

}  // namespace mirrorsim::netlist
