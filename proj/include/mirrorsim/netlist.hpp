#pragma once

// SPICE-like netlist dialect: lexer/parser to an AST, a canonical printer,
// elaboration into a solvable Circuit, and generators for the built-in
// current-mirror configurations. The grammar is documented in docs/netlist.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mirrorsim/constants.hpp"
#include "mirrorsim/devices.hpp"

namespace mirrorsim::netlist {

/// `name(arg ...)` value such as `SIN(2.5 2.5 50)`.
struct Call {
  std::string name;
  std::vector<double> args;
  bool operator==(const Call&) const = default;
};

/// A card argument: number (SI suffix applied), identifier, or call.
using Value = std::variant<double, std::string, Call>;

struct Param {
  std::string key;  // lower-cased
  Value value;
  bool operator==(const Param&) const = default;
};

struct ElementCard {
  std::string name;                // original spelling; first letter selects the class
  std::vector<std::string> nodes;
  std::vector<Value> args;         // positional arguments after the nodes
  std::vector<Param> params;       // key=value pairs
  int line = 0;

  char device_letter() const;
};

enum class DirectiveKind : std::uint8_t { Model, Tran, Dc, Temp, Param, End };

struct DirectiveCard {
  DirectiveKind kind = DirectiveKind::End;
  std::vector<Value> args;
  std::vector<Param> params;
  int line = 0;
};

using Card = std::variant<ElementCard, DirectiveCard>;

struct NetlistAst {
  std::string title;
  std::vector<Card> cards;
};

/// Parse netlist text. Throws ParseError carrying the offending line.
NetlistAst parse(std::string_view text);

/// Canonical text form; `parse(print(ast))` is structurally identical to `ast`.
std::string print(const NetlistAst& ast);

/// Card-by-card equality ignoring source line numbers.
bool structurally_equal(const NetlistAst& a, const NetlistAst& b);

/// Parse a SPICE number with an optional scale suffix (f p n u m k meg g t)
/// and trailing unit letters. Returns nullopt if `token` is not numeric.
std::optional<double> parse_number(std::string_view token);

/// Shortest text that reparses to exactly `v`.
std::string format_number(double v);

std::string to_lower(std::string_view s);

// ---------------------------------------------------------------------------
// Elaborated circuit

struct ResistorInstance {
  std::string name;
  int a = 0, b = 0;
  devices::ResistorParams params;
};

struct MemristorInstance {
  std::string name;
  int a = 0, b = 0;  // a = n+, current a -> b drives the state by polarity
  devices::MemristorParams params;
  devices::MemristorState initial;
};

struct MosfetInstance {
  std::string name;
  int drain = 0, gate = 0, source = 0, bulk = 0;
  devices::MosfetParams params;
};

struct VoltageSourceInstance {
  std::string name;
  int pos = 0, neg = 0;
  devices::SourceSpec spec;
};

struct TranDirective {
  double step = 0.0;
  double stop = 0.0;
};

struct DcSweepDirective {
  std::string source;
  double start = 0.0, stop = 0.0, step = 0.0;
};

struct Circuit {
  std::vector<std::string> node_names;  // index 0 is ground "0"
  std::vector<ResistorInstance> resistors;
  std::vector<MemristorInstance> memristors;
  std::vector<MosfetInstance> mosfets;
  std::vector<VoltageSourceInstance> sources;

  std::optional<double> temp;  // K, from .temp
  std::optional<TranDirective> tran;
  std::optional<DcSweepDirective> dc_sweep;

  int node_count() const { return static_cast<int>(node_names.size()); }
  /// Dense index for `name` (case-insensitive), or nullopt.
  std::optional<int> find_node(std::string_view name) const;
  /// Memristor states at t = 0.
  std::vector<devices::MemristorState> initial_states() const;
};

/// Resolve models/params, intern nodes, compute memristor initial states.
/// Throws ElaborationError.
Circuit elaborate(const NetlistAst& ast);

/// Copy of `circuit` whose memristors start from `states`.
Circuit with_initial_states(Circuit circuit, const std::vector<devices::MemristorState>& states);

// ---------------------------------------------------------------------------
// Built-in current mirrors

enum class MirrorKind : std::uint8_t { TwoResistors, TwoMemristors, PmosResistor, PmosMemristor };

struct MirrorConfig {
  MirrorKind kind = MirrorKind::TwoResistors;
  double vdd = 2.5;
  std::optional<double> vbias;  // PMOS variants only
  double r_load = 38.0e3;       // resistor value, or final memristance (Roff) of memristors
  double m0 = 5.0e3;            // initial memristance
  std::optional<devices::SourceSpec> supply;  // replaces the DC supply when set

  devices::MosfetParams nmos = devices::MosfetParams::nmos_default();
  devices::MosfetParams pmos = devices::MosfetParams::pmos_default();
  devices::MemristorParams memristor;
  double resistor_tc = devices::ResistorParams{}.temp_coeff;

  void validate() const;
};

bool uses_memristors(MirrorKind kind);
bool uses_pmos(MirrorKind kind);
/// Short names used on the command line: 2r, 2m, pmos-r, pmos-m.
std::string_view short_name(MirrorKind kind);
std::optional<MirrorKind> kind_from_short_name(std::string_view name);

/// Device names in generated netlists.
inline constexpr std::string_view kSupplyName = "VDD";
inline constexpr std::string_view kBiasName = "VBIAS";
inline constexpr std::string_view kInputTransistor = "M1";
inline constexpr std::string_view kOutputTransistor = "M2";
inline constexpr std::string_view kPmosName = "MP";
inline constexpr std::string_view kOutputNode = "d2";

NetlistAst builtin_mirror(const MirrorConfig& config);

}  // namespace mirrorsim::netlist
