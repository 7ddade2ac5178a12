#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>

#include "mirrorsim/error.hpp"
#include "mirrorsim/netlist.hpp"

namespace mirrorsim::netlist {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

char ElementCard::device_letter() const {
  return name.empty() ? '\0' : static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
}

std::optional<double> parse_number(std::string_view token) {
  const std::string s = to_lower(token);
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  const std::size_t mantissa_start = i;
  bool digits = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, digits = true;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, digits = true;
  }
  if (!digits || i == mantissa_start) return std::nullopt;
  // Exponent only when followed by digits (so "1meg" and "2e" stay unambiguous).
  if (i < s.size() && s[i] == 'e') {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      i = j;
    }
  }
  const std::string mantissa = s.substr(0, i);
  char* end = nullptr;
  double value = std::strtod(mantissa.c_str(), &end);
  if (end != mantissa.c_str() + mantissa.size()) return std::nullopt;

  std::string_view rest = std::string_view(s).substr(i);
  double scale = 1.0;
  if (rest.starts_with("meg")) {
    scale = 1e6;
    rest.remove_prefix(3);
  } else if (!rest.empty()) {
    switch (rest.front()) {
      case 'f': scale = 1e-15; break;
      case 'p': scale = 1e-12; break;
      case 'n': scale = 1e-9; break;
      case 'u': scale = 1e-6; break;
      case 'm': scale = 1e-3; break;
      case 'k': scale = 1e3; break;
      case 'g': scale = 1e9; break;
      case 't': scale = 1e12; break;
      default: break;
    }
    if (scale != 1.0) rest.remove_prefix(1);
  }
  // Trailing unit letters ("38kohm", "2.5v") are ignored, anything else is not a number.
  if (!std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isalpha(c); })) {
    return std::nullopt;
  }
  return value * scale;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return v != v ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[48];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string best = buf;
  // Drop '+' and leading zeros from the exponent: 1e+02 -> 1e2, 1e-08 -> 1e-8.
  if (const auto e = best.find('e'); e != std::string::npos) {
    std::string mant = best.substr(0, e), exp = best.substr(e + 1);
    const bool neg = !exp.empty() && exp[0] == '-';
    if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) exp.erase(0, 1);
    exp.erase(0, std::min(exp.find_first_not_of('0'), exp.size() - 1));
    best = mant + "e" + (neg ? "-" : "") + exp;
    if (std::abs(v) >= 1e-4 && std::abs(v) < 1e17) {
      for (int digits = 0; digits <= 20; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        if (std::strtod(buf, nullptr) == v) {
          if (std::strlen(buf) <= best.size()) best = buf;
          break;
        }
      }
    }
  }
  return best;
}

namespace {

enum class TokenKind : std::uint8_t { Word, Equals, LParen, RParen, Comma };

struct Token {
  TokenKind kind;
  std::string text;
};

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '.' || c == '+' || c == '-' || c == '{' || c == '}';
}

std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    switch (c) {
      case '=': tokens.push_back({TokenKind::Equals, "="}); ++i; continue;
      case '(': tokens.push_back({TokenKind::LParen, "("}); ++i; continue;
      case ')': tokens.push_back({TokenKind::RParen, ")"}); ++i; continue;
      case ',': tokens.push_back({TokenKind::Comma, ","}); ++i; continue;
      default: break;
    }
    if (!is_word_char(c)) {
      throw ParseError(line_no, std::string("unexpected character '") + c + "'");
    }
    std::size_t j = i;
    while (j < line.size() && is_word_char(line[j])) ++j;
    tokens.push_back({TokenKind::Word, std::string(line.substr(i, j - i))});
    i = j;
  }
  return tokens;
}

bool looks_numeric(std::string_view w) {
  if (w.empty()) return false;
  std::size_t i = 0;
  if (w[i] == '+' || w[i] == '-') ++i;
  if (i < w.size() && w[i] == '.') ++i;
  return i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]));
}

Value word_value(const std::string& w, int line_no) {
  if (looks_numeric(w)) {
    if (auto v = parse_number(w)) return *v;
    throw ParseError(line_no, "malformed number '" + w + "'");
  }
  if (w.find_first_of("{}") != std::string::npos) {
    if (w.size() > 2 && w.front() == '{' && w.back() == '}' &&
        w.find_first_of("{}", 1) == w.size() - 1) {
      return w.substr(1, w.size() - 2);
    }
    throw ParseError(line_no, "malformed parameter reference '" + w + "'");
  }
  return w;
}

struct ArgList {
  std::vector<Value> args;
  std::vector<Param> params;
};

// Parses `tokens[pos..]` into positional values, calls and key=value pairs.
// Bare parentheses are accepted only when `allow_group` (the .model syntax).
ArgList parse_args(const std::vector<Token>& tokens, std::size_t pos, int line_no, bool allow_group) {
  ArgList out;
  while (pos < tokens.size()) {
    const Token& t = tokens[pos];
    if (t.kind == TokenKind::LParen || t.kind == TokenKind::RParen || t.kind == TokenKind::Comma) {
      if (!allow_group) throw ParseError(line_no, "unexpected '" + t.text + "'");
      ++pos;
      continue;
    }
    if (t.kind == TokenKind::Equals) throw ParseError(line_no, "'=' without a parameter name");
    const bool has_next = pos + 1 < tokens.size();
    if (has_next && tokens[pos + 1].kind == TokenKind::Equals) {
      if (pos + 2 >= tokens.size() || tokens[pos + 2].kind != TokenKind::Word) {
        throw ParseError(line_no, "missing value for parameter '" + t.text + "'");
      }
      if (looks_numeric(t.text)) throw ParseError(line_no, "invalid parameter name '" + t.text + "'");
      out.params.push_back({to_lower(t.text), word_value(tokens[pos + 2].text, line_no)});
      pos += 3;
      continue;
    }
    if (has_next && tokens[pos + 1].kind == TokenKind::LParen && !looks_numeric(t.text) &&
        !(allow_group && out.args.size() < 2)) {
      Call call{to_lower(t.text), {}};
      pos += 2;
      bool closed = false;
      while (pos < tokens.size()) {
        const Token& a = tokens[pos++];
        if (a.kind == TokenKind::RParen) {
          closed = true;
          break;
        }
        if (a.kind == TokenKind::Comma) continue;
        if (a.kind != TokenKind::Word) throw ParseError(line_no, "unexpected '" + a.text + "' in " + call.name);
        const Value v = word_value(a.text, line_no);
        if (!std::holds_alternative<double>(v)) {
          throw ParseError(line_no, "non-numeric argument '" + a.text + "' in " + call.name);
        }
        call.args.push_back(std::get<double>(v));
      }
      if (!closed) throw ParseError(line_no, "missing ')' after " + call.name);
      out.args.emplace_back(std::move(call));
      continue;
    }
    out.args.push_back(word_value(t.text, line_no));
    ++pos;
  }
  return out;
}

std::size_t node_count_for(char letter) { return letter == 'm' ? 4 : 2; }

ElementCard parse_element(const std::vector<Token>& tokens, int line_no) {
  ElementCard card;
  card.name = tokens[0].text;
  card.line = line_no;
  const char letter = card.device_letter();
  if (letter != 'r' && letter != 'y' && letter != 'm' && letter != 'v') {
    throw ParseError(line_no, "unknown device letter '" + std::string(1, card.name[0]) + "' in " + card.name);
  }
  const std::size_t n_nodes = node_count_for(letter);
  std::size_t pos = 1;
  while (card.nodes.size() < n_nodes && pos < tokens.size() && tokens[pos].kind == TokenKind::Word &&
         !(pos + 1 < tokens.size() && tokens[pos + 1].kind != TokenKind::Word)) {
    card.nodes.push_back(tokens[pos++].text);
  }
  auto rest = parse_args(tokens, pos, line_no, false);
  card.args = std::move(rest.args);
  card.params = std::move(rest.params);

  const char* what = letter == 'r' ? "a value" : letter == 'v' ? "a source value" : "a model name";
  const bool need_model = letter == 'y' || letter == 'm';
  const bool ok = card.nodes.size() == n_nodes && !card.args.empty() &&
                  (!need_model || std::holds_alternative<std::string>(card.args.front()));
  if (!ok) {
    throw ParseError(line_no, card.name + ": expected " + std::to_string(n_nodes) + " nodes and " + what);
  }
  if (letter != 'v' && card.args.size() != 1) {
    throw ParseError(line_no, card.name + ": too many positional arguments");
  }
  return card;
}

DirectiveCard parse_directive(const std::vector<Token>& tokens, int line_no) {
  const std::string name = to_lower(tokens[0].text);
  DirectiveCard card;
  card.line = line_no;
  std::size_t min_args = 0, max_args = 0;
  if (name == ".model") {
    card.kind = DirectiveKind::Model, min_args = max_args = 2;
  } else if (name == ".tran") {
    card.kind = DirectiveKind::Tran, min_args = max_args = 2;
  } else if (name == ".dc") {
    card.kind = DirectiveKind::Dc, min_args = max_args = 4;
  } else if (name == ".temp") {
    card.kind = DirectiveKind::Temp, min_args = max_args = 1;
  } else if (name == ".param") {
    card.kind = DirectiveKind::Param;
  } else if (name == ".end") {
    card.kind = DirectiveKind::End;
  } else {
    throw ParseError(line_no, "unknown directive '" + tokens[0].text + "'");
  }
  auto rest = parse_args(tokens, 1, line_no, card.kind == DirectiveKind::Model);
  card.args = std::move(rest.args);
  card.params = std::move(rest.params);
  if (card.args.size() < min_args || card.args.size() > max_args) {
    throw ParseError(line_no, name + ": expected " + std::to_string(min_args) + " argument(s), got " +
                                  std::to_string(card.args.size()));
  }
  auto require_number = [&](std::size_t i) {
    if (!std::holds_alternative<double>(card.args[i]) && !std::holds_alternative<std::string>(card.args[i])) {
      throw ParseError(line_no, name + ": argument " + std::to_string(i + 1) + " must be a number");
    }
  };
  auto require_name = [&](std::size_t i) {
    if (!std::holds_alternative<std::string>(card.args[i])) {
      throw ParseError(line_no, name + ": argument " + std::to_string(i + 1) + " must be a name");
    }
  };
  switch (card.kind) {
    case DirectiveKind::Model: require_name(0), require_name(1); break;
    case DirectiveKind::Tran: require_number(0), require_number(1); break;
    case DirectiveKind::Dc: require_name(0), require_number(1), require_number(2), require_number(3); break;
    case DirectiveKind::Temp: require_number(0); break;
    case DirectiveKind::Param:
      if (card.params.empty()) throw ParseError(line_no, ".param: expected name=value");
      break;
    case DirectiveKind::End: break;
  }
  if (card.kind != DirectiveKind::Model && card.kind != DirectiveKind::Param && !card.params.empty()) {
    throw ParseError(line_no, name + ": unexpected key=value argument");
  }
  return card;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct LogicalLine {
  std::string text;
  int line;
};

}  // namespace

NetlistAst parse(std::string_view text) {
  NetlistAst ast;
  std::vector<LogicalLine> lines;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '*') {
      if (line_no == 1) ast.title = std::string(trim(line.substr(1)));
      continue;
    }
    if (const auto semi = line.find(';'); semi != std::string_view::npos) line = trim(line.substr(0, semi));
    if (line.empty()) continue;
    if (line.front() == '+') {
      if (lines.empty()) throw ParseError(line_no, "continuation line without a preceding card");
      lines.back().text += ' ';
      lines.back().text += line.substr(1);
      continue;
    }
    lines.push_back({std::string(line), line_no});
  }

  std::set<std::string> element_names;
  for (const auto& logical : lines) {
    auto tokens = tokenize(logical.text, logical.line);
    if (tokens.empty()) continue;
    if (tokens[0].kind != TokenKind::Word) throw ParseError(logical.line, "card must start with a name");
    if (tokens[0].text.front() == '.') {
      auto card = parse_directive(tokens, logical.line);
      const bool is_end = card.kind == DirectiveKind::End;
      ast.cards.emplace_back(std::move(card));
      if (is_end) break;
      continue;
    }
    auto card = parse_element(tokens, logical.line);
    if (!element_names.insert(to_lower(card.name)).second) {
      throw ParseError(logical.line, "duplicate element name '" + card.name + "'");
    }
    ast.cards.emplace_back(std::move(card));
  }
  return ast;
}

namespace {

std::string print_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  const auto& call = std::get<Call>(v);
  std::string out = call.name;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  out += '(';
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += ' ';
    out += format_number(call.args[i]);
  }
  out += ')';
  return out;
}

void append_args(std::string& out, const std::vector<Value>& args, const std::vector<Param>& params) {
  for (const auto& a : args) out += ' ' + print_value(a);
  for (const auto& p : params) out += ' ' + p.key + '=' + print_value(p.value);
}

const char* directive_name(DirectiveKind k) {
  switch (k) {
    case DirectiveKind::Model: return ".model";
    case DirectiveKind::Tran: return ".tran";
    case DirectiveKind::Dc: return ".dc";
    case DirectiveKind::Temp: return ".temp";
    case DirectiveKind::Param: return ".param";
    case DirectiveKind::End: return ".end";
  }
  return "";
}

}  // namespace

std::string print(const NetlistAst& ast) {
  std::string out;
  out += "* " + ast.title + '\n';
  for (const auto& card : ast.cards) {
    if (const auto* e = std::get_if<ElementCard>(&card)) {
      out += e->name;
      for (const auto& n : e->nodes) out += ' ' + n;
      append_args(out, e->args, e->params);
    } else {
      const auto& d = std::get<DirectiveCard>(card);
      out += directive_name(d.kind);
      append_args(out, d.args, d.params);
    }
    out += '\n';
  }
  return out;
}

bool structurally_equal(const NetlistAst& a, const NetlistAst& b) {
  if (a.title != b.title || a.cards.size() != b.cards.size()) return false;
  for (std::size_t i = 0; i < a.cards.size(); ++i) {
    const Card& x = a.cards[i];
    const Card& y = b.cards[i];
    if (x.index() != y.index()) return false;
    if (const auto* e = std::get_if<ElementCard>(&x)) {
      const auto& f = std::get<ElementCard>(y);
      if (e->name != f.name || e->nodes != f.nodes || e->args != f.args || e->params != f.params) return false;
    } else {
      const auto& d = std::get<DirectiveCard>(x);
      const auto& g = std::get<DirectiveCard>(y);
      if (d.kind != g.kind || d.args != g.args || d.params != g.params) return false;
    }
  }
  return true;
}

}  // namespace mirrorsim::netlist
