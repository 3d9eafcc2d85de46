#include "pmsd/mdl.hpp"

#include "pmsd/error.hpp"
#include "pmsd/timeutil.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace pmsd {

namespace {

// ---------------------------------------------------------------------------
// writing

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ' '; }

bool is_reserved(std::string_view name) {
  std::string upper;
  for (char c : name) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  static const std::set<std::string> reserved = {"INTEG", "A FUNCTION OF", "INITIAL TIME", "FINAL TIME",
                                                 "TIME STEP", "SAVEPER", "TIME"};
  return reserved.count(upper) > 0;
}

std::string quote_name(std::string_view name) {
  bool raw = !name.empty() && is_name_start(name.front()) && name.back() != ' ' && !is_reserved(name) &&
             std::all_of(name.begin(), name.end(), is_name_char) && name.find("  ") == std::string_view::npos;
  if (raw) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_block(std::string& out, const std::string& lhs, const std::string& rhs, const std::string& units,
                 const std::string& comment) {
  out += lhs + " = " + rhs + "\n";
  out += "\t~\t" + units + "\n";
  out += "\t~\t" + comment + "\n";
  out += "\t|\n\n";
}

void write_control(std::string& out, const MdlOptions& options) {
  out +=
      "********************************************************\n"
      "\t.Control\n"
      "********************************************************~\n"
      "\t\tSimulation Control Parameters. Link lags are annotations in element comments, not DELAY functions.\n"
      "\t|\n\n";
  write_block(out, "FINAL TIME", std::to_string(options.final_time), "step", "The final time for the simulation.");
  write_block(out, "INITIAL TIME", "0", "step", "The initial time for the simulation.");
  write_block(out, "SAVEPER", "1", "step", "The frequency with which output is stored.");
  write_block(out, "TIME STEP", "1", "step", "The time step for the simulation.");
}

std::string dependency_list(const std::vector<std::pair<std::string, Polarity>>& deps) {
  if (deps.empty()) return "A FUNCTION OF( )";
  std::string s = "A FUNCTION OF( ";
  for (std::size_t i = 0; i < deps.size(); ++i) {
    if (i) s += ", ";
    if (deps[i].second == Polarity::negative) s += "-";
    s += quote_name(deps[i].first);
  }
  return s + " )";
}

}  // namespace

std::string export_mdl(const CLD& cld, const MdlOptions& options) {
  std::string out = "{UTF-8}\n";
  for (const auto& node : cld.nodes) {
    std::vector<std::pair<std::string, Polarity>> deps;
    std::string annotations;
    for (const auto& e : cld.edges) {
      if (e.target != node) continue;
      deps.emplace_back(e.source, e.polarity);
      annotations += annotations.empty() ? "; links: " : ", ";
      annotations += quote_name(e.source) + "(" + std::string(to_string(e.polarity)) + "," + std::to_string(e.lag) +
                     "," + format_number(e.strength) + "," + std::string(to_string(e.kind)) + ")";
    }
    write_block(out, quote_name(node), dependency_list(deps), "", "cld variable" + annotations);
  }
  write_control(out, options);
  return out;
}

std::string export_mdl(const SFD& sfd_in, const MdlOptions& options) {
  SFD sfd = sfd_in;
  canonicalize(sfd);

  auto incoming = [&](const std::string& name, std::vector<std::pair<std::string, Polarity>>& deps) {
    std::string annotations;
    for (const auto& l : sfd.links) {
      if (l.target != name) continue;
      deps.emplace_back(l.source, l.polarity);
      annotations += annotations.empty() ? "; links: " : ", ";
      annotations += quote_name(l.source) + "(" + std::string(to_string(l.polarity)) + "," + std::to_string(l.lag) +
                     "," + std::string(to_string(l.kind)) + ")";
    }
    return annotations;
  };

  std::string out = "{UTF-8}\n";
  for (const auto& s : sfd.stocks) {
    std::string rate;
    for (const auto& f : sfd.flows) {
      if (f.inflow_to == s.name) rate += (rate.empty() ? "" : " + ") + quote_name(f.name);
    }
    for (const auto& f : sfd.flows) {
      if (f.outflow_from == s.name) rate += (rate.empty() ? "-" : " - ") + quote_name(f.name);
    }
    if (rate.empty()) rate = "0";
    std::vector<std::pair<std::string, Polarity>> deps;
    const auto ann = incoming(s.name, deps);
    write_block(out, quote_name(s.name), "INTEG( " + rate + " , " + format_number(s.initial_value) + " )", "",
                "stock" + ann);
  }
  for (const auto& f : sfd.flows) {
    std::vector<std::pair<std::string, Polarity>> deps;
    const auto ann = incoming(f.name, deps);
    write_block(out, quote_name(f.name), dependency_list(deps), "", "flow" + ann);
  }
  for (const auto& a : sfd.auxiliaries) {
    std::vector<std::pair<std::string, Polarity>> deps;
    const auto ann = incoming(a, deps);
    write_block(out, quote_name(a), dependency_list(deps), "", "auxiliary" + ann);
  }
  for (const auto& c : sfd.constants) {
    std::vector<std::pair<std::string, Polarity>> deps;
    const auto ann = incoming(c.name, deps);
    write_block(out, quote_name(c.name), format_number(c.value), "", "constant" + ann);
  }
  write_control(out, options);
  return out;
}

std::string export_mdl(const Model& model, const MdlOptions& options) {
  return std::visit([&](const auto& m) { return export_mdl(m, options); }, model);
}

// ---------------------------------------------------------------------------
// reading

namespace {

enum class Tok { name, number, lparen, rparen, comma, plus, minus, semicolon, colon };

struct Token {
  Tok type;
  std::string text;
  double number = 0.0;
  bool quoted = false;
};

[[noreturn]] void unsupported(int line, const std::string& what) {
  throw Error(ErrorCode::UnsupportedConstruct, "line " + std::to_string(line) + ": " + what, std::to_string(line));
}

std::vector<Token> lex(std::string_view s, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '"') {
      std::string name;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        name.push_back(s[i++]);
      }
      if (i >= s.size()) unsupported(line, "unterminated quoted name");
      ++i;
      out.push_back({Tok::name, name, 0.0, true});
      continue;
    }
    if (is_name_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_name_char(s[j])) ++j;
      std::string name(s.substr(i, j - i));
      while (!name.empty() && name.back() == ' ') name.pop_back();
      out.push_back({Tok::name, name});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto res = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (res.ec != std::errc{}) unsupported(line, "bad number");
      const auto consumed = static_cast<std::size_t>(res.ptr - (s.data() + i));
      out.push_back({Tok::number, std::string(s.substr(i, consumed)), v});
      i += consumed;
      continue;
    }
    Tok t;
    switch (c) {
      case '(': t = Tok::lparen; break;
      case ')': t = Tok::rparen; break;
      case ',': t = Tok::comma; break;
      case '+': t = Tok::plus; break;
      case '-': t = Tok::minus; break;
      case ';': t = Tok::semicolon; break;
      case ':': t = Tok::colon; break;
      default: unsupported(line, std::string("unexpected character '") + c + "'");
    }
    out.push_back({t, std::string(1, c)});
    ++i;
  }
  return out;
}

class Cursor {
 public:
  Cursor(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}
  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek() const { return done() ? nullptr : &toks_[pos_]; }
  bool accept(Tok t) {
    if (!done() && toks_[pos_].type == t) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(Tok t, const char* what) {
    if (done() || toks_[pos_].type != t) unsupported(line_, std::string("expected ") + what);
    return toks_[pos_++];
  }
  bool keyword(std::string_view kw) const {
    return !done() && toks_[pos_].type == Tok::name && !toks_[pos_].quoted && toks_[pos_].text == kw;
  }
  int line() const { return line_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

struct LinkNote {
  std::string source;
  Polarity polarity = Polarity::positive;
  int lag = 0;
  double strength = 1.0;
  RelationKind kind = RelationKind::linear;
};

struct Element {
  std::string name;
  int line = 0;
  enum class Form { integ, function_of, number } form = Form::number;
  std::vector<std::pair<std::string, Polarity>> terms;  // INTEG rate or A FUNCTION OF args
  double number = 0.0;                                   // INTEG initial value or constant
  std::string role;                                      // from the comment, may be empty
  std::optional<std::vector<LinkNote>> links;
};

double signed_number(Cursor& cur, const char* what) {
  const bool neg = cur.accept(Tok::minus);
  if (!neg) cur.accept(Tok::plus);
  const double v = cur.expect(Tok::number, what).number;
  return neg ? -v : v;
}

int lag_number(Cursor& cur) {
  const double v = cur.expect(Tok::number, "lag").number;
  if (v < 0 || v != static_cast<double>(static_cast<int>(v))) unsupported(cur.line(), "lag must be a non-negative integer");
  return static_cast<int>(v);
}

void parse_rhs(Cursor& cur, Element& el) {
  if (cur.keyword("INTEG")) {
    cur.expect(Tok::name, "INTEG");
    cur.expect(Tok::lparen, "'('");
    el.form = Element::Form::integ;
    if (cur.peek() && cur.peek()->type == Tok::number) {
      if (cur.expect(Tok::number, "rate").number != 0.0) unsupported(cur.line(), "INTEG rate must name flows");
    } else {
      bool first = true;
      while (true) {
        Polarity p = Polarity::positive;
        if (cur.accept(Tok::minus)) {
          p = Polarity::negative;
        } else if (!cur.accept(Tok::plus) && !first) {
          break;
        }
        el.terms.emplace_back(cur.expect(Tok::name, "flow name").text, p);
        first = false;
      }
    }
    cur.expect(Tok::comma, "',' before initial value");
    el.number = signed_number(cur, "initial value");
    cur.expect(Tok::rparen, "')'");
  } else if (cur.keyword("A FUNCTION OF")) {
    cur.expect(Tok::name, "A FUNCTION OF");
    cur.expect(Tok::lparen, "'('");
    el.form = Element::Form::function_of;
    if (!cur.accept(Tok::rparen)) {
      do {
        Polarity p = cur.accept(Tok::minus) ? Polarity::negative : Polarity::positive;
        el.terms.emplace_back(cur.expect(Tok::name, "argument name").text, p);
      } while (cur.accept(Tok::comma));
      cur.expect(Tok::rparen, "')'");
    }
  } else if (cur.peek() && (cur.peek()->type == Tok::number || cur.peek()->type == Tok::minus ||
                            cur.peek()->type == Tok::plus)) {
    el.form = Element::Form::number;
    el.number = signed_number(cur, "number");
  } else if (cur.peek() && cur.peek()->type == Tok::name) {
    unsupported(cur.line(), "unsupported expression starting with '" + cur.peek()->text + "'");
  } else {
    unsupported(cur.line(), "empty or unsupported expression");
  }
  if (!cur.done()) unsupported(cur.line(), "unexpected trailing tokens after '" + cur.peek()->text + "'");
}

void parse_comment(std::string_view comment, int line, Element& el) {
  std::vector<Token> toks;
  try {
    toks = lex(comment, line);
  } catch (const Error&) {
    return;  // free-text comment from a foreign file
  }
  Cursor cur(std::move(toks), line);
  if (!cur.peek() || cur.peek()->type != Tok::name) return;
  static const std::set<std::string> roles = {"cld variable", "stock", "flow", "auxiliary", "constant"};
  if (!roles.count(cur.peek()->text)) return;
  el.role = cur.expect(Tok::name, "role").text;
  if (!cur.accept(Tok::semicolon)) {
    if (!cur.done()) unsupported(line, "malformed element comment");
    el.links = std::vector<LinkNote>{};
    return;
  }
  if (!cur.keyword("links")) unsupported(line, "expected 'links:' in element comment");
  cur.expect(Tok::name, "links");
  cur.expect(Tok::colon, "':'");
  std::vector<LinkNote> links;
  do {
    LinkNote n;
    n.source = cur.expect(Tok::name, "link source").text;
    cur.expect(Tok::lparen, "'('");
    if (cur.accept(Tok::minus)) {
      n.polarity = Polarity::negative;
    } else {
      cur.expect(Tok::plus, "polarity");
    }
    cur.expect(Tok::comma, "','");
    n.lag = lag_number(cur);
    cur.expect(Tok::comma, "','");
    if (cur.peek() && cur.peek()->type == Tok::number) {
      n.strength = cur.expect(Tok::number, "strength").number;
      cur.expect(Tok::comma, "','");
    }
    n.kind = parse_relation_kind(cur.expect(Tok::name, "relation kind").text);
    cur.expect(Tok::rparen, "')'");
    links.push_back(std::move(n));
  } while (cur.accept(Tok::comma));
  if (!cur.done()) unsupported(line, "trailing text in element comment");
  el.links = std::move(links);
}

// Splits on `sep` outside double quotes; reports the line each piece starts on.
std::vector<std::pair<std::string, int>> split_outside_quotes(std::string_view text, char sep, int first_line) {
  std::vector<std::pair<std::string, int>> parts;
  std::string cur;
  int line = first_line, start_line = first_line;
  bool in_quotes = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '"' && (i == 0 || text[i - 1] != '\\')) in_quotes = !in_quotes;
    if (c == sep && !in_quotes) {
      parts.emplace_back(std::move(cur), start_line);
      cur.clear();
      start_line = line;
      continue;
    }
    if (c == '\n') ++line;
    cur.push_back(c);
  }
  parts.emplace_back(std::move(cur), start_line);
  return parts;
}

int first_content_line(const std::string& s, int line) {
  for (char c : s) {
    if (c == '\n') {
      ++line;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      break;
    }
  }
  return line;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace

Model parse_mdl(std::string_view text) {
  int line = 1;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  if (text.substr(0, 7) == "{UTF-8}") {
    text.remove_prefix(7);
  }
  const auto sketch = text.find("\\\\\\---///");
  if (sketch != std::string_view::npos) text = text.substr(0, sketch);

  static const std::set<std::string> control = {"INITIAL TIME", "FINAL TIME", "TIME STEP", "SAVEPER"};

  std::vector<Element> elements;
  for (const auto& [block, block_line] : split_outside_quotes(text, '|', line)) {
    const auto fields = split_outside_quotes(block, '~', block_line);
    const std::string eq = trim(fields[0].first);
    const int eq_line = first_content_line(fields[0].first, fields[0].second);
    if (eq.empty() || eq.front() == '*') continue;  // trailing whitespace or group marker

    const auto eq_pos = [&]() -> std::size_t {
      bool in_quotes = false;
      for (std::size_t i = 0; i < eq.size(); ++i) {
        if (eq[i] == '"') in_quotes = !in_quotes;
        if (eq[i] == '=' && !in_quotes) return i;
      }
      return std::string::npos;
    }();
    if (eq_pos == std::string::npos) unsupported(eq_line, "equation without '='");

    auto lhs = lex(std::string_view(eq).substr(0, eq_pos), eq_line);
    if (lhs.size() != 1 || lhs[0].type != Tok::name) unsupported(eq_line, "unsupported left-hand side");
    if (!lhs[0].quoted && control.count(lhs[0].text)) continue;

    Element el;
    el.name = lhs[0].text;
    el.line = eq_line;
    Cursor cur(lex(std::string_view(eq).substr(eq_pos + 1), eq_line), eq_line);
    parse_rhs(cur, el);
    if (fields.size() >= 3) parse_comment(trim(fields[2].first), eq_line, el);
    elements.push_back(std::move(el));
  }
  if (elements.empty()) unsupported(line, "no model equations found");

  std::set<std::string> seen;
  for (const auto& el : elements) {
    if (!seen.insert(el.name).second) unsupported(el.line, "element '" + el.name + "' defined twice");
  }

  auto incoming_links = [](const Element& el) {
    std::vector<LinkNote> out;
    if (el.links) return *el.links;
    if (el.form == Element::Form::integ) return out;  // INTEG terms are flow attachments
    for (const auto& [name, pol] : el.terms) out.push_back({name, pol, 0, 1.0, RelationKind::linear});
    return out;
  };

  const bool is_cld = std::any_of(elements.begin(), elements.end(), [](const Element& e) { return e.role == "cld variable"; }) ||
                      std::all_of(elements.begin(), elements.end(), [](const Element& e) {
                        return e.role.empty() && e.form == Element::Form::function_of;
                      });

  if (is_cld) {
    CLD cld;
    for (const auto& el : elements) {
      if (el.form != Element::Form::function_of) unsupported(el.line, "CLD element '" + el.name + "' must be A FUNCTION OF");
      cld.nodes.push_back(el.name);
      for (const auto& n : incoming_links(el)) cld.edges.push_back({n.source, el.name, n.polarity, n.lag, n.strength, n.kind});
    }
    std::sort(cld.nodes.begin(), cld.nodes.end());
    std::sort(cld.edges.begin(), cld.edges.end(), [](const CldEdge& a, const CldEdge& b) {
      return std::tie(a.source, a.target, a.lag) < std::tie(b.source, b.target, b.lag);
    });
    try {
      check_cld(cld);
    } catch (const Error& e) {
      unsupported(1, e.what());
    }
    return cld;
  }

  SFD sfd;
  std::map<std::string, Flow> flows;
  std::set<std::string> flow_names;
  for (const auto& el : elements) {
    if (el.form == Element::Form::integ) {
      for (const auto& [name, pol] : el.terms) flow_names.insert(name);
    }
    if (el.role == "flow") flow_names.insert(el.name);
  }
  for (const auto& el : elements) {
    if (el.form == Element::Form::integ) {
      if (!el.role.empty() && el.role != "stock") unsupported(el.line, "INTEG element '" + el.name + "' marked " + el.role);
      sfd.stocks.push_back({el.name, el.number});
    } else if (flow_names.count(el.name)) {
      if (el.form != Element::Form::function_of) unsupported(el.line, "flow '" + el.name + "' must be A FUNCTION OF");
      flows[el.name] = Flow{el.name, std::nullopt, std::nullopt};
    } else if (el.form == Element::Form::number && el.role != "auxiliary") {
      sfd.constants.push_back({el.name, el.number});
    } else if (el.form == Element::Form::function_of) {
      sfd.auxiliaries.push_back(el.name);
    } else {
      unsupported(el.line, "cannot classify element '" + el.name + "'");
    }
    for (const auto& n : incoming_links(el)) sfd.links.push_back({n.source, el.name, n.polarity, n.lag, n.kind});
  }
  for (const auto& el : elements) {
    if (el.form != Element::Form::integ) continue;
    for (const auto& [name, pol] : el.terms) {
      auto it = flows.find(name);
      if (it == flows.end()) unsupported(el.line, "INTEG of '" + el.name + "' references undeclared flow '" + name + "'");
      auto& slot = pol == Polarity::positive ? it->second.inflow_to : it->second.outflow_from;
      if (slot) unsupported(el.line, "flow '" + name + "' attached twice in the same direction");
      slot = el.name;
    }
  }
  for (auto& [name, f] : flows) sfd.flows.push_back(std::move(f));
  canonicalize(sfd);
  try {
    check_sfd(sfd);
  } catch (const Error& e) {
    unsupported(1, e.what());
  }
  return sfd;
}

}  // namespace pmsd
