#include "fvp/theory_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fvp {

EDown TheorySpec::edown() const {
  std::set<SymbolId> ac;
  for (SymbolId f = 0; f < sig.size(); ++f)
    if (sig.symbol(f).ac) ac.insert(f);
  return EDown(ac);
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

struct TermParser {
  const std::string& text;
  const Signature& sig;
  std::map<std::string, VarId>& vars;
  size_t pos = 0;
  size_t line;

  TermParser(const std::string& t, const Signature& s,
             std::map<std::string, VarId>& v, size_t line_no)
      : text(t), sig(s), vars(v), line(line_no) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, line, pos + 1);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  // longest declared symbol name starting at pos (for operator-like names)
  std::optional<SymbolId> match_symbol() {
    size_t best_len = 0;
    std::optional<SymbolId> best;
    for (SymbolId f = 0; f < sig.size(); ++f) {
      const std::string& n = sig.symbol(f).name;
      if (n.size() > best_len && text.compare(pos, n.size(), n) == 0) {
        // identifier-like names must not run into a longer identifier
        if (ident_start(n[0]) && pos + n.size() < text.size() &&
            ident_char(text[pos + n.size()]))
          continue;
        best_len = n.size();
        best = f;
      }
    }
    if (best) pos += best_len;
    return best;
  }

  Term parse() {
    Term t = parse_infix();
    if (!at_end()) fail("trailing input after term");
    return t;
  }

  Term parse_infix() {
    Term lhs = parse_primary();
    std::optional<SymbolId> chain_op;
    while (true) {
      skip_ws();
      if (pos >= text.size() || text[pos] == ')' || text[pos] == ',') break;
      size_t save = pos;
      auto op = match_symbol();
      if (!op) fail("expected infix operator or end of term");
      if (sig.symbol(*op).arity != 2) {
        pos = save;
        fail("symbol '" + sig.symbol(*op).name + "' used infix but not binary");
      }
      if (chain_op && *chain_op != *op)
        fail("mixing infix operators requires parentheses");
      chain_op = *op;
      Term rhs = parse_primary();
      lhs = Term::app(*op, {lhs, rhs});
    }
    return lhs;
  }

  Term parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of term");
    if (text[pos] == '(') {
      ++pos;
      Term t = parse_infix();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
      ++pos;
      return t;
    }
    size_t save = pos;
    auto symbol = match_symbol();
    if (symbol) {
      skip_ws();
      const Symbol& s = sig.symbol(*symbol);
      if (pos < text.size() && text[pos] == '(') {
        ++pos;
        std::vector<Term> args;
        skip_ws();
        if (pos < text.size() && text[pos] == ')') {
          ++pos;
        } else {
          while (true) {
            args.push_back(parse_infix());
            skip_ws();
            if (pos < text.size() && text[pos] == ',') {
              ++pos;
              continue;
            }
            if (pos < text.size() && text[pos] == ')') {
              ++pos;
              break;
            }
            fail("expected ',' or ')'");
          }
        }
        if (args.size() != s.arity)
          fail("symbol '" + s.name + "' expects " + std::to_string(s.arity) +
               " arguments, got " + std::to_string(args.size()));
        return Term::app(*symbol, std::move(args));
      }
      if (s.arity != 0) {
        // bare non-constant symbol: only valid as infix, handled by caller
        pos = save;
      } else {
        return Term::app(*symbol, {});
      }
    }
    if (ident_start(text[pos])) {
      size_t start = pos;
      while (pos < text.size() && ident_char(text[pos])) ++pos;
      std::string name = text.substr(start, pos - start);
      skip_ws();
      if (pos < text.size() && text[pos] == '(')
        fail("undeclared symbol '" + name + "'");
      if (sig.find(name))
        fail("symbol '" + name + "' expects arguments");
      auto it = vars.find(name);
      if (it == vars.end())
        it = vars.emplace(name, static_cast<VarId>(vars.size())).first;
      return Term::var(it->second);
    }
    fail("unexpected character '" + std::string(1, text[pos]) + "'");
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  size_t h = s.find('#');
  return h == std::string::npos ? s : s.substr(0, h);
}

void parse_symbols_line(const std::string& body, size_t line_no,
                        Signature& sig) {
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    bool ac = false;
    size_t br = item.find('[');
    if (br != std::string::npos) {
      std::string flag = trim(item.substr(br));
      item = trim(item.substr(0, br));
      std::string upper;
      for (char c : flag)
        upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (upper == "[AC]") {
        ac = true;
      } else if (upper == "[A]" || upper == "[C]") {
        throw ParseError(
            "associative-only and commutative-only symbols are not supported; "
            "only [AC] is",
            line_no, 1);
      } else {
        throw ParseError("unknown symbol flag " + flag, line_no, 1);
      }
    }
    size_t slash = item.rfind('/');
    if (slash == std::string::npos)
      throw ParseError("expected name/arity in symbol declaration '" + item + "'",
                       line_no, 1);
    std::string name = trim(item.substr(0, slash));
    std::string arity_s = trim(item.substr(slash + 1));
    if (name.empty()) throw ParseError("empty symbol name", line_no, 1);
    if (name == "a_min")
      throw ParseError("'a_min' is reserved", line_no, 1);
    uint32_t arity = 0;
    try {
      arity = static_cast<uint32_t>(std::stoul(arity_s));
    } catch (...) {
      throw ParseError("bad arity '" + arity_s + "'", line_no, 1);
    }
    if (ac && arity != 2)
      throw ParseError("AC symbol '" + name + "' must have arity 2, got " +
                           arity_s,
                       line_no, 1);
    try {
      sig.add(name, arity, ac);
    } catch (const SignatureError& e) {
      throw ParseError(e.what(), line_no, 1);
    }
  }
}

}  // namespace

Term parse_term(const std::string& text, const Signature& sig,
                std::map<std::string, VarId>& names) {
  TermParser p(text, sig, names, 0);
  return p.parse();
}

TheorySpec parse_theory(const std::string& text) {
  TheorySpec spec;
  enum Section { None, Symbols, Equations, Rdown };
  Section cur = None;
  std::istringstream in(text);
  std::string raw;
  size_t line_no = 0;
  std::vector<std::pair<size_t, std::string>> eq_lines, rd_lines;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    auto starts = [&](const char* kw) {
      return line.rfind(kw, 0) == 0;
    };
    if (starts("symbols:")) {
      cur = Symbols;
      parse_symbols_line(trim(line.substr(8)), line_no, spec.sig);
      continue;
    }
    if (starts("equations:")) {
      cur = Equations;
      std::string rest = trim(line.substr(10));
      if (!rest.empty()) eq_lines.emplace_back(line_no, rest);
      continue;
    }
    if (starts("rdown:")) {
      cur = Rdown;
      std::string rest = trim(line.substr(6));
      if (!rest.empty()) rd_lines.emplace_back(line_no, rest);
      continue;
    }
    if (starts("order:")) {
      std::string v = trim(line.substr(6));
      if (v == "count")
        spec.order_kind = OrderSpec::CountOrder;
      else if (v == "composed")
        spec.order_kind = OrderSpec::ComposedOrder;
      else
        throw ParseError("unknown order '" + v + "'", line_no, 1);
      continue;
    }
    switch (cur) {
      case Symbols:
        parse_symbols_line(line, line_no, spec.sig);
        break;
      case Equations:
        eq_lines.emplace_back(line_no, line);
        break;
      case Rdown:
        rd_lines.emplace_back(line_no, line);
        break;
      case None:
        throw ParseError("content before any section header", line_no, 1);
    }
  }
  if (spec.sig.size() == 0)
    throw ParseError("no symbols declared", line_no, 1);

  for (auto& [ln, body] : eq_lines) {
    size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'lhs = rhs'", ln, 1);
    TermParser lp(trim(body.substr(0, eq)), spec.sig, spec.var_names, ln);
    Term lhs = lp.parse();
    TermParser rp(trim(body.substr(eq + 1)), spec.sig, spec.var_names, ln);
    Term rhs = rp.parse();
    auto lv = vars_of(lhs);
    auto rv = vars_of(rhs);
    if (lv != rv)
      spec.warnings.push_back(
          "equation at line " + std::to_string(ln) +
          " is not regular (variable sets differ); no terminating rewrite "
          "system can exist for a non-regular theory");
    spec.equations.emplace_back(std::move(lhs), std::move(rhs));
  }
  for (auto& [ln, body] : rd_lines) {
    size_t arr = body.find("->");
    if (arr == std::string::npos)
      throw ParseError("expected 'lhs -> rhs'", ln, 1);
    TermParser lp(trim(body.substr(0, arr)), spec.sig, spec.var_names, ln);
    Term lhs = lp.parse();
    TermParser rp(trim(body.substr(arr + 2)), spec.sig, spec.var_names, ln);
    Term rhs = rp.parse();
    spec.rdown.add(RewriteRule(std::move(lhs), std::move(rhs), RuleOrigin::Rdown));
  }
  return spec;
}

TheorySpec parse_theory_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_theory(ss.str());
}

std::string to_prefix(const Term& t, const Signature& sig) {
  if (t.is_var()) return "x" + std::to_string(t.var_id());
  if (t.is_name()) return "@n" + std::to_string(t.name_id());
  std::string s = sig.symbol(t.sym()).name;
  if (t.children().empty()) return s;
  s += "(";
  for (size_t i = 0; i < t.children().size(); ++i) {
    if (i) s += ",";
    s += to_prefix(t.children()[i], sig);
  }
  s += ")";
  return s;
}

namespace {

const char* origin_name(RuleOrigin o) {
  switch (o) {
    case RuleOrigin::User: return "user";
    case RuleOrigin::Generated: return "generated";
    case RuleOrigin::Rdown: return "rdown";
    case RuleOrigin::Identity: return "identity";
  }
  return "generated";
}

RuleOrigin origin_from(const std::string& s) {
  if (s == "user") return RuleOrigin::User;
  if (s == "rdown") return RuleOrigin::Rdown;
  if (s == "identity") return RuleOrigin::Identity;
  return RuleOrigin::Generated;
}

nlohmann::json rules_json(const RewriteSystem& rs, const Signature& sig) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RewriteRule& r : rs.rules()) {
    arr.push_back({{"lhs", to_prefix(r.lhs, sig)},
                   {"rhs", to_prefix(r.rhs, sig)},
                   {"origin", origin_name(r.origin)}});
  }
  return arr;
}

}  // namespace

std::string serialize_result(const GenerationResult& res,
                             const TheorySpec& spec) {
  nlohmann::json doc;
  nlohmann::json syms = nlohmann::json::array();
  for (SymbolId f = 0; f < spec.sig.size(); ++f) {
    const Symbol& s = spec.sig.symbol(f);
    syms.push_back({{"name", s.name}, {"arity", s.arity}, {"ac", s.ac}});
  }
  doc["symbols"] = syms;
  doc["order"] =
      spec.order_kind == OrderSpec::CountOrder ? "count" : "composed";
  doc["status"] =
      res.status == GenStatus::Completed ? "completed" : "inconclusive";
  if (!res.reason.empty()) doc["reason"] = res.reason;
  doc["rules"] = rules_json(res.final_r, spec.sig);
  doc["rdown"] = rules_json(res.final_rdown, spec.sig);
  doc["stats"] = {{"generated", res.stats.rules_generated_total},
                  {"final", res.stats.final_count},
                  {"restarts", res.stats.restarts},
                  {"convergent", res.stats.convergent},
                  {"wall_seconds", res.stats.wall_seconds}};
  return doc.dump(2);
}

std::string result_listing(const GenerationResult& res,
                           const TheorySpec& spec) {
  std::ostringstream out;
  out << (res.status == GenStatus::Completed ? "completed" : "inconclusive");
  if (!res.reason.empty()) out << " (" << res.reason << ")";
  out << "\n";
  out << "rules (" << res.final_r.size() << "):\n";
  for (const RewriteRule& r : res.final_r.rules())
    out << "  " << to_string(r.lhs, spec.sig) << " -> "
        << to_string(r.rhs, spec.sig) << "\n";
  out << "rdown (" << res.final_rdown.size() << "):\n";
  for (const RewriteRule& r : res.final_rdown.rules())
    out << "  " << to_string(r.lhs, spec.sig) << " -> "
        << to_string(r.rhs, spec.sig) << "\n";
  out << "generated: " << res.stats.rules_generated_total
      << ", restarts: " << res.stats.restarts << ", convergent: "
      << (res.stats.convergent ? "yes" : "no") << "\n";
  return out.str();
}

LoadedTheory parse_rwth(const std::string& json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text);
  LoadedTheory out;
  RewriteTheory& th = out.theory;
  for (const auto& s : doc.at("symbols")) {
    std::string name = s.at("name").get<std::string>();
    if (name == "a_min") {
      th.sig.ensure_min_constant();
      continue;
    }
    th.sig.add(name, s.at("arity").get<uint32_t>(), s.at("ac").get<bool>());
  }
  std::set<SymbolId> ac;
  for (SymbolId f = 0; f < th.sig.size(); ++f)
    if (th.sig.symbol(f).ac) ac.insert(f);
  th.edown = EDown(ac);
  th.order_kind = doc.value("order", std::string("count")) == "composed"
                      ? OrderSpec::ComposedOrder
                      : OrderSpec::CountOrder;
  std::map<std::string, VarId> names;
  auto load_rules = [&](const char* key, RewriteSystem& rs) {
    if (!doc.contains(key)) return;
    for (const auto& r : doc.at(key)) {
      names.clear();
      Term lhs = parse_term(r.at("lhs").get<std::string>(), th.sig, names);
      Term rhs = parse_term(r.at("rhs").get<std::string>(), th.sig, names);
      rs.add(RewriteRule(std::move(lhs), std::move(rhs),
                         origin_from(r.value("origin", "generated"))));
    }
  };
  load_rules("rules", th.r);
  load_rules("rdown", th.rdown);
  out.status = doc.value("status", std::string("completed")) == "completed"
                   ? GenStatus::Completed
                   : GenStatus::Inconclusive;
  out.reason = doc.value("reason", std::string());
  if (doc.contains("stats")) {
    auto& st = doc.at("stats");
    out.stats.rules_generated_total = st.value("generated", 0ull);
    out.stats.final_count = st.value("final", 0ull);
    out.stats.restarts = st.value("restarts", 0ull);
    out.stats.convergent = st.value("convergent", false);
    out.stats.wall_seconds = st.value("wall_seconds", 0.0);
  }
  return out;
}

LoadedTheory parse_rwth_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_rwth(ss.str());
}

}  // namespace fvp
