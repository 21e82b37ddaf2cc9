#pragma once

#include <iosfwd>

#include "fvp/saturate.hpp"
#include "fvp/variant.hpp"

namespace fvp {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, size_t line, size_t col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  size_t line, col;
};

/// Parsed .eqth input: signature, equations, optional rdown, order hint.
struct TheorySpec {
  Signature sig;
  std::vector<std::pair<Term, Term>> equations;
  RewriteSystem rdown;
  OrderSpec::Kind order_kind = OrderSpec::CountOrder;
  std::vector<std::string> warnings;  // e.g. non-regular equations
  std::map<std::string, VarId> var_names;

  EDown edown() const;
};

TheorySpec parse_theory(const std::string& text);
TheorySpec parse_theory_file(const std::string& path);

/// Parses one term against a signature. Identifiers that are not declared
/// symbols are variables; `names` accumulates their ids across calls.
Term parse_term(const std::string& text, const Signature& sig,
                std::map<std::string, VarId>& names);

/// Prefix form with explicit binary trees, parseable by parse_term.
std::string to_prefix(const Term& t, const Signature& sig);

/// Serialized generation result (.rwth document).
std::string serialize_result(const GenerationResult& res,
                             const TheorySpec& spec);
std::string result_listing(const GenerationResult& res,
                           const TheorySpec& spec);

/// Loads a .rwth document back into a usable theory (Ea = E-down).
struct LoadedTheory {
  RewriteTheory theory;
  GenStatus status = GenStatus::Completed;
  std::string reason;
  GenerationStats stats;
};
LoadedTheory parse_rwth(const std::string& json_text);
LoadedTheory parse_rwth_file(const std::string& path);

}  // namespace fvp
