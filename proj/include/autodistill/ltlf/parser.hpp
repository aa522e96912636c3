#ifndef AUTODISTILL_LTLF_PARSER_HPP
#define AUTODISTILL_LTLF_PARSER_HPP

#include <stdexcept>
#include <string>

#include "autodistill/ltlf/formula.hpp"

namespace autodistill::ltlf {

struct ParseError : std::runtime_error {
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("syntax error at line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct UnknownPropositionError : std::runtime_error {
  UnknownPropositionError(int line, int column, const std::string& name)
      : std::runtime_error("unknown proposition '" + name + "' at line " +
                           std::to_string(line) + ", column " +
                           std::to_string(column)),
        line(line),
        column(column),
        name(name) {}
  int line;
  int column;
  std::string name;
};

// Grammar (EBNF), tightest binding first:
//   atom    = ident | "true" | "false" | "(" formula ")" ;
//   unary   = ("!" | "X" | "F" | "G") unary | atom ;
//   temporal= unary [ ("U" | "R") temporal ] ;        (right-associative)
//   conj    = temporal { "&" temporal } ;
//   formula = conj { "|" conj } ;
// Identifiers match [A-Za-z_][A-Za-z0-9_]* and must not collide with the
// reserved operator letters X, F, G, U, R or the keywords true/false.
FormulaRef parse(const std::string& text, const AtomSet& atoms);

}  // namespace autodistill::ltlf

#endif
