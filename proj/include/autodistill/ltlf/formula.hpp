#ifndef AUTODISTILL_LTLF_FORMULA_HPP
#define AUTODISTILL_LTLF_FORMULA_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace autodistill::ltlf {

/// A label is a truth assignment over the atom set, bit i = atom i.
using Label = std::uint32_t;

/// Ordered set of atomic propositions. The ordering is fixed at
/// construction and determines the bit encoding of labels.
class AtomSet {
 public:
  explicit AtomSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  /// Index of a proposition name, or -1 if unknown.
  int index(const std::string& name) const;

  /// Renders a label as "{a, c}".
  std::string label_to_string(Label sigma) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

enum class Op {
  True,
  False,
  Prop,
  Not,
  And,
  Or,
  Next,
  Eventually,
  Always,
  Until,
  Release
};

class Formula;
using FormulaRef = std::shared_ptr<const Formula>;

/// Immutable LTL_f syntax tree node. Built through the static factories,
/// which apply a fixed set of canonical simplifications (constant folding,
/// double negation, idempotence, flattened and sorted commutative
/// operands) so that progression residuals deduplicate deterministically.
class Formula {
 public:
  Op op() const { return op_; }
  int prop() const { return prop_; }
  const std::vector<FormulaRef>& args() const { return args_; }
  const FormulaRef& arg(int i) const { return args_.at(i); }
  std::size_t hash() const { return hash_; }

  static FormulaRef tru();
  static FormulaRef fls();
  static FormulaRef boolean(bool b) { return b ? tru() : fls(); }
  static FormulaRef prop(int index);
  static FormulaRef negate(const FormulaRef& f);
  static FormulaRef conj(std::vector<FormulaRef> fs);
  static FormulaRef disj(std::vector<FormulaRef> fs);
  static FormulaRef conj(const FormulaRef& a, const FormulaRef& b);
  static FormulaRef disj(const FormulaRef& a, const FormulaRef& b);
  static FormulaRef next(const FormulaRef& f);
  static FormulaRef eventually(const FormulaRef& f);
  static FormulaRef always(const FormulaRef& f);
  static FormulaRef until(const FormulaRef& a, const FormulaRef& b);
  static FormulaRef release(const FormulaRef& a, const FormulaRef& b);

  Formula(Op op, int prop, std::vector<FormulaRef> args);

 private:
  Op op_;
  int prop_;  // valid only for Op::Prop
  std::vector<FormulaRef> args_;
  std::size_t hash_;
};

/// Total structural order; 0 on equality. Used for canonical operand
/// ordering and for formula-keyed maps.
int compare(const Formula& a, const Formula& b);
bool equal(const FormulaRef& a, const FormulaRef& b);

std::string to_string(const FormulaRef& f, const AtomSet& atoms);

struct FormulaHash {
  std::size_t operator()(const FormulaRef& f) const { return f->hash(); }
};
struct FormulaEq {
  bool operator()(const FormulaRef& a, const FormulaRef& b) const {
    return equal(a, b);
  }
};

}  // namespace autodistill::ltlf

#endif
