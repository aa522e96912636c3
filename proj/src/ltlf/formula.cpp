#include "autodistill/ltlf/formula.hpp"

#include <algorithm>
#include <sstream>

namespace autodistill::ltlf {

AtomSet::AtomSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (names_[i].empty())
      throw std::invalid_argument("AtomSet: empty proposition name");
    auto [it, fresh] = index_.emplace(names_[i], i);
    if (!fresh)
      throw std::invalid_argument("AtomSet: duplicate proposition '" +
                                  names_[i] + "'");
  }
  if (names_.size() > 24)
    throw std::invalid_argument("AtomSet: more than 24 propositions");
}

int AtomSet::index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

std::string AtomSet::label_to_string(Label sigma) const {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < size(); ++i) {
    if (sigma & (Label{1} << i)) {
      if (!first) out += ", ";
      out += names_[i];
      first = false;
    }
  }
  return out + "}";
}

namespace {

std::size_t combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula::Formula(Op op, int prop, std::vector<FormulaRef> args)
    : op_(op), prop_(prop), args_(std::move(args)) {
  std::size_t h = combine(static_cast<std::size_t>(op_),
                          static_cast<std::size_t>(prop_ + 1));
  for (const auto& a : args_) h = combine(h, a->hash());
  hash_ = h;
}

int compare(const Formula& a, const Formula& b) {
  if (a.op() != b.op())
    return static_cast<int>(a.op()) < static_cast<int>(b.op()) ? -1 : 1;
  if (a.prop() != b.prop()) return a.prop() < b.prop() ? -1 : 1;
  if (a.args().size() != b.args().size())
    return a.args().size() < b.args().size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    int c = compare(*a.args()[i], *b.args()[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool equal(const FormulaRef& a, const FormulaRef& b) {
  if (a.get() == b.get()) return true;
  if (a->hash() != b->hash()) return false;
  return compare(*a, *b) == 0;
}

FormulaRef Formula::tru() {
  static const FormulaRef t = std::make_shared<Formula>(Op::True, -1,
                                                        std::vector<FormulaRef>{});
  return t;
}

FormulaRef Formula::fls() {
  static const FormulaRef f = std::make_shared<Formula>(Op::False, -1,
                                                        std::vector<FormulaRef>{});
  return f;
}

FormulaRef Formula::prop(int index) {
  if (index < 0) throw std::invalid_argument("Formula::prop: bad index");
  return std::make_shared<Formula>(Op::Prop, index, std::vector<FormulaRef>{});
}

FormulaRef Formula::negate(const FormulaRef& f) {
  switch (f->op()) {
    case Op::True: return fls();
    case Op::False: return tru();
    case Op::Not: return f->arg(0);
    default:
      return std::make_shared<Formula>(Op::Not, -1,
                                       std::vector<FormulaRef>{f});
  }
}

namespace {

// Flatten nested And/Or, fold constants, sort and deduplicate operands.
FormulaRef nary(Op op, std::vector<FormulaRef> fs) {
  const bool is_and = (op == Op::And);
  const Op unit = is_and ? Op::True : Op::False;
  const Op zero = is_and ? Op::False : Op::True;

  std::vector<FormulaRef> flat;
  for (auto& f : fs) {
    if (f->op() == op) {
      for (const auto& k : f->args()) flat.push_back(k);
    } else {
      flat.push_back(std::move(f));
    }
  }
  std::vector<FormulaRef> kept;
  for (auto& f : flat) {
    if (f->op() == zero) return Formula::boolean(!is_and);
    if (f->op() == unit) continue;
    kept.push_back(std::move(f));
  }
  std::sort(kept.begin(), kept.end(),
            [](const FormulaRef& a, const FormulaRef& b) {
              return compare(*a, *b) < 0;
            });
  kept.erase(std::unique(kept.begin(), kept.end(),
                         [](const FormulaRef& a, const FormulaRef& b) {
                           return compare(*a, *b) == 0;
                         }),
             kept.end());
  if (kept.empty()) return Formula::boolean(is_and);
  if (kept.size() == 1) return kept.front();
  return std::make_shared<Formula>(op, -1, std::move(kept));
}

}  // namespace

FormulaRef Formula::conj(std::vector<FormulaRef> fs) {
  return nary(Op::And, std::move(fs));
}
FormulaRef Formula::disj(std::vector<FormulaRef> fs) {
  return nary(Op::Or, std::move(fs));
}
FormulaRef Formula::conj(const FormulaRef& a, const FormulaRef& b) {
  return nary(Op::And, {a, b});
}
FormulaRef Formula::disj(const FormulaRef& a, const FormulaRef& b) {
  return nary(Op::Or, {a, b});
}

FormulaRef Formula::next(const FormulaRef& f) {
  // X False needs a next position satisfying False: equivalent to False.
  if (f->op() == Op::False) return fls();
  return std::make_shared<Formula>(Op::Next, -1, std::vector<FormulaRef>{f});
}

FormulaRef Formula::eventually(const FormulaRef& f) {
  if (f->op() == Op::True || f->op() == Op::False) return f;
  if (f->op() == Op::Eventually) return f;
  return std::make_shared<Formula>(Op::Eventually, -1,
                                   std::vector<FormulaRef>{f});
}

FormulaRef Formula::always(const FormulaRef& f) {
  if (f->op() == Op::True || f->op() == Op::False) return f;
  if (f->op() == Op::Always) return f;
  return std::make_shared<Formula>(Op::Always, -1,
                                   std::vector<FormulaRef>{f});
}

FormulaRef Formula::until(const FormulaRef& a, const FormulaRef& b) {
  if (b->op() == Op::True) return tru();
  if (b->op() == Op::False) return fls();
  if (a->op() == Op::False) return b;
  if (a->op() == Op::True) return eventually(b);
  if (compare(*a, *b) == 0) return b;
  return std::make_shared<Formula>(Op::Until, -1,
                                   std::vector<FormulaRef>{a, b});
}

FormulaRef Formula::release(const FormulaRef& a, const FormulaRef& b) {
  if (b->op() == Op::True) return tru();
  if (a->op() == Op::True) return b;
  if (a->op() == Op::False) return always(b);
  if (compare(*a, *b) == 0) return b;
  return std::make_shared<Formula>(Op::Release, -1,
                                   std::vector<FormulaRef>{a, b});
}

namespace {

// Precedence: atoms > unary > U/R > And > Or.
int prec(Op op) {
  switch (op) {
    case Op::Or: return 0;
    case Op::And: return 1;
    case Op::Until:
    case Op::Release: return 2;
    default: return 3;
  }
}

void print(const FormulaRef& f, const AtomSet& atoms, int parent_prec,
           std::string& out) {
  const int p = prec(f->op());
  const bool paren = p < parent_prec;
  if (paren) out += '(';
  switch (f->op()) {
    case Op::True: out += "true"; break;
    case Op::False: out += "false"; break;
    case Op::Prop: out += atoms.name(f->prop()); break;
    case Op::Not:
      out += '!';
      print(f->arg(0), atoms, 3, out);
      break;
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      out += (f->op() == Op::Next ? "X " : f->op() == Op::Eventually ? "F "
                                                                     : "G ");
      print(f->arg(0), atoms, 3, out);
      break;
    case Op::Until:
    case Op::Release:
      print(f->arg(0), atoms, p + 1, out);
      out += (f->op() == Op::Until ? " U " : " R ");
      print(f->arg(1), atoms, p + 1, out);
      break;
    case Op::And:
    case Op::Or: {
      const char* sep = (f->op() == Op::And) ? " & " : " | ";
      for (std::size_t i = 0; i < f->args().size(); ++i) {
        if (i) out += sep;
        print(f->args()[i], atoms, p + 1, out);
      }
      break;
    }
  }
  if (paren) out += ')';
}

}  // namespace

std::string to_string(const FormulaRef& f, const AtomSet& atoms) {
  std::string out;
  print(f, atoms, 0, out);
  return out;
}

}  // namespace autodistill::ltlf
