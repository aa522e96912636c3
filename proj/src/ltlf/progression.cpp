#include "autodistill/ltlf/progression.hpp"

namespace autodistill::ltlf {

FormulaRef progress(const FormulaRef& f, Label sigma) {
  switch (f->op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Prop:
      return Formula::boolean(sigma & (Label{1} << f->prop()));
    case Op::Not:
      return Formula::negate(progress(f->arg(0), sigma));
    case Op::And: {
      std::vector<FormulaRef> parts;
      parts.reserve(f->args().size());
      for (const auto& k : f->args()) parts.push_back(progress(k, sigma));
      return Formula::conj(std::move(parts));
    }
    case Op::Or: {
      std::vector<FormulaRef> parts;
      parts.reserve(f->args().size());
      for (const auto& k : f->args()) parts.push_back(progress(k, sigma));
      return Formula::disj(std::move(parts));
    }
    case Op::Next:
      return f->arg(0);
    case Op::Eventually:
      return Formula::disj(progress(f->arg(0), sigma), f);
    case Op::Always:
      return Formula::conj(progress(f->arg(0), sigma), f);
    case Op::Until:
      // a U b  ->  b' | (a' & a U b)
      return Formula::disj(
          progress(f->arg(1), sigma),
          Formula::conj(progress(f->arg(0), sigma), f));
    case Op::Release:
      // a R b  ->  b' & (a' | a R b)
      return Formula::conj(
          progress(f->arg(1), sigma),
          Formula::disj(progress(f->arg(0), sigma), f));
  }
  throw std::logic_error("progress: unhandled op");
}

bool holds_at_end(const FormulaRef& f, Label sigma) {
  switch (f->op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Prop: return sigma & (Label{1} << f->prop());
    case Op::Not: return !holds_at_end(f->arg(0), sigma);
    case Op::And:
      for (const auto& k : f->args())
        if (!holds_at_end(k, sigma)) return false;
      return true;
    case Op::Or:
      for (const auto& k : f->args())
        if (holds_at_end(k, sigma)) return true;
      return false;
    case Op::Next: return false;  // no next position
    case Op::Eventually:
    case Op::Always:
      return holds_at_end(f->arg(0), sigma);
    case Op::Until:
    case Op::Release:
      return holds_at_end(f->arg(1), sigma);
  }
  throw std::logic_error("holds_at_end: unhandled op");
}

bool holds_on_empty(const FormulaRef& f) {
  switch (f->op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Prop: return false;
    case Op::Not: return !holds_on_empty(f->arg(0));
    case Op::And:
      for (const auto& k : f->args())
        if (!holds_on_empty(k)) return false;
      return true;
    case Op::Or:
      for (const auto& k : f->args())
        if (holds_on_empty(k)) return true;
      return false;
    case Op::Next:
    case Op::Eventually:
    case Op::Until:
      return false;
    case Op::Always:
    case Op::Release:
      return true;
  }
  throw std::logic_error("holds_on_empty: unhandled op");
}

}  // namespace autodistill::ltlf
