#ifndef AUTODISTILL_LTLF_PROGRESSION_HPP
#define AUTODISTILL_LTLF_PROGRESSION_HPP

#include "autodistill/ltlf/formula.hpp"

namespace autodistill::ltlf {

/// Residual obligation after consuming one label, assuming at least one
/// more label follows. Residuals come back in canonical simplified form.
FormulaRef progress(const FormulaRef& f, Label sigma);

/// Truth of f when sigma is the final label of the trace.
bool holds_at_end(const FormulaRef& f, Label sigma);

/// Truth of f on the empty trace (diagnostic convention: propositions and
/// strong operators X, F, U are false; G and R are true).
bool holds_on_empty(const FormulaRef& f);

}  // namespace autodistill::ltlf

#endif
