#pragma once

#include "sdt/density.hpp"
#include "sdt/model.hpp"
#include "sdt/tuning.hpp"

namespace sdt {

// Pointwise contribution to S at densities (g, f), before any quadrature
// weight.  Encodes the generic branch, the A=0 / B=0 limiting branches, and
// the zero-density edge rules; throws EvaluationError when the contribution
// genuinely diverges at the point.
double s_divergence_term(double g_val, double f_val, const TuningParams& tp);

// S(g, f) between two nonparametric representations.  Discrete tables are
// aligned on the union of their supports (absent points carry mass zero);
// grid functions must share the same grid.
double s_divergence(const DensityRep& g, const DensityRep& f, const TuningParams& tp);

// S(f_theta1, f_theta2) within a parametric family.  Uses the model's closed
// form when available, otherwise quadrature (continuous) or summation over
// the truncated support (discrete).
double s_divergence_between_members(const ParametricModel& model, const VectorXd& theta1,
                                    const VectorXd& theta2, const TuningParams& tp);

// Same, but evaluating the densities directly even when a closed-form hook is
// present (used to cross-check hooks in tests).
double s_divergence_between_members_quadrature(const ParametricModel& model,
                                               const VectorXd& theta1,
                                               const VectorXd& theta2,
                                               const TuningParams& tp);

}  // namespace sdt
