#pragma once

#include <span>

#include "pmuplace/separation.hpp"

namespace pmuplace::lp {

class LpFailure : public Error {
  public:
    using Error::Error;
};

struct RelaxationResult {
    // Certified upper bound (power domain) on the constrained selection IP:
    // the objective of an explicitly feasible dual point, so it stays a
    // valid bound even under floating-point slop in the simplex itself.
    double upper_power = 0.0;
    Eigen::VectorXd w;  // one optimal fractional selection vector, size n_buses
    int iterations = 0;
};

// Solves  max t  s.t.  w^T Theta_col >= t for every column,
//                      sum w = M, 0 <= w <= 1,
//                      w fixed to 1 on fixed_one and to 0 on fixed_zero,
// via the dual linear program (basis size |free| + 1 <= N + 1), which the
// revised simplex below handles in a few dozen pivots at these sizes.
//
// Contract: constraint violation of the returned w <= 1e-8, relative
// optimality gap of the bound <= 1e-9. Throws LpFailure on non-convergence
// (never silently bounds).
RelaxationResult solve_relaxation(const ThetaMatrix& theta, int m_target,
                                  std::span<const int> fixed_one, std::span<const int> fixed_zero);

}  // namespace pmuplace::lp
