#pragma once

#include <vector>

#include "cfmimo/sinr.hpp"

namespace cfmimo {

struct SolverOptions {
  double sca_rel_tol = 1e-6;        // outer stop on relative objective change
  int sca_max_outer = 200;
  double inner_pg_tol = 1e-8;       // projected-gradient norm, log2 scale
  int inner_max_iters = 2000;
  double maxmin_rel_tol = 1e-6;     // bisection bracket width, relative
  int maxmin_max_bisect = 200;
  double fixed_point_tol = 1e-12;   // sup-norm change, relative to p_max
  int fixed_point_max_iters = 10000;
};

struct SolverReport {
  std::vector<double> powers_mw;
  double objective_bps = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace_bps;  // non-decreasing
};

/// Every user at its own cap.
std::vector<double> uniform_allocation(const SystemConfig& cfg);

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> minimal_eta_mw;  // componentwise minimal fixed point
  int iterations = 0;
};

/// Can every user reach SINR target t under the power caps? Iterates the
/// standard interference map from zero; the fixed point is componentwise
/// minimal among feasible vectors.
FeasibilityResult maxmin_feasibility(double sinr_target, const SinrCoefficients& co,
                                     const SystemConfig& cfg,
                                     const SolverOptions& opt = {});

/// Max-min rate via bisection on the common SINR target. At the returned
/// point all SINRs agree within ~1e-9 relative.
SolverReport solve_maxmin(const SinrCoefficients& co, const SystemConfig& cfg,
                          const SolverOptions& opt = {});

/// Sum-rate via successive lower-bound maximization: the objective is an
/// exact difference of concave functions of eta; each outer iteration
/// linearizes the subtracted term and maximizes the concave surrogate over
/// the box by projected gradient ascent with Armijo backtracking. Monotone
/// ascent from the uniform allocation.
SolverReport solve_sumrate_sca(const SinrCoefficients& co, const SystemConfig& cfg,
                               const SolverOptions& opt = {});

}  // namespace cfmimo
