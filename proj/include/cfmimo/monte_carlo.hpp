#pragma once

#include <cstdint>

#include "cfmimo/exec.hpp"
#include "cfmimo/sinr.hpp"

namespace cfmimo {

// Sample statistics of the estimate/channel products behind the rate bound.
// gamma_inner and gamma_norm both converge to gamma_{k,m}; a/b/c converge to
// the SinrCoefficients entries, which checks the closed-form grouping of the
// rate denominator against simulation.
struct MonteCarloReport {
  Matrix gamma_inner;       // K x M, mean Re(ghat^H g)
  Matrix gamma_inner_imag;  // K x M, mean Im(ghat^H g) (should vanish)
  Matrix gamma_norm;        // K x M, mean ||ghat||^2
  std::vector<double> a;    // |mean desired term|^2
  Matrix b;                 // diagonal: Var(desired); off-diagonal: E|cross|^2
  std::vector<double> c;    // E|noise term|^2
  std::vector<double> numerator;    // eta_k * a_hat_k
  std::vector<double> denominator;  // sum_j eta_j b_hat_kj + c_hat_k
  std::uint64_t trials = 0;
};

/// Simulates the training phase and the decode-side products per trial.
/// Deterministic for a given seed regardless of Exec: trials are split into
/// fixed blocks whose partial sums are merged in block order.
MonteCarloReport monte_carlo_validate(const NetworkRealization& net,
                                      const SystemConfig& cfg,
                                      const std::vector<double>& eta_ul_mw,
                                      std::uint64_t n_trials, std::uint64_t seed,
                                      Exec exec = Exec::Parallel);

}  // namespace cfmimo
