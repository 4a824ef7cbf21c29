#include "cfmimo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfmimo {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::vector<double> power_caps(const SystemConfig& cfg) {
  std::vector<double> caps(static_cast<std::size_t>(cfg.num_users));
  for (int k = 0; k < cfg.num_users; ++k) caps[static_cast<std::size_t>(k)] = cfg.p_max_of(k);
  return caps;
}

double max_cap(const std::vector<double>& caps) {
  return *std::max_element(caps.begin(), caps.end());
}

// Interference-plus-noise denominator of user k at eta.
double denom_at(const SinrCoefficients& co, const std::vector<double>& eta, int k) {
  const double* row = co.b.row(static_cast<std::size_t>(k));
  double d = co.c[static_cast<std::size_t>(k)];
  for (std::size_t j = 0; j < eta.size(); ++j) d += eta[j] * row[j];
  return d;
}

// Sum-rate objective without the bit/s prefactor:
//   sum_k log2(a_k eta_k + D_k(eta)) - log2(D_k(eta))
double sumrate_log2(const SinrCoefficients& co, const std::vector<double>& eta) {
  double f = 0.0;
  for (int k = 0; k < co.num_users(); ++k) {
    const double d = denom_at(co, eta, k);
    f += std::log2(co.a[static_cast<std::size_t>(k)] * eta[static_cast<std::size_t>(k)] + d) -
         std::log2(d);
  }
  return f;
}

}  // namespace

std::vector<double> uniform_allocation(const SystemConfig& cfg) {
  return power_caps(cfg);
}

FeasibilityResult maxmin_feasibility(double sinr_target, const SinrCoefficients& co,
                                     const SystemConfig& cfg, const SolverOptions& opt) {
  if (sinr_target < 0.0)
    throw std::invalid_argument("maxmin_feasibility: target must be non-negative");
  const int k_users = co.num_users();
  const auto caps = power_caps(cfg);

  FeasibilityResult res;
  res.minimal_eta_mw.assign(static_cast<std::size_t>(k_users), 0.0);
  if (sinr_target == 0.0) {
    res.feasible = true;
    return res;
  }

  const double stop = opt.fixed_point_tol * max_cap(caps);
  std::vector<double> next(static_cast<std::size_t>(k_users));
  for (int it = 1; it <= opt.fixed_point_max_iters; ++it) {
    double delta = 0.0;
    for (int k = 0; k < k_users; ++k) {
      const double need =
          sinr_target * denom_at(co, res.minimal_eta_mw, k) / co.a[static_cast<std::size_t>(k)];
      next[static_cast<std::size_t>(k)] = std::min(caps[static_cast<std::size_t>(k)], need);
    }
    for (int k = 0; k < k_users; ++k) {
      // Standard interference map: iterates from zero never decrease.
      if (next[static_cast<std::size_t>(k)] < res.minimal_eta_mw[static_cast<std::size_t>(k)])
        throw std::logic_error("maxmin_feasibility: non-monotone iterate");
      delta = std::max(delta, next[static_cast<std::size_t>(k)] -
                                  res.minimal_eta_mw[static_cast<std::size_t>(k)]);
    }
    res.minimal_eta_mw = next;
    res.iterations = it;
    if (delta < stop) break;
  }

  res.feasible = true;
  const auto sinr = sinr_values(res.minimal_eta_mw, co);
  for (double s : sinr)
    if (s < sinr_target * (1.0 - 1e-9)) res.feasible = false;
  return res;
}

SolverReport solve_maxmin(const SinrCoefficients& co, const SystemConfig& cfg,
                          const SolverOptions& opt) {
  const int k_users = co.num_users();
  for (int k = 0; k < k_users; ++k) {
    if (co.a[static_cast<std::size_t>(k)] <= 0.0)
      throw std::invalid_argument("solve_maxmin: degenerate coefficients (a_k = 0)");
    if (co.c[static_cast<std::size_t>(k)] <= 0.0)
      throw std::invalid_argument("solve_maxmin: degenerate coefficients (c_k = 0)");
  }
  const auto caps = power_caps(cfg);
  const double pref = cfg.rate_prefactor();

  // Uniform power is always feasible at its own worst SINR, which seeds the
  // lower bracket; the interference-free bound seeds the upper one.
  const auto uni_sinr = sinr_values(caps, co);
  double t_lo = *std::min_element(uni_sinr.begin(), uni_sinr.end());
  double t_hi = caps[0] * co.a[0] / co.c[0];
  for (int k = 1; k < k_users; ++k)
    t_hi = std::min(t_hi, caps[static_cast<std::size_t>(k)] * co.a[static_cast<std::size_t>(k)] /
                              co.c[static_cast<std::size_t>(k)]);

  SolverReport rep;
  auto lo_fp = maxmin_feasibility(t_lo, co, cfg, opt);
  if (!lo_fp.feasible) {  // cannot happen mathematically; keep a safe fallback
    t_lo = 0.0;
    lo_fp.minimal_eta_mw.assign(static_cast<std::size_t>(k_users), 0.0);
  }
  rep.powers_mw = lo_fp.minimal_eta_mw;
  rep.objective_trace_bps.push_back(pref * std::log2(1.0 + t_lo));

  int it = 0;
  for (; it < opt.maxmin_max_bisect; ++it) {
    if (t_hi - t_lo <= opt.maxmin_rel_tol * t_hi) break;
    const double t_mid = 0.5 * (t_lo + t_hi);
    const auto fp = maxmin_feasibility(t_mid, co, cfg, opt);
    if (fp.feasible) {
      t_lo = t_mid;
      rep.powers_mw = fp.minimal_eta_mw;
      rep.objective_trace_bps.push_back(pref * std::log2(1.0 + t_lo));
    } else {
      t_hi = t_mid;
    }
  }

  rep.iterations = it;
  rep.converged = t_hi - t_lo <= opt.maxmin_rel_tol * t_hi;
  rep.objective_bps = min_rate_bps(rep.powers_mw, co, cfg);
  return rep;
}

namespace {

// Concave surrogate at the expansion point: the subtracted log2(D_k) terms
// are replaced by their tangent planes. grad_lin_i = sum_k b_ki / D_k(bar).
struct Surrogate {
  const SinrCoefficients& co;
  std::vector<double> grad_lin;  // K
  double const_term = 0.0;       // value of the linearized part at eta_bar

  Surrogate(const SinrCoefficients& c, const std::vector<double>& eta_bar) : co(c) {
    const int k_users = co.num_users();
    grad_lin.assign(static_cast<std::size_t>(k_users), 0.0);
    for (int k = 0; k < k_users; ++k) {
      const double d = denom_at(co, eta_bar, k);
      const_term += std::log2(d);
      const double* row = co.b.row(static_cast<std::size_t>(k));
      const double scale = 1.0 / (d * kLn2);
      for (int i = 0; i < k_users; ++i) grad_lin[static_cast<std::size_t>(i)] += row[i] * scale;
    }
    for (int i = 0; i < k_users; ++i)
      const_term -= grad_lin[static_cast<std::size_t>(i)] * eta_bar[static_cast<std::size_t>(i)];
  }

  double value(const std::vector<double>& eta) const {
    double v = -const_term;
    for (int k = 0; k < co.num_users(); ++k) {
      v += std::log2(co.a[static_cast<std::size_t>(k)] * eta[static_cast<std::size_t>(k)] +
                     denom_at(co, eta, k));
      v -= grad_lin[static_cast<std::size_t>(k)] * eta[static_cast<std::size_t>(k)];
    }
    return v;
  }

  void gradient(const std::vector<double>& eta, std::vector<double>& g) const {
    const int k_users = co.num_users();
    for (int i = 0; i < k_users; ++i)
      g[static_cast<std::size_t>(i)] = -grad_lin[static_cast<std::size_t>(i)];
    for (int k = 0; k < k_users; ++k) {
      const double top =
          co.a[static_cast<std::size_t>(k)] * eta[static_cast<std::size_t>(k)] +
          denom_at(co, eta, k);
      const double scale = 1.0 / (top * kLn2);
      const double* row = co.b.row(static_cast<std::size_t>(k));
      for (int i = 0; i < k_users; ++i)
        g[static_cast<std::size_t>(i)] += row[i] * scale;
      g[static_cast<std::size_t>(k)] += co.a[static_cast<std::size_t>(k)] * scale;
    }
  }
};

// Projected gradient ascent with Armijo backtracking over the box
// [0, caps]. The trial step is the Barzilai-Borwein spectral step, which
// keeps the iteration count low on badly scaled instances; backtracking
// guarantees monotone ascent, so the result never falls below the start.
std::vector<double> maximize_surrogate(const Surrogate& sur, std::vector<double> x,
                                       const std::vector<double>& caps,
                                       const SolverOptions& opt) {
  const std::size_t n = x.size();
  auto clamp = [&](double v, std::size_t i) {
    return std::min(caps[i], std::max(0.0, v));
  };

  std::vector<double> grad(n), cand(n), x_prev(n), grad_prev(n);
  double fx = sur.value(x);
  double step = 1.0;
  bool have_prev = false;

  for (int it = 0; it < opt.inner_max_iters; ++it) {
    sur.gradient(x, grad);

    double pg_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double moved = clamp(x[i] + grad[i], i) - x[i];
      pg_norm += moved * moved;
    }
    if (std::sqrt(pg_norm) < opt.inner_pg_tol) break;

    if (have_prev) {
      // step = (dx.dx)/(dx.(-dg)); for a concave objective dx.dg <= 0.
      double dx_dx = 0.0, dx_dg = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x_prev[i];
        dx_dx += dx * dx;
        dx_dg += dx * (grad[i] - grad_prev[i]);
      }
      step = dx_dg < 0.0 ? std::clamp(-dx_dx / dx_dg, 1e-10, 1e12) : step * 2.0;
    }
    x_prev = x;
    grad_prev = grad;

    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 80; ++bt) {
      double predicted = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cand[i] = clamp(x[i] + s * grad[i], i);
        predicted += grad[i] * (cand[i] - x[i]);
      }
      if (predicted <= 0.0) break;  // stationary within the box
      const double fc = sur.value(cand);
      if (fc >= fx + 1e-4 * predicted) {
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
    have_prev = true;
  }
  return x;
}

}  // namespace

SolverReport solve_sumrate_sca(const SinrCoefficients& co, const SystemConfig& cfg,
                               const SolverOptions& opt) {
  const auto caps = power_caps(cfg);
  const double pref = cfg.rate_prefactor();

  SolverReport rep;
  std::vector<double> eta = uniform_allocation(cfg);
  double f_cur = sumrate_log2(co, eta);
  rep.objective_trace_bps.push_back(pref * f_cur);

  int outer = 0;
  for (; outer < opt.sca_max_outer; ++outer) {
    const Surrogate sur(co, eta);
    const auto eta_next = maximize_surrogate(sur, eta, caps, opt);
    const double f_next = sumrate_log2(co, eta_next);

    if (f_next <= f_cur) {  // ascent exhausted to fp precision
      rep.converged = true;
      break;
    }
    const double rel = (f_next - f_cur) / std::max(std::fabs(f_cur), 1e-300);
    eta = eta_next;
    f_cur = f_next;
    rep.objective_trace_bps.push_back(pref * f_cur);
    if (rel < opt.sca_rel_tol) {
      rep.converged = true;
      break;
    }
  }

  rep.iterations = static_cast<int>(rep.objective_trace_bps.size()) - 1;
  rep.powers_mw = std::move(eta);
  rep.objective_bps = pref * f_cur;
  return rep;
}

}  // namespace cfmimo
