#include "qdual/catmap_quantum.hpp"

#include <cmath>

#include "qdual/spin_chain.hpp"  // kron, trace_power

namespace qdual {

double cat_f1(int L, const CatPotential& v, int m, int k) {
  return -(2.0 * kPi / L) *
         (double(k) * m + double(L) * L * v.value(double(m) / L));
}

double cat_f2(int L, int a, int b, int m, int k) {
  return (kPi / L) * (-2.0 * k * m + double(a) * m * m + double(b) * k * k) +
         kPi / 4.0;
}

CMatrix cat_kick_generic(int L, const std::function<double(int, int)>& f) {
  CMatrix u(L, L);
  const double norm = 1.0 / std::sqrt(double(L));
  for (int m = 1; m <= L; ++m) {
    for (int k = 1; k <= L; ++k) {
      u(m - 1, k - 1) = norm * std::exp(cplx(0, f(m, k)));
    }
  }
  return u;
}

CMatrix build_u_kick(int L, int a, int b) {
  if (L < 2) throw ValidationError("build_u_kick: L >= 2 required");
  const CMatrix u =
      cat_kick_generic(L, [&](int m, int k) { return cat_f2(L, a, b, m, k); });
  const double defect = unitarity_defect(u);
  if (defect > 1e-10) {
    throw ValidationError("cat-map kick not unitary for (L, a, b) = (" +
                          std::to_string(L) + ", " + std::to_string(a) + ", " +
                          std::to_string(b) +
                          "): defect = " + std::to_string(defect));
  }
  return u;
}

CVector build_u_int_diag(int L, int n_slots,
                         const std::function<double(int, int)>& f) {
  const std::int64_t dim = checked_ipow(L, n_slots);
  CVector diag(dim);
  std::vector<int> eta(n_slots);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    for (int s = 0; s < n_slots; ++s) {
      eta[s] = static_cast<int>(rem % L) + 1;  // labels 1..L, slot 0 fastest
      rem /= L;
    }
    double phase = 0;
    for (int s = 0; s < n_slots; ++s) {
      phase += f(eta[s], eta[(s + 1) % n_slots]);
    }
    diag(idx) = std::exp(cplx(0, phase));
  }
  return diag;
}

CMatrix build_cat_evolution(int L, int n_slots,
                            const std::function<double(int, int)>& f_diag,
                            const std::function<double(int, int)>& f_kick,
                            std::int64_t dense_cap) {
  const std::int64_t dim = checked_ipow(L, n_slots, dense_cap);
  if (dim > dense_cap) {
    throw CapExceededError("cat evolution dimension exceeds dense cap");
  }
  const CMatrix u1 = cat_kick_generic(L, f_kick);
  CMatrix kick = CMatrix::Ones(1, 1);
  // Slot 0 is the fastest tuple digit, so it must be the last kron factor.
  for (int s = 0; s < n_slots; ++s) kick = kron(kick, u1);
  const CVector diag = build_u_int_diag(L, n_slots, f_diag);
  return diag.asDiagonal() * kick;
}

CMatrix build_u_cat(const CatQuantumParams& p, std::int64_t dense_cap) {
  return build_cat_evolution(
      p.L, p.n_sites,
      [&](int m, int k) { return cat_f1(p.L, p.v, m, k); },
      [&](int m, int k) { return cat_f2(p.L, p.a, p.b, m, k); }, dense_cap);
}

CMatrix build_w_cat(const CatQuantumParams& p, std::int64_t dense_cap) {
  return build_cat_evolution(
      p.L, p.t_period,
      [&](int m, int k) { return cat_f2(p.L, p.a, p.b, m, k); },
      [&](int m, int k) { return cat_f1(p.L, p.v, m, k); }, dense_cap);
}

CatDualityReport duality_check_cat(const CatQuantumParams& p,
                                   std::int64_t dense_cap) {
  (void)build_u_kick(p.L, p.a, p.b);  // parameter gate
  const cplx tr_u = trace_power(build_u_cat(p, dense_cap), p.t_period);
  const CMatrix w = build_w_cat(p, dense_cap);
  const cplx tr_w = trace_power(w, p.n_sites);
  CatQuantumParams swapped = p;
  swapped.n_sites = p.t_period;
  swapped.t_period = p.n_sites;
  const cplx tr_x = trace_power(build_u_cat(swapped, dense_cap), p.n_sites);
  CatDualityReport rep;
  // Absolute comparison when the traces are small (they vanish identically
  // at some parameter points), relative otherwise.
  const double scale = std::max({std::abs(tr_u), std::abs(tr_w), 1.0});
  rep.err_dual = std::abs(tr_u - tr_w) / scale;
  rep.err_exchange = std::abs(tr_u - tr_x) / scale;
  rep.w_unitarity = unitarity_defect(w);
  return rep;
}

cplx cat_trace(const CatQuantumParams& p, std::int64_t dense_cap) {
  if (p.t_period <= p.n_sites) {
    return trace_power(build_w_cat(p, dense_cap), p.n_sites);
  }
  return trace_power(build_u_cat(p, dense_cap), p.t_period);
}

FormFactorEstimate form_factor(const CatQuantumParams& p, double eps,
                               int n_samples, unsigned seed,
                               double degeneracy_factor) {
  if (n_samples < 1) throw ValidationError("form_factor: n_samples >= 1");
  if (degeneracy_factor <= 0) {
    throw ValidationError("form_factor: degeneracy_factor must be positive");
  }
  std::mt19937_64 rng(seed);
  const double dim_n = std::pow(double(p.L), p.n_sites);
  std::vector<double> vals;
  vals.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    CatQuantumParams sample = p;
    sample.v = CatPotential::random(eps, rng);
    const cplx tr = cat_trace(sample);
    vals.push_back(std::norm(tr) / (degeneracy_factor * dim_n));
  }
  FormFactorEstimate est;
  est.n_samples = n_samples;
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= n_samples;
  est.k_value = mean;
  if (n_samples > 1) {
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (n_samples - 1);
    est.stderr_value = std::sqrt(var / n_samples);
  }
  const double dim_t = std::pow(double(p.L), p.t_period);
  est.tau = double(p.n_sites) * p.t_period / dim_t;
  // Regime label only: compare T with the per-particle Ehrenfest scale
  // ln(L) / Lambda, Lambda the log of the largest stability eigenvalue.
  CatMapParams cl;
  cl.a = p.a;
  cl.b = p.b;
  cl.d = -1;
  cl.n_sites = p.n_sites;
  double lam_max = 1;
  for (const cplx& lam : build_M(cl).eigenvalues) {
    lam_max = std::max(lam_max, std::abs(lam));
  }
  const double t_ehrenfest = std::log(double(p.L)) / std::log(lam_max);
  if (est.tau >= 1.0) {
    est.regime = "universal";
  } else if (p.t_period <= t_ehrenfest + 1.0) {
    est.regime = "exponential";
  } else {
    est.regime = "linear";
  }
  return est;
}

double k_rmt(double tau, int beta) {
  if (tau < 0.0) throw ValidationError("k_rmt: tau must be non-negative");
  if (beta == 1) {
    if (tau <= 1.0) return 2.0 * tau - tau * std::log(1.0 + 2.0 * tau);
    return 2.0 - tau * std::log((2.0 * tau + 1.0) / (2.0 * tau - 1.0));
  }
  if (beta == 2) return std::min(tau, 1.0);
  throw ValidationError("k_rmt: beta must be 1 or 2");
}

double k_cat_prediction(const CatQuantumParams& p) {
  const double dim_t = std::pow(double(p.L), p.t_period);
  const double tau = double(p.n_sites) * p.t_period / dim_t;
  return std::pow(double(p.L), p.t_period - p.n_sites) * k_rmt(tau, p.beta);
}

}  // namespace qdual
