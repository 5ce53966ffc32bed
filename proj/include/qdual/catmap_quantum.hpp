// Quantized coupled cat-map chain: kicked evolution operators built from the
// bond phase functions f1 (interaction + potential) and f2 (single cat map),
// the dual operator obtained by exchanging their roles, exact trace duality,
// and the spectral form factor against random-matrix predictions.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qdual/catmap.hpp"
#include "qdual/types.hpp"

namespace qdual {

// Bond phase of the interaction part (with the on-site potential) and of the
// single-map kick; basis labels run 1..L with q = eta / L.
double cat_f1(int L, const CatPotential& v, int m, int k);
double cat_f2(int L, int a, int b, int m, int k);

// L x L kick matrix <m|u|k> = L^{-1/2} exp(i f(m, k)) for a generic bond
// phase; build_u_kick applies the unitarity gate to the f2 quantization.
CMatrix cat_kick_generic(int L, const std::function<double(int, int)>& f);
CMatrix build_u_kick(int L, int a, int b);

// Diagonal of the interaction operator on n_slots sites (cyclic bonds).
CVector build_u_int_diag(int L, int n_slots,
                         const std::function<double(int, int)>& f);

// Evolution operator diag(f_diag bonds) * kron of kick(f_kick) on n_slots
// sites, dense dimension L^n_slots.
CMatrix build_cat_evolution(int L, int n_slots,
                            const std::function<double(int, int)>& f_diag,
                            const std::function<double(int, int)>& f_kick,
                            std::int64_t dense_cap = kDefaultDenseCap);

struct CatQuantumParams {
  int L = 2;
  int a = 2, b = 2;
  int n_sites = 2;
  int t_period = 2;
  CatPotential v;
  int beta = 1;  // RMT symmetry class for comparisons
};

// Temporal evolution U_N = U_I[f1] U_K[f2] on L^N.
CMatrix build_u_cat(const CatQuantumParams& p,
                    std::int64_t dense_cap = kDefaultDenseCap);
// Dual operator W_T = U_I[f2] U_K[f1] on L^T.
CMatrix build_w_cat(const CatQuantumParams& p,
                    std::int64_t dense_cap = kDefaultDenseCap);

struct CatDualityReport {
  double err_dual = 0;      // |Tr U_N^T - Tr W_T^N| relative
  double err_exchange = 0;  // |Tr U_N^T - Tr U_T^N| relative
  double w_unitarity = 0;   // unitarity defect of W_T
};
CatDualityReport duality_check_cat(const CatQuantumParams& p,
                                   std::int64_t dense_cap = kDefaultDenseCap);

// Tr U_N^T through the cheaper of the two dual representations.
cplx cat_trace(const CatQuantumParams& p,
               std::int64_t dense_cap = kDefaultDenseCap);

struct FormFactorEstimate {
  double k_value = 0;
  int n_samples = 0;
  double stderr_value = 0;
  double tau = 0;           // NT / L^T
  std::string regime;       // exponential | linear | universal
};

// K(N,T) = <|Tr U_N^T|^2> / (degeneracy_factor * L^N) averaged over the
// random-phase potential ensemble at fixed amplitude eps.  The default
// divisor 2 assumes a doubly degenerate spectrum (translation pairing);
// pass 1 for ensembles whose levels are mostly unpaired.
FormFactorEstimate form_factor(const CatQuantumParams& p, double eps,
                               int n_samples, unsigned seed = 99,
                               double degeneracy_factor = 2.0);

// RMT form factor: beta=1 (orthogonal) 2 tau - tau ln(1 + 2 tau) for
// tau <= 1 and 2 - tau ln((2 tau + 1)/(2 tau - 1)) beyond; beta=2 (unitary)
// min(tau, 1).
double k_rmt(double tau, int beta);

// K(N,T) prediction L^{T-N} k_rmt(N T / L^T, beta).
double k_cat_prediction(const CatQuantumParams& p);

}  // namespace qdual
