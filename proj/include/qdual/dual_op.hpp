// Spatial transfer ("dual") operator W for the kicked spin chain.
//
// Writing Tr U^T as a sum over an N x T lattice of magnetic quantum numbers
// and re-grouping by site instead of by time step gives Tr U^T = Tr W^N with
// W of dimension (2j+1)^T:
//
//   W[s,s'] = [prod_t exp(-i phi_I(s_t, s'_t))] * [prod_t <s_t|u_K|s_{t+1}>]
//
// (s a T-tuple, cyclic in t, phi_I(m,m') = 4J m m' / (j+1/2)).  The identity
// is an exact rearrangement for any j, N, T.  For j = 1/2 the same object
// admits a closed-form construction via complex Ising parameters.
#pragma once

#include <optional>
#include <vector>

#include "qdual/spin_chain.hpp"
#include "qdual/types.hpp"

namespace qdual {

// Per-bond Ising kernel A[m,m'] = exp(-i 4J m m' / (j+1/2)), dim 2j+1.
CMatrix ising_bond_kernel(const SpinChainParams& p);

// Dense transfer operator, dimension (two_j+1)^T.  Tuple index: time slot 1
// is the fastest digit.  Throws CapExceededError above `dense_cap`.
CMatrix transfer_operator(const SpinChainParams& p, int T,
                          std::int64_t dense_cap = kDefaultDenseCap);

// Tr U^T computed through the cheapest exact route:
//   - dense powering on the smaller of U (dim d^N) and W (dim d^T);
//   - for T = 2, N in {3,4}: a direct tensor contraction of the N x T
//     lattice sum with O(d^4) cost and O(d^3) memory, which reaches spin
//     sizes far beyond any dense cap.
// Throws CapExceededError when no route fits.
cplx floquet_trace(const SpinChainParams& p, int T,
                   std::int64_t dense_cap = kDefaultDenseCap);

// Relative duality defect |Tr U^T - Tr W^N| / max(|Tr U^T|, eps), with the
// two sides computed independently (dense U vs dense/contracted W).
double duality_check(const SpinChainParams& p, int T,
                     std::int64_t dense_cap = kDefaultDenseCap);

// ---------------------------------------------------------------------------
// Analytic j = 1/2 dual construction.

struct HalfSpinDualParams {
  cplx K;          // dual Ising coupling from the kick decomposition
  cplx eta;        // overall weight, exp(4 eta) = x^2 (x^2 - 1)
  cplx h;          // longitudinal field
  cplx eta_tilde;  // dual-side weight (branch-adjusted, see flipped_eta_tilde)
  cplx g;          // exp(eta - eta_tilde)
  cplx b_tilde;    // dual kick strength
  cplx phi_tilde;  // dual kick angle
  bool flipped_eta_tilde = false;  // principal branch of eta_tilde shifted by i*pi/2
};

// Complex Ising parameters (K, eta, h) of the single-site kick matrix and the
// dual parameters (b_tilde, phi_tilde, g).  Requires two_j == 1 and
// x = sin(b) sin(phi) not in {0, +-1} (branch singularities).
HalfSpinDualParams dual_params_half_spin(const SpinChainParams& p);

// Analytic dual operator from the closed-form parameters: a dual "Floquet"
// acting on a ring of T time slots,
//   W_analytic = g^T * U_I(K) * u_tilde^{tensor T},
// whose N-th power trace reproduces Tr U^T (total scalar factor g^{N T}).
CMatrix analytic_dual_operator(const SpinChainParams& p, int T);

// ---------------------------------------------------------------------------
// Spectrum.

struct EigenPair {
  cplx value;
  double residual = 0.0;  // ||W v - lambda v||_2 with ||v|| = 1
};

struct DualSpectrum {
  std::vector<EigenPair> eigenvalues;  // sorted by descending modulus
  CMatrix eigenvectors;                // columns, same order
};

// Full non-symmetric eigen-decomposition of a dense W with per-pair
// residuals.  Throws NumericalError on solver failure.
DualSpectrum dual_spectrum(const CMatrix& w);

// k leading eigenvalues (descending modulus) of the transfer operator by
// Arnoldi iteration on a matrix-free apply; works at dimensions beyond the
// dense cap.  Optionally returns the leading Ritz vector.
std::vector<cplx> leading_dual_eigenvalues(const SpinChainParams& p, int T,
                                           int k,
                                           CVector* leading_vector = nullptr);

struct LocalizationReport {
  double ipr_coordinate = 0.0;
  double ipr_momentum = 0.0;
};

// Inverse participation ratios of a vector on the T-fold product basis, in
// the coordinate basis and after a per-slot discrete Fourier transform.
LocalizationReport eigenvector_localization(const CVector& v, int site_dim);

struct EigenvalueScanRow {
  int j_times_2 = 0;            // two_j of the scan point
  double abs_lambda_max = 0.0;  // |lambda_1|
  std::vector<cplx> leading;    // four largest eigenvalues
};

struct EigenvalueScan {
  std::vector<EigenvalueScanRow> rows;
  double alpha0 = 0.0;       // slope of log|lambda_max| vs log j
  double alpha0_stderr = 0.0;
};

// Scan the four largest dual eigenvalues over a list of two_j values (T
// fixed) and fit the algebraic growth exponent of |lambda_max|.
EigenvalueScan largest_eigenvalue_scan(const SpinChainParams& base, int T,
                                       const std::vector<int>& two_j_list);

}  // namespace qdual
