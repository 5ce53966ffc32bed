#include "qdual/dual_op.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qdual/linear_fit.hpp"

namespace qdual {

namespace {

// Practical dense dimension for repeated matrix products (memory ~ dim^2).
constexpr std::int64_t kDensePowerLimit = 4096;

// Decode tuple index (slot 0 fastest digit) into digits.
void decode_tuple(std::int64_t idx, int d, int len, int* out) {
  for (int t = 0; t < len; ++t) {
    out[t] = static_cast<int>(idx % d);
    idx /= d;
  }
}

// prod_t <s_t|u|s_{t+1 mod T}> over the cyclic time tuple.
cplx kick_cycle(const CMatrix& u, const int* s, int T) {
  cplx v = 1.0;
  for (int t = 0; t < T; ++t) v *= u(s[t], s[(t + 1) % T]);
  return v;
}

}  // namespace

CMatrix ising_bond_kernel(const SpinChainParams& p) {
  const int d = p.site_dim();
  const double jp = p.j_plus_half();
  CMatrix a(d, d);
  for (int r = 0; r < d; ++r) {
    const double mr = -p.j() + r;
    for (int c = 0; c < d; ++c) {
      const double mc = -p.j() + c;
      a(r, c) = std::exp(cplx(0, -4.0 * p.J * mr * mc / jp));
    }
  }
  return a;
}

CMatrix transfer_operator(const SpinChainParams& p, int T,
                          std::int64_t dense_cap) {
  p.validate();
  if (T < 1) throw ValidationError("transfer_operator: T must be >= 1");
  const int d = p.site_dim();
  const std::int64_t dim = checked_ipow(d, T, dense_cap);
  if (dim > dense_cap) {
    throw CapExceededError("transfer dimension " + std::to_string(dim) +
                           " exceeds dense cap " + std::to_string(dense_cap));
  }
  const CMatrix a = ising_bond_kernel(p);
  const CMatrix u = kick_rotation(p);
  std::vector<int> s(T), sp(T);
  CMatrix w(dim, dim);
  for (std::int64_t row = 0; row < dim; ++row) {
    decode_tuple(row, d, T, s.data());
    const cplx kk = kick_cycle(u, s.data(), T);
    for (std::int64_t col = 0; col < dim; ++col) {
      decode_tuple(col, d, T, sp.data());
      cplx bond = 1.0;
      for (int t = 0; t < T; ++t) bond *= a(s[t], sp[t]);
      w(row, col) = kk * bond;
    }
  }
  return w;
}

namespace {

// F_c(x,y) = sum_z A(x,z) k(z,c) A(z,y) for every c; the shared building
// block of the T=2 lattice contraction (A = Ising bond kernel, k = cyclic
// two-step kick weight u(x,y) u(y,x); all three matrices symmetric).
std::vector<CMatrix> contraction_slices(const CMatrix& a, const CMatrix& k) {
  const Eigen::Index d = a.rows();
  std::vector<CMatrix> f(d);
  CMatrix scaled(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index z = 0; z < d; ++z) scaled.col(z) = a.col(z) * k(z, c);
    f[c] = scaled * a;
  }
  return f;
}

// Tr W^4 (T = 2, N = 4) by direct contraction of the 4 x 2 lattice sum:
//   Tr = sum_{r,s} c_rs^T (F_r .* F_s) c_rs,   c_rs[z] = F_z(r,s).
cplx trace_t2_n4(const CMatrix& a, const CMatrix& k) {
  const Eigen::Index d = a.rows();
  const std::vector<CMatrix> f = contraction_slices(a, k);
  CVector c(d);
  CMatrix had(d, d);
  cplx total = 0.0;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index s = r; s < d; ++s) {
      for (Eigen::Index z = 0; z < d; ++z) c(z) = f[z](r, s);
      had = f[r].cwiseProduct(f[s]);
      const cplx term = c.transpose() * (had * c);
      total += (s == r) ? term : 2.0 * term;
    }
  }
  return total;
}

// Tr W^3 (T = 2, N = 3) by the analogous contraction:
//   Tr = sum_i A.row(i) . colsum( V_i .* ((F_i .* A) k) ),
// with V_i(b1,a3) = F_{b1}(a3,i).
cplx trace_t2_n3(const CMatrix& a, const CMatrix& k) {
  const Eigen::Index d = a.rows();
  const std::vector<CMatrix> f = contraction_slices(a, k);
  CMatrix r_i(d, d), v_i(d, d);
  cplx total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    r_i = f[i].cwiseProduct(a) * k;
    for (Eigen::Index b1 = 0; b1 < d; ++b1) {
      for (Eigen::Index a3 = 0; a3 < d; ++a3) v_i(b1, a3) = f[b1](a3, i);
    }
    const Eigen::RowVectorXcd colsum =
        v_i.cwiseProduct(r_i).colwise().sum();
    total += (colsum * a.row(i).transpose()).value();
  }
  return total;
}

cplx trace_t2_contraction(const SpinChainParams& p, int n_sites) {
  const CMatrix a = ising_bond_kernel(p);
  const CMatrix u = kick_rotation(p);
  const CMatrix k = u.cwiseProduct(u.transpose());
  if (n_sites == 3) return trace_t2_n3(a, k);
  if (n_sites == 4) return trace_t2_n4(a, k);
  throw ValidationError("T=2 contraction implemented for N in {3,4}");
}

}  // namespace

cplx floquet_trace(const SpinChainParams& p, int T, std::int64_t dense_cap) {
  p.validate();
  const int d = p.site_dim();
  const std::int64_t huge = std::int64_t{1} << 62;
  std::int64_t dim_u = 1, dim_w = 1;
  for (int i = 0; i < p.n_sites && dim_u < huge / d; ++i) dim_u *= d;
  for (int i = 0; i < T && dim_w < huge / d; ++i) dim_w *= d;

  // The T=2 lattice contraction beats dense powering on either side as soon
  // as the site dimension is nontrivial.
  if (T == 2 && (p.n_sites == 3 || p.n_sites == 4) && d > 8) {
    return trace_t2_contraction(p, p.n_sites);
  }
  const std::int64_t practical = std::min(dense_cap, kDensePowerLimit);
  if (dim_w <= practical && dim_w <= dim_u) {
    return trace_power(transfer_operator(p, T, dense_cap), p.n_sites);
  }
  if (dim_u <= practical) {
    return trace_power(build_floquet(p, dense_cap), T);
  }
  if (T == 2 && (p.n_sites == 3 || p.n_sites == 4)) {
    return trace_t2_contraction(p, p.n_sites);
  }
  throw CapExceededError(
      "no trace route fits the dense cap for this (N, T, j); "
      "reduce two_j or use T=2 with N in {3,4}");
}

double duality_check(const SpinChainParams& p, int T, std::int64_t dense_cap) {
  const cplx tr_w = trace_power(transfer_operator(p, T, dense_cap), p.n_sites);
  cplx tr_u;
  const std::int64_t dim_u = p.hilbert_dim();
  if (dim_u <= std::min(dense_cap, kDensePowerLimit)) {
    tr_u = trace_power(build_floquet(p, dense_cap), T);
  } else {
    // Transfer-only self-consistency: matrix powers vs eigenvalue sum.
    const DualSpectrum spec = dual_spectrum(transfer_operator(p, T, dense_cap));
    cplx acc = 0.0;
    for (const auto& ep : spec.eigenvalues) {
      acc += std::pow(ep.value, p.n_sites);
    }
    tr_u = acc;
  }
  return std::abs(tr_u - tr_w) / std::max(std::abs(tr_u), 1e-300);
}

// ---------------------------------------------------------------------------
// Analytic j = 1/2 dual.

HalfSpinDualParams dual_params_half_spin(const SpinChainParams& p) {
  p.validate();
  if (p.two_j != 1) throw ValidationError("analytic dual requires two_j == 1");
  const double b = p.b(), phi = p.phi();
  const double x = std::sin(b) * std::sin(phi);
  if (std::abs(x) < 1e-12) {
    throw ValidationError("dual parameters singular at x = sin b sin phi = 0");
  }
  if (std::abs(x * x - 1.0) < 1e-12) {
    throw ValidationError("branch singularity at x^2 = 1 (exp(-4iK) = 0)");
  }

  // Kick matrix elements: diagonal d_sigma = cos b - i sigma cos(phi) sin b,
  // off-diagonal P = -i sin(phi) sin b.  Decomposition
  //   u[sigma,sigma'] = exp(-i K sigma sigma') exp(eta) exp(-i h (sigma+sigma')/2)
  // with eta on the principal branch and exp(iK), exp(-ih) solved exactly so
  // that all three element equations hold to machine precision.
  const cplx d_plus = cplx(std::cos(b), -std::cos(phi) * std::sin(b));
  const cplx big_p = cplx(0, -x);
  const cplx x2 = cplx(x * x, 0);
  HalfSpinDualParams out;
  out.eta = 0.25 * std::log(x2 * (x2 - 1.0));
  const cplx e_eta = std::exp(out.eta);
  const cplx e_iK = big_p / e_eta;
  out.K = -cplx(0, 1) * std::log(e_iK);
  const cplx e_mih = d_plus * e_iK / e_eta;
  out.h = cplx(0, 1) * std::log(e_mih);

  // Dual side: swap the roles of J and K.
  const cplx e_m4iJ = std::exp(cplx(0, -4.0 * p.J));
  if (std::abs(e_m4iJ - 1.0) < 1e-12) {
    throw ValidationError("dual parameters singular at J = 0 mod pi/2");
  }
  const cplx xt2 = 1.0 / (1.0 - e_m4iJ);
  out.eta_tilde = 0.25 * std::log(xt2 * (xt2 - 1.0));
  // The element equations fix exp(2 eta_tilde) up to sign; pick the branch
  // for which the dual kick matrix has the unit-normalization of a rotation.
  const cplx e_2iJ = std::exp(cplx(0, 2.0 * p.J));
  cplx check = std::exp(2.0 * out.eta_tilde) * (1.0 / e_2iJ - e_2iJ);
  if (std::abs(check - 1.0) > std::abs(check + 1.0)) {
    out.eta_tilde += cplx(0, 0.5 * kPi);
    out.flipped_eta_tilde = true;
  }
  out.g = std::exp(out.eta - out.eta_tilde);

  // Recover (b_tilde, phi_tilde) from the dual kick elements.
  const cplx e_etat = std::exp(out.eta_tilde);
  const cplx e_iJ = std::exp(cplx(0, p.J));
  const cplx dt_plus = e_etat / e_iJ * e_mih;
  const cplx dt_minus = e_etat / e_iJ / e_mih;
  const cplx pt = e_etat * e_iJ;
  const cplx cos_bt = 0.5 * (dt_plus + dt_minus);
  out.b_tilde = std::acos(cos_bt);
  const cplx sin_bt = std::sin(out.b_tilde);
  const cplx sin_pt = cplx(0, 1) * pt / sin_bt;
  const cplx cos_pt = (dt_minus - dt_plus) / (cplx(0, 2) * sin_bt);
  out.phi_tilde = std::atan(sin_pt / cos_pt);
  // atan only fixes the tangent; pick the representative whose cosine matches
  // the raw matrix elements (shifting by pi flips sine and cosine together).
  if (std::abs(std::cos(out.phi_tilde) - cos_pt) >
      std::abs(std::cos(out.phi_tilde) + cos_pt)) {
    out.phi_tilde += kPi;
  }
  return out;
}

CMatrix analytic_dual_operator(const SpinChainParams& p, int T) {
  const HalfSpinDualParams dp = dual_params_half_spin(p);
  // Dual single-site kick: u~[sigma,sigma'] =
  //   exp(-i J sigma sigma') exp(eta_tilde) exp(-i h (sigma+sigma')/2).
  const cplx e_etat = std::exp(dp.eta_tilde);
  const cplx e_iJ = std::exp(cplx(0, p.J));
  const cplx e_mih = std::exp(cplx(0, -1) * dp.h);
  CMatrix ut(2, 2);
  // Basis order m = -1/2, +1/2  ->  sigma = -1, +1.
  ut(0, 0) = e_etat / e_iJ * (1.0 / e_mih);  // sigma = sigma' = -1
  ut(1, 1) = e_etat / e_iJ * e_mih;          // sigma = sigma' = +1
  ut(0, 1) = ut(1, 0) = e_etat * e_iJ;
  // Dual Ising part: ring of T time slots with coupling K,
  // diagonal phase prod_t exp(-i K sigma_t sigma_{t+1}).
  const std::int64_t dim = checked_ipow(2, T);
  CVector diag(dim);
  std::vector<int> s(T);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    decode_tuple(idx, 2, T, s.data());
    cplx phase = 0.0;
    if (T == 1) {
      phase = dp.K;  // sigma^2 = 1 on the single self-bond
    } else {
      for (int t = 0; t < T; ++t) {
        const int s1 = 2 * s[t] - 1, s2 = 2 * s[(t + 1) % T] - 1;
        phase += dp.K * static_cast<double>(s1 * s2);
      }
    }
    diag(idx) = std::exp(cplx(0, -1) * phase);
  }
  CMatrix kick = CMatrix::Ones(1, 1);
  for (int t = 0; t < T; ++t) kick = kron(kick, ut);
  // kron() above uses slot T-1 as the fastest index, matching decode_tuple
  // ordering only up to a permutation symmetric in all slots; the diagonal
  // phase is cyclic so either convention yields the same trace spectrum.
  const cplx scale = std::pow(dp.g, static_cast<double>(T));
  return scale * CMatrix(diag.asDiagonal() * kick);
}

// ---------------------------------------------------------------------------
// Spectrum.

DualSpectrum dual_spectrum(const CMatrix& w) {
  Eigen::ComplexEigenSolver<CMatrix> es(w, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw NumericalError("dual eigensolver failed to converge");
  }
  const Eigen::Index n = w.rows();
  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  DualSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int src = order[i];
    const CVector v = es.eigenvectors().col(src).normalized();
    EigenPair ep;
    ep.value = es.eigenvalues()(src);
    ep.residual = (w * v - ep.value * v).norm();
    out.eigenvalues[i] = ep;
    out.eigenvectors.col(i) = v;
  }
  return out;
}

namespace {

// Matrix-free W application for T in {1,2}; dense fallback otherwise.
class TransferApply {
 public:
  TransferApply(const SpinChainParams& p, int T) : t_(T), d_(p.site_dim()) {
    a_ = ising_bond_kernel(p);
    u_ = kick_rotation(p);
    dim_ = checked_ipow(d_, T);
    if (t_ == 2) k_ = u_.cwiseProduct(u_.transpose());
    if (t_ > 2) dense_ = transfer_operator(p, T);
  }

  std::int64_t dim() const { return dim_; }

  CVector apply(const CVector& x) const {
    if (t_ == 1) {
      CVector y = a_ * x;
      for (int i = 0; i < d_; ++i) y(i) *= u_(i, i);
      return y;
    }
    if (t_ == 2) {
      Eigen::Map<const CMatrix> xm(x.data(), d_, d_);
      CMatrix ym = a_ * xm * a_;  // A symmetric
      ym = ym.cwiseProduct(k_);
      return Eigen::Map<const CVector>(ym.data(), dim_);
    }
    return dense_ * x;
  }

 private:
  int t_, d_;
  std::int64_t dim_;
  CMatrix a_, u_, k_, dense_;
};

}  // namespace

std::vector<cplx> leading_dual_eigenvalues(const SpinChainParams& p, int T,
                                           int k, CVector* leading_vector) {
  const TransferApply op(p, T);
  const std::int64_t dim = op.dim();
  if (dim <= 256) {
    // Small enough for the dense path.
    const DualSpectrum spec = dual_spectrum(transfer_operator(p, T));
    std::vector<cplx> out;
    for (int i = 0; i < k && i < static_cast<int>(spec.eigenvalues.size());
         ++i) {
      out.push_back(spec.eigenvalues[i].value);
    }
    if (leading_vector) *leading_vector = spec.eigenvectors.col(0);
    return out;
  }

  const int m = static_cast<int>(
      std::min<std::int64_t>(dim, std::max(80, 8 * k)));
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss;
  CVector v0(dim);
  for (std::int64_t i = 0; i < dim; ++i) v0(i) = cplx(gauss(rng), gauss(rng));
  v0.normalize();

  std::vector<CVector> basis;
  basis.reserve(m + 1);
  basis.push_back(v0);
  CMatrix h = CMatrix::Zero(m + 1, m);
  int steps = m;
  for (int jcol = 0; jcol < m; ++jcol) {
    CVector w = op.apply(basis[jcol]);
    for (int rep = 0; rep < 2; ++rep) {  // MGS with one re-orthogonalization
      for (int i = 0; i <= jcol; ++i) {
        const cplx c = basis[i].dot(w);
        h(i, jcol) += c;
        w -= c * basis[i];
      }
    }
    const double nrm = w.norm();
    h(jcol + 1, jcol) = nrm;
    if (nrm < 1e-12) {
      steps = jcol + 1;
      break;
    }
    basis.push_back(w / nrm);
  }
  Eigen::ComplexEigenSolver<CMatrix> es(h.topLeftCorner(steps, steps), true);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Arnoldi Ritz eigensolve failed");
  }
  std::vector<int> order(steps);
  for (int i = 0; i < steps; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  std::vector<cplx> out;
  for (int i = 0; i < k && i < steps; ++i) {
    out.push_back(es.eigenvalues()(order[i]));
  }
  if (leading_vector) {
    CVector ritz = CVector::Zero(dim);
    for (int i = 0; i < steps; ++i) {
      ritz += es.eigenvectors()(i, order[0]) * basis[i];
    }
    *leading_vector = ritz.normalized();
  }
  return out;
}

LocalizationReport eigenvector_localization(const CVector& v, int site_dim) {
  const auto ipr = [](const CVector& x) {
    const double n2 = x.squaredNorm();
    double s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double a2 = std::norm(x(i));
      s += a2 * a2;
    }
    return s / (n2 * n2);
  };
  LocalizationReport rep;
  rep.ipr_coordinate = ipr(v);
  // Per-slot discrete Fourier transform |sbar> = d^{-1/2} sum_s
  // exp(i 2 pi s sbar / d) |s>.
  const int d = site_dim;
  CMatrix dft(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      dft(r, c) = std::exp(cplx(0, 2.0 * kPi * r * c / d)) / std::sqrt(double(d));
    }
  }
  std::int64_t dim = v.size();
  int slots = 0;
  for (std::int64_t t = dim; t > 1; t /= d) ++slots;
  CVector w = v;
  std::int64_t stride = 1;
  for (int t = 0; t < slots; ++t) {
    CVector nw = CVector::Zero(dim);
    const std::int64_t outer = dim / (stride * d);
    for (std::int64_t o = 0; o < outer; ++o) {
      for (std::int64_t i = 0; i < stride; ++i) {
        const std::int64_t base = o * stride * d + i;
        CVector slice(d);
        for (int s = 0; s < d; ++s) slice(s) = w(base + s * stride);
        const CVector tslice = dft * slice;
        for (int s = 0; s < d; ++s) nw(base + s * stride) = tslice(s);
      }
    }
    w = nw;
    stride *= d;
  }
  rep.ipr_momentum = ipr(w);
  return rep;
}

EigenvalueScan largest_eigenvalue_scan(const SpinChainParams& base, int T,
                                       const std::vector<int>& two_j_list) {
  if (two_j_list.size() < 4) {
    throw ValidationError("eigenvalue scan needs at least 4 j values");
  }
  EigenvalueScan scan;
  std::vector<double> logj, loglam;
  for (int two_j : two_j_list) {
    SpinChainParams p = base;
    p.two_j = two_j;
    EigenvalueScanRow row;
    row.j_times_2 = two_j;
    row.leading = leading_dual_eigenvalues(p, T, 4);
    row.abs_lambda_max = std::abs(row.leading.at(0));
    scan.rows.push_back(row);
    logj.push_back(std::log(0.5 * two_j));
    loglam.push_back(std::log(row.abs_lambda_max));
  }
  const LinearFit fit = fit_line(logj, loglam);
  scan.alpha0 = fit.slope;
  scan.alpha0_stderr = fit.slope_stderr;
  return scan;
}

}  // namespace qdual
