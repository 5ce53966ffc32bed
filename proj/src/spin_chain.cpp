#include "qdual/spin_chain.hpp"

#include <vector>

namespace qdual {

CMatrix spin_z(int two_j) {
  const int d = two_j + 1;
  CMatrix sz = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) sz(k, k) = -0.5 * two_j + k;
  return sz;
}

namespace {

// S+ with <m+1|S+|m> = sqrt(j(j+1) - m(m+1)); basis ascending in m.
CMatrix spin_plus(int two_j) {
  const int d = two_j + 1;
  const double j = 0.5 * two_j;
  CMatrix sp = CMatrix::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) {
    const double m = -j + k;
    sp(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return sp;
}

}  // namespace

CMatrix spin_x(int two_j) {
  CMatrix sp = spin_plus(two_j);
  return 0.5 * (sp + sp.adjoint());
}

CMatrix spin_y(int two_j) {
  CMatrix sp = spin_plus(two_j);
  return cplx(0, -0.5) * (sp - sp.adjoint());
}

CMatrix kick_rotation(const SpinChainParams& p) {
  const int d = p.site_dim();
  const CMatrix gen = p.bx * spin_x(p.two_j) + p.bz * spin_z(p.two_j);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gen);
  if (es.info() != Eigen::Success) {
    throw NumericalError("kick generator eigensolve failed");
  }
  CVector phases(d);
  for (int k = 0; k < d; ++k) {
    phases(k) = std::exp(cplx(0, -2.0 * es.eigenvalues()(k)));
  }
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

CVector ising_phases(const SpinChainParams& p) {
  p.validate();
  const int d = p.site_dim();
  const int n = p.n_sites;
  const std::int64_t dim = p.hilbert_dim();
  const double jp = p.j_plus_half();
  CVector diag(dim);
  std::vector<double> m(n);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    for (int s = n - 1; s >= 0; --s) {  // site 0 slowest
      m[s] = -p.j() + static_cast<double>(rem % d);
      rem /= d;
    }
    double phase = 0.0;
    for (int s = 0; s < n; ++s) phase += m[s] * m[(s + 1) % n];
    diag(idx) = std::exp(cplx(0, -4.0 * p.J * phase / jp));
  }
  return diag;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix build_floquet(const SpinChainParams& p, std::int64_t dense_cap) {
  p.validate();
  const std::int64_t dim = p.hilbert_dim(dense_cap);
  if (dim > dense_cap) {
    throw CapExceededError("Floquet dimension " + std::to_string(dim) +
                           " exceeds dense cap " + std::to_string(dense_cap));
  }
  const CMatrix uk1 = kick_rotation(p);
  CMatrix uk = uk1;
  for (int s = 1; s < p.n_sites; ++s) uk = kron(uk, uk1);
  CMatrix u = ising_phases(p).asDiagonal() * uk;
  const double defect = unitarity_defect(u);
  if (defect > 1e-10) {
    throw NumericalError("Floquet unitarity defect " + std::to_string(defect));
  }
  return u;
}

namespace {

CMatrix matrix_power(const CMatrix& u, int t) {
  CMatrix acc;
  bool have = false;
  CMatrix sq = u;
  int rem = t;
  while (rem > 0) {
    if (rem & 1) {
      acc = have ? CMatrix(acc * sq) : sq;
      have = true;
    }
    rem >>= 1;
    if (rem > 0) sq = sq * sq;
  }
  return acc;
}

}  // namespace

cplx trace_power(const CMatrix& u, int t) {
  if (u.rows() != u.cols()) throw ValidationError("trace_power: non-square");
  if (t < 1) throw ValidationError("trace_power: t must be >= 1");
  if (t % 2 == 0) {
    // Tr u^t = sum_{ij} (u^{t/2})_{ij} (u^{t/2})_{ji}: saves the last
    // matrix product (t = 2 needs no product at all).
    const CMatrix half = t == 2 ? u : matrix_power(u, t / 2);
    return (half.array() * half.transpose().array()).sum();
  }
  return matrix_power(u, t).trace();
}

}  // namespace qdual
