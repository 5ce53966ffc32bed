// Quantum kicked spin chain: spin-j operators, single-kick rotation, and the
// Floquet operator U = U_I * U_K on a periodic chain of N spins.  The N=1
// chain reduces to the kicked top.
#pragma once

#include <cmath>

#include "qdual/types.hpp"

namespace qdual {

struct SpinChainParams {
  int two_j = 1;     // stores 2j so half-integer spins are exact
  int n_sites = 1;   // chain length N (periodic)
  double J = 0.0;    // Ising coupling
  double bx = 0.0;   // kick field, x component
  double bz = 0.0;   // kick field, z component

  double j() const { return 0.5 * two_j; }
  double j_plus_half() const { return 0.5 * (two_j + 1); }
  double b() const { return std::hypot(bx, bz); }
  double phi() const { return std::atan2(bx, bz); }  // tan(phi) = bx/bz
  int site_dim() const { return two_j + 1; }

  std::int64_t hilbert_dim(std::int64_t limit = (std::int64_t{1} << 60)) const {
    return checked_ipow(site_dim(), n_sites, limit);
  }

  void validate() const {
    if (two_j < 1) throw ValidationError("two_j must be >= 1");
    if (n_sites < 1) throw ValidationError("n_sites must be >= 1");
  }
};

// Standard angular-momentum matrices in the Sz eigenbasis, m = -j..+j
// ascending, dimension two_j + 1 (hbar = 1).
CMatrix spin_x(int two_j);
CMatrix spin_y(int two_j);
CMatrix spin_z(int two_j);

// Single-site kick rotation exp(-2i b.S) with b = (bx, 0, bz), computed by
// eigen-decomposition of the Hermitian generator.
CMatrix kick_rotation(const SpinChainParams& p);

// Diagonal of U_I over the product basis (site 0 is the slowest index):
// phase exp(-i * 4J * sum_n m_n m_{n+1} / (j+1/2)), cyclic in n.
CVector ising_phases(const SpinChainParams& p);

// Full Floquet operator U = U_I * U_K, dimension (two_j+1)^N.  Throws
// CapExceededError if the dimension exceeds `dense_cap` and NumericalError
// if the result fails the unitarity gate.
CMatrix build_floquet(const SpinChainParams& p,
                      std::int64_t dense_cap = kDefaultDenseCap);

// Tr(U^T) by binary powering (exact matrix products, no eigensolve).
cplx trace_power(const CMatrix& u, int t);

// Kronecker product, first factor slowest (site-major convention).
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace qdual
