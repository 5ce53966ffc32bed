// Coupled cat-map chain on the 2N-torus: exact stepping with winding
// numbers, block-circulant stability matrix, 2D symbolic dynamics with
// Green's-function orbit reconstruction, partner-orbit swaps, and the
// discrete action functional.
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qdual/types.hpp"

namespace qdual {

// Smooth on-site potential: eps * sum_{k=1}^{3} (c_k/k^2) cos(2 pi k q + phi_k).
struct CatPotential {
  double eps = 0;
  std::array<double, 3> c{};
  std::array<double, 3> phi{};

  double value(double q) const;
  double deriv(double q) const;
  static CatPotential random(double eps, std::mt19937_64& rng);
};

struct CatMapParams {
  int a = 2, b = 2, d = -1;
  int n_sites = 1;
  int t_period = 1;
  CatPotential v;

  int nu() const { return a + b; }
  // Sufficient condition for full hyperbolicity of the unperturbed chain.
  bool hyperbolicity_condition() const {
    return std::abs(a + b) > 2 * std::abs(d) + 2;
  }
};

struct CatState {
  Eigen::VectorXd q, p;  // length N, values in [0, 1)
};

struct CatWindings {
  Eigen::VectorXi mq, mp;
};

// One application of the torus automorphism (with the V' perturbation);
// returns the integer windings that re-fold coordinates into [0, 1).
std::pair<CatState, CatWindings> catmap_step(const CatState& z,
                                             const CatMapParams& p);

struct StabilityMatrix {
  Eigen::MatrixXd m;                // 2N x 2N block circulant
  std::vector<cplx> eigenvalues;    // from per-Fourier-mode 2x2 blocks
  bool hyperbolic = false;          // all eigenvalues real with |lambda| != 1
};
StabilityMatrix build_M(const CatMapParams& p);

// N x T integer symbol array; first index site, second index time.
using SymbolArray = Eigen::MatrixXi;

struct CatOrbit {
  Eigen::MatrixXd q, p;  // N x T
  SymbolArray m;
  double action = 0;     // mod 1
  bool admissible = false;
  double residual = 0;   // defect of the discrete Newton equation
};

// Reconstruct the orbit encoded by `m` for d = -1, V = 0 through the 2D
// discrete Green's function of (-Delta + nu - 4) on the N x T torus.
CatOrbit orbit_from_symbols(const SymbolArray& m, const CatMapParams& p);

// Discrete action: sum over the lattice of
//   nu q^2/2 - q q_{n,t+1} + d q q_{n+1,t} - m q - V(q),   reported mod 1;
// stationary on orbits and matching the accumulated quantum phase.
double orbit_action_catmap(const CatOrbit& orbit, const CatMapParams& p);

// Empirical admissibility-safe symbol window [lo, hi].
struct SymbolAlphabet {
  int lo = 0, hi = 0;
};
SymbolAlphabet restricted_alphabet(int nu);
SymbolArray random_symbol_array(int n, int t, int nu, std::mt19937_64& rng);

// Rectangular symbol region (indices wrap on the torus).
struct SymbolRegion {
  int n0 = 0, t0 = 0, height = 0, width = 0;
};

struct PartnerPair {
  CatOrbit gamma, gamma_bar;
  double delta_s = 0;    // S_gamma - S_gamma_bar, wrapped to (-1/2, 1/2]
  double shadowing = 0;  // max over gamma_bar points of min torus distance
};

// Swap the interiors of two congruent regions whose surrounding annuli of
// the given width carry identical symbols (the encounter).
PartnerPair partner_from_swap(const SymbolArray& m, const CatMapParams& p,
                              const SymbolRegion& a, const SymbolRegion& b,
                              int annulus_width);

// Sweep the encounter width on a size x size symbol torus: per trial a fresh
// random array with two 2 x 2 interiors; for each width the annulus of the
// first interior is copied onto the second before the swap, so |Delta S|
// probes only the unmatched environment beyond the encounter.
struct PartnerExperimentRow {
  int trial = 0;
  int width = 0;
  double abs_delta_s = 0;
  double shadowing = 0;
  bool valid = false;  // both orbits reconstruct with residual < 1e-9
};
std::vector<PartnerExperimentRow> partner_width_experiment(
    int size, int nu, int n_trials, int w_min, int w_max, unsigned seed);

}  // namespace qdual
