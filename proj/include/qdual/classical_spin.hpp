// Classical limit of the kicked spin chain: dynamics on a product of unit
// spheres, periodic-orbit search with monodromy and action, integrable
// enumeration at bx = 0, and the period-2 invariant-manifold solver.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdual/spin_chain.hpp"
#include "qdual/types.hpp"

namespace qdual {

// Configuration of N classical spins, one unit 3-vector per site.
// Canonical coordinates per site: q = atan2(n_y, n_x), p = n_z.
struct ClassicalState {
  std::vector<Eigen::Vector3d> n;

  int n_sites() const { return static_cast<int>(n.size()); }
  double max_norm_defect() const;
};

// Rotation by `angle` about the given axis (normalized internally).
Eigen::Matrix3d rotation_about(const Eigen::Vector3d& axis, double angle);

// The kick rotation R_b(2b) about (bx, 0, bz).
Eigen::Matrix3d kick_matrix(const SpinChainParams& p);

// One Floquet step: kick all sites by R_b(2b), then twist each site about z
// by 4J (n^z_{m-1} + n^z_{m+1}) computed from the post-kick configuration.
ClassicalState classical_step(const ClassicalState& s, const SpinChainParams& p);
ClassicalState classical_evolve(ClassicalState s, const SpinChainParams& p,
                                int steps);

// Chart helpers.  chart 0: cylindrical about z (q, p) = (atan2(ny,nx), nz);
// chart 1: cylindrical about x, used near the poles |nz| ~ 1.
Eigen::Vector3d chart_to_sphere(double q, double p, int chart);
std::pair<double, double> sphere_to_chart(const Eigen::Vector3d& n, int chart);
int pick_chart(const Eigen::Vector3d& n);

// d n' / d n of one step, as a dense 3N x 3N block matrix (exact; the step is
// a composition of rotations whose angles depend linearly on neighbor n^z).
Eigen::MatrixXd step_jacobian_embedding(const ClassicalState& s,
                                        const SpinChainParams& p);

// One-step Jacobian in canonical (q_1..q_N, p_1..p_N) coordinates using the
// z-chart on both sides; valid away from the poles.
Eigen::MatrixXd step_jacobian_qp(const ClassicalState& s,
                                 const SpinChainParams& p);

// Monodromy of T steps starting from `s`, in per-site chart coordinates
// (charts picked per endpoint site; eigenvalues are chart-independent).
Eigen::MatrixXd monodromy(const ClassicalState& s, const SpinChainParams& p,
                          int T);

struct PeriodicOrbit {
  std::vector<ClassicalState> points;  // length T, pre-kick configurations
  int T = 0;
  int T_p = 0, N_p = 0;     // primitive time / spatial periods
  int r_T = 1, r_N = 1;     // repetition counts
  double action = 0.0;      // mod 2pi
  std::vector<cplx> monodromy_eigenvalues;
  double residual = 0.0;
  std::string classification;  // hyperbolic | elliptic | near-marginal
};

// Damped-Newton multistart search for period-T orbits; orbits deduplicated
// modulo cyclic time and site shifts.
std::vector<PeriodicOrbit> find_periodic_orbits(const SpinChainParams& p, int T,
                                                int n_seeds,
                                                double dedupe_tol = 1e-6,
                                                unsigned seed = 1234);

// Action of a closed T-step trajectory, mod 2pi: per step the twist part
// 4J sum_n p_n p_{n+1} (post-kick momenta) plus the kick-arc line integral
// int p dq minus the conserved kick energy 2 b.n.
double orbit_action(const std::vector<ClassicalState>& points,
                    const SpinChainParams& p);

// |D| = T_p / sqrt(|det(M - 1)|); throws NumericalError near a bifurcation
// (monodromy eigenvalue within 1e-6 of 1).
double stability_prefactor(const PeriodicOrbit& orbit);

struct EulerAngles {
  double alpha = 0, beta = 0, gamma = 0;  // R_b(2b) = Rz(alpha)Rx(beta)Rz(gamma)
};
EulerAngles euler_decompose(double bx, double bz);

// Stroboscopic (q, p) samples per trajectory for N = 1.
struct PhasePortrait {
  std::vector<std::vector<std::pair<double, double>>> orbits;
};
PhasePortrait phase_portrait(const SpinChainParams& p, int n_points,
                             int n_steps, unsigned seed = 42);

// Integrable (bx = 0) periodic orbits: integer winding vectors m with
// momenta solving 4TJ (p_{n-1} + p_{n+1}) = 2 pi m_n - 2 bz T, |p_n| <= 1.
struct IntegrableOrbit {
  std::vector<int> m;
  Eigen::VectorXd p;
  double action = 0.0;  // mod 2pi, over T steps
};
std::vector<IntegrableOrbit> integrable_enumeration(const SpinChainParams& p,
                                                    int T,
                                                    std::size_t max_count =
                                                        1000000);

// Period-2 manifold condition bz tan(2J chi) = b cot(b), chi in [-2, 2].
struct ManifoldFamily {
  std::vector<double> chi;
  std::string regime;  // none | single | multiple
  double s_man = 0.0;  // 2 J chi^2 for the first solution (single regime)
};
ManifoldFamily manifold_solutions(const SpinChainParams& p);

// Random N=4 configurations on the period-2 manifold with the given chi:
// (n_1 + n_3) and (n_2 + n_4) each have z-component chi both before and
// after the kick rotation.
std::vector<ClassicalState> manifold_samples(const SpinChainParams& p,
                                             double chi, int count,
                                             unsigned seed = 7);

}  // namespace qdual
