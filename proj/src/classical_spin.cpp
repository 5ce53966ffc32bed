#include "qdual/classical_spin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace qdual {

namespace {

constexpr double kChartSwitch = 0.9;  // |n_z| beyond which the x-chart is used

Eigen::Matrix3d rot_z_prime(double theta) {
  Eigen::Matrix3d m;
  const double c = std::cos(theta), s = std::sin(theta);
  m << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return m;
}

}  // namespace

double ClassicalState::max_norm_defect() const {
  double d = 0;
  for (const auto& v : n) d = std::max(d, std::abs(v.norm() - 1.0));
  return d;
}

Eigen::Matrix3d rotation_about(const Eigen::Vector3d& axis, double angle) {
  const double nrm = axis.norm();
  if (nrm == 0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis / nrm).toRotationMatrix();
}

Eigen::Matrix3d kick_matrix(const SpinChainParams& p) {
  return rotation_about(Eigen::Vector3d(p.bx, 0, p.bz), 2.0 * p.b());
}

ClassicalState classical_step(const ClassicalState& s,
                              const SpinChainParams& p) {
  const int n = s.n_sites();
  const Eigen::Matrix3d r = kick_matrix(p);
  std::vector<Eigen::Vector3d> kicked(n);
  for (int m = 0; m < n; ++m) kicked[m] = r * s.n[m];
  ClassicalState out;
  out.n.resize(n);
  for (int m = 0; m < n; ++m) {
    const double chi = kicked[(m - 1 + n) % n].z() + kicked[(m + 1) % n].z();
    out.n[m] =
        rotation_about(Eigen::Vector3d::UnitZ(), 4.0 * p.J * chi) * kicked[m];
  }
  return out;
}

ClassicalState classical_evolve(ClassicalState s, const SpinChainParams& p,
                                int steps) {
  for (int t = 0; t < steps; ++t) s = classical_step(s, p);
  return s;
}

// ---------------------------------------------------------------------------
// Charts.  chart 1 relabels axes cyclically (x,y,z) <- roles (y,z,x), so both
// charts are canonical (oriented area-preserving cylindrical coordinates).

Eigen::Vector3d chart_to_sphere(double q, double p, int chart) {
  const double r = std::sqrt(std::max(0.0, 1.0 - p * p));
  const Eigen::Vector3d role(r * std::cos(q), r * std::sin(q), p);
  if (chart == 0) return role;
  return Eigen::Vector3d(role.z(), role.x(), role.y());
}

std::pair<double, double> sphere_to_chart(const Eigen::Vector3d& n, int chart) {
  const Eigen::Vector3d role =
      (chart == 0) ? n : Eigen::Vector3d(n.y(), n.z(), n.x());
  return {std::atan2(role.y(), role.x()), role.z()};
}

int pick_chart(const Eigen::Vector3d& n) {
  return (std::abs(n.z()) > kChartSwitch) ? 1 : 0;
}

namespace {

// d n / d(q, p) in the given chart, 3 x 2.
Eigen::Matrix<double, 3, 2> chart_tangent(const Eigen::Vector3d& n, int chart) {
  const auto [q, p] = sphere_to_chart(n, chart);
  const double r = std::sqrt(std::max(1e-300, 1.0 - p * p));
  Eigen::Matrix<double, 3, 2> role;
  role << -r * std::sin(q), -p * std::cos(q) / r,
           r * std::cos(q), -p * std::sin(q) / r,
           0, 1;
  if (chart == 0) return role;
  Eigen::Matrix<double, 3, 2> out;
  out.row(0) = role.row(2);
  out.row(1) = role.row(0);
  out.row(2) = role.row(1);
  return out;
}

// d(q, p) / d n in the given chart, 2 x 3.
Eigen::Matrix<double, 2, 3> chart_cotangent(const Eigen::Vector3d& n,
                                            int chart) {
  const Eigen::Vector3d role =
      (chart == 0) ? n : Eigen::Vector3d(n.y(), n.z(), n.x());
  const double rho2 = std::max(1e-300, role.x() * role.x() +
                                           role.y() * role.y());
  Eigen::Matrix<double, 2, 3> d_role;
  d_role << -role.y() / rho2, role.x() / rho2, 0,
             0, 0, 1;
  if (chart == 0) return d_role;
  Eigen::Matrix<double, 2, 3> out;
  out.col(0) = d_role.col(2);
  out.col(1) = d_role.col(0);
  out.col(2) = d_role.col(1);
  return out;
}

}  // namespace

Eigen::MatrixXd step_jacobian_embedding(const ClassicalState& s,
                                        const SpinChainParams& p) {
  const int n = s.n_sites();
  const Eigen::Matrix3d r = kick_matrix(p);
  std::vector<Eigen::Vector3d> kicked(n);
  for (int m = 0; m < n; ++m) kicked[m] = r * s.n[m];
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  const Eigen::RowVector3d ez_r = Eigen::RowVector3d(0, 0, 1) * r;
  for (int m = 0; m < n; ++m) {
    const double chi = kicked[(m - 1 + n) % n].z() + kicked[(m + 1) % n].z();
    const double theta = 4.0 * p.J * chi;
    const Eigen::Matrix3d rz = rotation_about(Eigen::Vector3d::UnitZ(), theta);
    jac.block<3, 3>(3 * m, 3 * m) += rz * r;
    const Eigen::Vector3d dtheta_dir = 4.0 * p.J * rot_z_prime(theta) * kicked[m];
    for (int nb : {(m - 1 + n) % n, (m + 1) % n}) {
      jac.block<3, 3>(3 * m, 3 * nb) += dtheta_dir * ez_r;
    }
  }
  return jac;
}

namespace {

Eigen::MatrixXd chart_project(const ClassicalState& s,
                              const std::vector<int>& charts,
                              const Eigen::MatrixXd& jac_embed,
                              const ClassicalState& end) {
  const int n = s.n_sites();
  // E: (dq_1..dq_N, dp_1..dp_N) -> embedded tangent at s.
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(3 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const Eigen::Matrix<double, 3, 2> t = chart_tangent(s.n[m], charts[m]);
    e.block<3, 1>(3 * m, m) = t.col(0);
    e.block<3, 1>(3 * m, n + m) = t.col(1);
  }
  Eigen::MatrixXd pr = Eigen::MatrixXd::Zero(2 * n, 3 * n);
  for (int m = 0; m < n; ++m) {
    const Eigen::Matrix<double, 2, 3> c = chart_cotangent(end.n[m], charts[m]);
    pr.block<1, 3>(m, 3 * m) = c.row(0);
    pr.block<1, 3>(n + m, 3 * m) = c.row(1);
  }
  return pr * jac_embed * e;
}

}  // namespace

Eigen::MatrixXd step_jacobian_qp(const ClassicalState& s,
                                 const SpinChainParams& p) {
  const std::vector<int> charts(s.n_sites(), 0);
  return chart_project(s, charts, step_jacobian_embedding(s, p),
                       classical_step(s, p));
}

Eigen::MatrixXd monodromy(const ClassicalState& s, const SpinChainParams& p,
                          int T) {
  const int n = s.n_sites();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(3 * n, 3 * n);
  ClassicalState cur = s;
  for (int t = 0; t < T; ++t) {
    jac = step_jacobian_embedding(cur, p) * jac;
    cur = classical_step(cur, p);
  }
  std::vector<int> charts(n);
  for (int m = 0; m < n; ++m) charts[m] = pick_chart(s.n[m]);
  return chart_project(s, charts, jac, cur);
}

// ---------------------------------------------------------------------------
// Action.

namespace {

// Integrand of the kick-arc line integral int p dq for one site: the vector
// rotates about the b-axis at angular velocity 2b, so ndot = 2 bvec x n.
double arc_integrand(const Eigen::Vector3d& bvec, const Eigen::Vector3d& n0,
                     double s, const Eigen::Vector3d& axis, double two_b) {
  const Eigen::Vector3d n = rotation_about(axis, two_b * s) * n0;
  const Eigen::Vector3d ndot = 2.0 * bvec.cross(n);
  const double rho2 = n.x() * n.x() + n.y() * n.y();
  if (rho2 < 1e-28) return n.z() * 0.0;  // pole grazing: dq ill-defined, area 0
  const double qdot = (n.x() * ndot.y() - n.y() * ndot.x()) / rho2;
  return n.z() * qdot;
}

double gl10(const std::function<double(double)>& f, double a, double b) {
  static const double xs[5] = {0.1488743389816312, 0.4333953941292472,
                               0.6794095682990244, 0.8650633666889845,
                               0.9739065285171717};
  static const double ws[5] = {0.2955242247147529, 0.2692667193099963,
                               0.2190863625159820, 0.1494513491505806,
                               0.0666713443086881};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0;
  for (int i = 0; i < 5; ++i) {
    acc += ws[i] * (f(c - h * xs[i]) + f(c + h * xs[i]));
  }
  return acc * h;
}

double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                   double whole, double tol, int depth, double& unresolved) {
  const double mid = 0.5 * (a + b);
  const double left = gl10(f, a, mid), right = gl10(f, mid, b);
  const double diff = std::abs(left + right - whole);
  if (diff < tol) return left + right;
  if (depth >= 42) {
    // Pole-grazing arcs produce sharp integrable spikes; record what is
    // left unresolved and let the caller decide whether it matters.
    unresolved += diff;
    return left + right;
  }
  return adaptive_gl(f, a, mid, left, 0.6 * tol, depth + 1, unresolved) +
         adaptive_gl(f, mid, b, right, 0.6 * tol, depth + 1, unresolved);
}

double kick_arc_action(const Eigen::Vector3d& n0, const SpinChainParams& p) {
  const Eigen::Vector3d bvec(p.bx, 0, p.bz);
  const double b = p.b();
  if (b == 0) return 0.0;
  const Eigen::Vector3d axis = bvec / b;
  const auto f = [&](double s) {
    return arc_integrand(bvec, n0, s, axis, 2.0 * b);
  };
  const double whole = gl10(f, 0.0, 1.0);
  double unresolved = 0;
  const double area = adaptive_gl(f, 0.0, 1.0, whole, 1e-12, 0, unresolved);
  if (unresolved > 1e-10) {
    throw NumericalError("kick-arc quadrature failed to converge");
  }
  return area - 2.0 * bvec.dot(n0);  // b.n conserved along the kick flow
}

}  // namespace

double orbit_action(const std::vector<ClassicalState>& points,
                    const SpinChainParams& p) {
  if (points.empty()) throw ValidationError("orbit_action: empty orbit");
  const int n = points[0].n_sites();
  const Eigen::Matrix3d r = kick_matrix(p);
  double total = 0;
  for (const ClassicalState& s : points) {
    for (int m = 0; m < n; ++m) total += kick_arc_action(s.n[m], p);
    // Twist part: int p dq - H_I dt = 4J sum_n p_n p_{n+1}, post-kick momenta.
    std::vector<double> pz(n);
    for (int m = 0; m < n; ++m) pz[m] = (r * s.n[m]).z();
    double h_i = 0;
    for (int m = 0; m < n; ++m) h_i += pz[m] * pz[(m + 1) % n];
    total += 4.0 * p.J * h_i;
  }
  return mod_2pi(total);
}

double stability_prefactor(const PeriodicOrbit& orbit) {
  cplx det = 1.0;
  for (const cplx& lam : orbit.monodromy_eigenvalues) {
    if (std::abs(lam - 1.0) < 1e-6) {
      throw NumericalError("stability prefactor undefined near-bifurcation");
    }
    det *= lam - 1.0;
  }
  return orbit.T_p / std::sqrt(std::abs(det));
}

// ---------------------------------------------------------------------------
// Periodic-orbit search.

namespace {

double orbit_distance(const PeriodicOrbit& a, const PeriodicOrbit& b) {
  if (a.T != b.T || a.points[0].n_sites() != b.points[0].n_sites()) return 1e9;
  const int t_len = a.T, n = a.points[0].n_sites();
  double best = 1e9;
  for (int tau = 0; tau < t_len; ++tau) {
    for (int sh = 0; sh < n; ++sh) {
      double worst = 0;
      for (int t = 0; t < t_len; ++t) {
        for (int m = 0; m < n; ++m) {
          worst = std::max(worst, (a.points[(t + tau) % t_len]
                                       .n[(m + sh) % n] -
                                   b.points[t].n[m])
                                      .norm());
        }
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

ClassicalState decode(const Eigen::VectorXd& x, const std::vector<int>& charts) {
  const int n = static_cast<int>(charts.size());
  ClassicalState s;
  s.n.resize(n);
  for (int m = 0; m < n; ++m) {
    const double p = std::clamp(x(n + m), -1.0, 1.0);
    s.n[m] = chart_to_sphere(x(m), p, charts[m]);
  }
  return s;
}

Eigen::VectorXd residual_vec(const ClassicalState& start,
                             const ClassicalState& end,
                             const std::vector<int>& charts) {
  const int n = start.n_sites();
  Eigen::VectorXd f(2 * n);
  for (int m = 0; m < n; ++m) {
    const auto [q0, p0] = sphere_to_chart(start.n[m], charts[m]);
    const auto [q1, p1] = sphere_to_chart(end.n[m], charts[m]);
    f(m) = wrap_pi(q1 - q0);
    f(n + m) = p1 - p0;
  }
  return f;
}

int smallest_divisor_period(
    const std::vector<ClassicalState>& points,
    const std::function<double(const ClassicalState&, const ClassicalState&,
                               int)>& dist,
    int full) {
  for (int d = 1; d < full; ++d) {
    if (full % d != 0) continue;
    double worst = 0;
    for (std::size_t t = 0; t < points.size(); ++t) {
      worst = std::max(worst, dist(points[t], points[t], d));
    }
    if (worst < 1e-8) return d;
  }
  return full;
}

}  // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const SpinChainParams& p, int T,
                                                int n_seeds, double dedupe_tol,
                                                unsigned seed) {
  if (T < 1) throw ValidationError("find_periodic_orbits: T >= 1 required");
  const int n = p.n_sites;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(-kPi, kPi), up(-1.0, 1.0);
  std::vector<PeriodicOrbit> found;

  for (int trial = 0; trial < n_seeds; ++trial) {
    ClassicalState s;
    s.n.resize(n);
    for (int m = 0; m < n; ++m) s.n[m] = chart_to_sphere(uq(rng), up(rng), 0);
    std::vector<int> charts(n);
    for (int m = 0; m < n; ++m) charts[m] = pick_chart(s.n[m]);
    Eigen::VectorXd x(2 * n);
    for (int m = 0; m < n; ++m) {
      const auto [q, pp] = sphere_to_chart(s.n[m], charts[m]);
      x(m) = q;
      x(n + m) = pp;
    }

    bool converged = false;
    for (int iter = 0; iter < 60; ++iter) {
      const ClassicalState cur = decode(x, charts);
      // Re-chart if the iterate drifted toward a chart singularity.
      bool rechart = false;
      for (int m = 0; m < n; ++m) {
        if (std::abs(x(n + m)) > 0.98 && pick_chart(cur.n[m]) != charts[m]) {
          charts[m] = pick_chart(cur.n[m]);
          rechart = true;
        }
      }
      if (rechart) {
        for (int m = 0; m < n; ++m) {
          const auto [q, pp] = sphere_to_chart(cur.n[m], charts[m]);
          x(m) = q;
          x(n + m) = pp;
        }
      }

      Eigen::MatrixXd jac_embed = Eigen::MatrixXd::Identity(3 * n, 3 * n);
      ClassicalState walk = cur;
      for (int t = 0; t < T; ++t) {
        jac_embed = step_jacobian_embedding(walk, p) * jac_embed;
        walk = classical_step(walk, p);
      }
      const Eigen::VectorXd f = residual_vec(cur, walk, charts);
      if (f.lpNorm<Eigen::Infinity>() < 1e-13) {
        converged = true;
        break;
      }
      const Eigen::MatrixXd j_phi = chart_project(cur, charts, jac_embed, walk);
      const Eigen::MatrixXd j_f =
          j_phi - Eigen::MatrixXd::Identity(2 * n, 2 * n);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(j_f);
      if (qr.rank() < 2 * n) break;  // singular (e.g. every point fixed)
      Eigen::VectorXd delta = qr.solve(-f);
      if (!delta.allFinite()) break;
      if (delta.norm() > 2.0) delta *= 2.0 / delta.norm();
      // Damped update: halve until the residual decreases.
      const double f0 = f.norm();
      double lambda = 1.0;
      bool improved = false;
      for (int h = 0; h < 10; ++h) {
        Eigen::VectorXd cand = x + lambda * delta;
        for (int m = 0; m < n; ++m) {
          cand(n + m) = std::clamp(cand(n + m), -1.0, 1.0);
        }
        const ClassicalState cs = decode(cand, charts);
        const ClassicalState ce = classical_evolve(cs, p, T);
        if (residual_vec(cs, ce, charts).norm() < f0) {
          x = cand;
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) break;
    }
    if (!converged) continue;

    PeriodicOrbit orbit;
    orbit.T = T;
    ClassicalState cur = decode(x, charts);
    for (int t = 0; t < T; ++t) {
      orbit.points.push_back(cur);
      cur = classical_step(cur, p);
    }
    double res = 0;
    for (int m = 0; m < n; ++m) {
      res = std::max(res, (cur.n[m] - orbit.points[0].n[m]).norm());
    }
    orbit.residual = res;
    if (res > 1e-10) continue;
    orbit.action = orbit_action(orbit.points, p);

    bool dup = false;
    for (const PeriodicOrbit& other : found) {
      if (orbit_distance(orbit, other) < dedupe_tol &&
          std::abs(wrap_pi(orbit.action - other.action)) < 1e-8) {
        dup = true;
        break;
      }
    }
    if (dup) continue;

    // Primitive periods by divisor testing.
    orbit.T_p = smallest_divisor_period(
        orbit.points,
        [&](const ClassicalState& a, const ClassicalState&, int d) {
          const ClassicalState fw = classical_evolve(a, p, d);
          double worst = 0;
          for (int m = 0; m < n; ++m) {
            worst = std::max(worst, (fw.n[m] - a.n[m]).norm());
          }
          return worst;
        },
        T);
    orbit.r_T = T / orbit.T_p;
    orbit.N_p = n;
    for (int d = 1; d < n; ++d) {
      if (n % d != 0) continue;
      double worst = 0;
      for (const ClassicalState& pt : orbit.points) {
        for (int m = 0; m < n; ++m) {
          worst = std::max(worst, (pt.n[(m + d) % n] - pt.n[m]).norm());
        }
      }
      if (worst < 1e-8) {
        orbit.N_p = d;
        break;
      }
    }
    orbit.r_N = n / orbit.N_p;

    const Eigen::MatrixXd mono = monodromy(orbit.points[0], p, T);
    Eigen::EigenSolver<Eigen::MatrixXd> es(mono);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      orbit.monodromy_eigenvalues.push_back(es.eigenvalues()(i));
    }
    double max_lnlam = 0, min_dist_one = 1e300;
    for (const cplx& lam : orbit.monodromy_eigenvalues) {
      max_lnlam = std::max(max_lnlam, std::abs(std::log(std::abs(lam))));
      min_dist_one = std::min(min_dist_one, std::abs(lam - 1.0));
    }
    if (max_lnlam >= 0.05) {
      orbit.classification = "hyperbolic";
    } else if (min_dist_one > 0.05) {
      orbit.classification = "elliptic";
    } else {
      orbit.classification = "near-marginal";
    }
    found.push_back(std::move(orbit));
  }
  std::sort(found.begin(), found.end(),
            [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
              return a.action < b.action;
            });
  return found;
}

// ---------------------------------------------------------------------------
// Euler decomposition R_b(2b) = Rz(alpha) Rx(beta) Rz(gamma).

EulerAngles euler_decompose(double bx, double bz) {
  EulerAngles out;
  const double b = std::hypot(bx, bz);
  if (b == 0) return out;
  const Eigen::Matrix3d r =
      rotation_about(Eigen::Vector3d(bx, 0, bz), 2.0 * b);
  const double sb = std::hypot(r(0, 2), r(1, 2));
  if (sb < 1e-12) {
    // Pure z-rotation (bx = 0): beta = 0, split the angle symmetrically.
    out.beta = 0;
    out.alpha = out.gamma = bz;
    return out;
  }
  out.beta = std::atan2(sb, r(2, 2));
  out.alpha = std::atan2(r(0, 2), -r(1, 2));
  out.gamma = std::atan2(r(2, 0), r(2, 1));
  return out;
}

// ---------------------------------------------------------------------------
// Phase portrait (N = 1).

PhasePortrait phase_portrait(const SpinChainParams& p, int n_points,
                             int n_steps, unsigned seed) {
  if (p.n_sites != 1) {
    throw ValidationError("phase_portrait implemented for N = 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(-kPi, kPi), up(-1.0, 1.0);
  PhasePortrait out;
  out.orbits.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    ClassicalState s;
    s.n.push_back(chart_to_sphere(uq(rng), up(rng), 0));
    out.orbits[i].emplace_back(sphere_to_chart(s.n[0], 0));
    for (int t = 0; t < n_steps; ++t) {
      s = classical_step(s, p);
      out.orbits[i].emplace_back(sphere_to_chart(s.n[0], 0));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrable enumeration (bx = 0).

std::vector<IntegrableOrbit> integrable_enumeration(const SpinChainParams& p,
                                                    int T,
                                                    std::size_t max_count) {
  if (p.bx != 0) throw ValidationError("integrable enumeration needs bx = 0");
  const int n = p.n_sites;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, (i - 1 + n) % n) += 4.0 * T * p.J;
    c(i, (i + 1) % n) += 4.0 * T * p.J;
  }
  // |rhs_i| <= 8 T |J| for |p| <= 1 fixes the admissible winding window.
  const double span = 8.0 * T * std::abs(p.J);
  const int m_lo = static_cast<int>(std::ceil((-span + 2 * p.bz * T) /
                                              (2 * kPi)));
  const int m_hi = static_cast<int>(std::floor((span + 2 * p.bz * T) /
                                               (2 * kPi)));
  std::vector<IntegrableOrbit> out;
  if (m_hi < m_lo) return out;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c);
  const bool full_rank = cod.rank() == n;
  Eigen::MatrixXd kernel;
  if (!full_rank) {
    kernel = Eigen::FullPivLU<Eigen::MatrixXd>(c).kernel();
  }

  std::vector<int> m(n, m_lo);
  std::size_t visited = 0;
  while (true) {
    if (++visited > max_count) {
      throw CapExceededError("integrable enumeration exceeded max_count");
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = 2 * kPi * m[i] - 2 * p.bz * T;
    Eigen::VectorXd sol = cod.solve(rhs);
    bool feasible = (c * sol - rhs).lpNorm<Eigen::Infinity>() < 1e-9;
    if (feasible && !full_rank) {
      // Least-norm representative may violate |p| <= 1 while the affine
      // family still intersects the cube: scan the kernel.
      if (sol.lpNorm<Eigen::Infinity>() > 1.0 + 1e-12) {
        bool ok = false;
        const int kd = static_cast<int>(kernel.cols());
        const int steps = 121;
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(kd);
        std::function<bool(int)> scan = [&](int level) {
          if (level == kd) {
            const Eigen::VectorXd cand = sol + kernel * coef;
            if (cand.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12) {
              sol = cand;
              return true;
            }
            return false;
          }
          for (int i = 0; i < steps; ++i) {
            coef(level) = -1.5 + 3.0 * i / (steps - 1);
            if (scan(level + 1)) return true;
          }
          return false;
        };
        ok = scan(0);
        feasible = ok;
      }
    }
    if (feasible && sol.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12) {
      IntegrableOrbit orb;
      orb.m = m;
      orb.p = sol;
      double h = 0;
      for (int i = 0; i < n; ++i) h += sol(i) * sol((i + 1) % n);
      orb.action = mod_2pi(4.0 * T * p.J * h);
      out.push_back(std::move(orb));
    }
    int pos = 0;
    while (pos < n && ++m[pos] > m_hi) {
      m[pos] = m_lo;
      ++pos;
    }
    if (pos == n) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Period-2 manifold.

ManifoldFamily manifold_solutions(const SpinChainParams& p) {
  if (p.J == 0) throw ValidationError("manifold condition degenerate at J = 0");
  const double b = p.b();
  const double target = b * std::cos(b) / std::sin(b);  // b cot b
  const auto g = [&](double chi) {
    return p.bz * std::tan(2.0 * p.J * chi) - target;
  };
  ManifoldFamily fam;
  // tan branches: 2J chi in (k pi - pi/2, k pi + pi/2).
  const double half = kPi / (4.0 * std::abs(p.J));
  const int k_max = static_cast<int>(std::ceil(2.0 / half)) + 1;
  for (int k = -k_max; k <= k_max; ++k) {
    const double center = k * kPi / (2.0 * p.J);
    double lo = std::max(-2.0, center - half * (1 - 1e-9));
    double hi = std::min(2.0, center + half * (1 - 1e-9));
    if (lo >= hi) continue;
    double flo = g(lo), fhi = g(hi);
    if (flo == 0) {
      fam.chi.push_back(lo);
      continue;
    }
    if (flo * fhi > 0) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = g(mid);
      if (fm == 0) {
        lo = hi = mid;
        break;
      }
      if (flo * fm < 0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    fam.chi.push_back(0.5 * (lo + hi));
  }
  std::sort(fam.chi.begin(), fam.chi.end());
  if (fam.chi.empty()) {
    fam.regime = "none";
  } else if (fam.chi.size() == 1 ||
             (fam.chi.size() == 2 &&
              std::abs(fam.chi[0] + fam.chi[1]) < 1e-10)) {
    // A symmetric +-chi pair is one physical manifold.
    fam.regime = "single";
  } else {
    fam.regime = "multiple";
  }
  if (!fam.chi.empty()) {
    double best = fam.chi[0];
    for (double c : fam.chi) {
      if (std::abs(c) < std::abs(best)) best = c;
    }
    fam.s_man = 2.0 * p.J * best * best;
  }
  return fam;
}

std::vector<ClassicalState> manifold_samples(const SpinChainParams& p,
                                             double chi, int count,
                                             unsigned seed) {
  if (p.n_sites != 4) throw ValidationError("manifold sampler needs N = 4");
  const Eigen::Matrix3d r = kick_matrix(p);
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d u = r.transpose() * ez;
  Eigen::Vector3d dir = ez.cross(u);
  if (dir.norm() < 1e-12) {
    throw ValidationError("manifold sampler degenerate: kick preserves z");
  }
  dir.normalize();
  // Least-norm point on the intersection of s.ez = chi and s.u = chi.
  Eigen::Matrix<double, 2, 3> bmat;
  bmat.row(0) = ez.transpose();
  bmat.row(1) = u.transpose();
  const Eigen::Vector2d rhs(chi, chi);
  const Eigen::Vector3d s0 =
      bmat.transpose() * (bmat * bmat.transpose()).inverse() * rhs;
  const double s0n2 = s0.squaredNorm();
  if (s0n2 >= 4.0) {
    throw ValidationError("manifold sampler: constraint line misses |s| <= 2");
  }
  const double t_max = std::sqrt(4.0 - s0n2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(-0.95 * t_max, 0.95 * t_max);
  std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi);
  std::vector<ClassicalState> out;
  for (int i = 0; i < count; ++i) {
    ClassicalState st;
    st.n.resize(4);
    for (int pair = 0; pair < 2; ++pair) {
      const Eigen::Vector3d s = s0 + ut(rng) * dir;
      Eigen::Vector3d e1 = s.cross(Eigen::Vector3d::UnitX());
      if (e1.norm() < 1e-8) e1 = s.cross(Eigen::Vector3d::UnitY());
      e1.normalize();
      const Eigen::Vector3d e2 = s.normalized().cross(e1);
      const double rad = std::sqrt(std::max(0.0, 1.0 - 0.25 * s.squaredNorm()));
      const double psi = ua(rng);
      const Eigen::Vector3d w =
          rad * (std::cos(psi) * e1 + std::sin(psi) * e2);
      st.n[pair] = 0.5 * s + w;      // sites 0, 1
      st.n[pair + 2] = 0.5 * s - w;  // sites 2, 3
    }
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace qdual
