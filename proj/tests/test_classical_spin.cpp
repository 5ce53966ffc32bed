// Unit tests for the classical kicked-chain dynamics, Jacobians, orbits,
// actions, integrable enumeration, and the period-2 manifold.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qdual/classical_spin.hpp"

using namespace qdual;

namespace {

ClassicalState random_state(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(-kPi, kPi), up(-1.0, 1.0);
  ClassicalState s;
  for (int m = 0; m < n; ++m) s.n.push_back(chart_to_sphere(uq(rng), up(rng), 0));
  return s;
}

}  // namespace

TEST_CASE("classical_step: J=0, b=0 is the identity") {
  SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0, .bx = 0, .bz = 0};
  const ClassicalState s = random_state(3, 1);
  const ClassicalState t = classical_step(s, p);
  for (int m = 0; m < 3; ++m) CHECK((t.n[m] - s.n[m]).norm() < 1e-15);
}

TEST_CASE("classical_step: norm preserved over 1e4 steps") {
  SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0.7, .bx = 0.9, .bz = 0.9};
  ClassicalState s = random_state(3, 2);
  s = classical_evolve(s, p, 10000);
  CHECK(s.max_norm_defect() < 1e-12);
}

TEST_CASE("classical_step: bx=0 keeps p and winds q linearly") {
  SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.7, .bx = 0.0, .bz = 0.9};
  const ClassicalState s = random_state(4, 3);
  const ClassicalState t = classical_step(s, p);
  for (int m = 0; m < 4; ++m) {
    CHECK(std::abs(t.n[m].z() - s.n[m].z()) < 1e-14);
    const auto [q0, p0] = sphere_to_chart(s.n[m], 0);
    const auto [q1, p1] = sphere_to_chart(t.n[m], 0);
    const double dq_expect =
        4.0 * p.J * (s.n[(m + 3) % 4].z() + s.n[(m + 1) % 4].z()) + 2 * p.bz;
    CHECK(std::abs(wrap_pi(q1 - q0 - dq_expect)) < 1e-12);
  }
}

TEST_CASE("N=4 conservation of opposite-site overlaps") {
  SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.6, .bx = 0.9, .bz = 0.9};
  ClassicalState s = random_state(4, 4);
  const double c13 = s.n[0].dot(s.n[2]);
  const double c24 = s.n[1].dot(s.n[3]);
  for (int t = 0; t < 1000; ++t) {
    s = classical_step(s, p);
    CHECK(std::abs(s.n[0].dot(s.n[2]) - c13) < 1e-10);
    CHECK(std::abs(s.n[1].dot(s.n[3]) - c24) < 1e-10);
  }
}

TEST_CASE("bx=0, N=4 over-integrability: 6 conserved quantities") {
  SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.55, .bx = 0.0, .bz = 0.8};
  ClassicalState s = random_state(4, 5);
  double p0[4], dq13, dq24;
  for (int m = 0; m < 4; ++m) p0[m] = s.n[m].z();
  const auto q_of = [](const ClassicalState& st, int m) {
    return sphere_to_chart(st.n[m], 0).first;
  };
  dq13 = wrap_pi(q_of(s, 0) - q_of(s, 2));
  dq24 = wrap_pi(q_of(s, 1) - q_of(s, 3));
  s = classical_evolve(s, p, 500);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(s.n[m].z() - p0[m]) < 1e-10);
  CHECK(std::abs(wrap_pi(q_of(s, 0) - q_of(s, 2) - dq13)) < 1e-10);
  CHECK(std::abs(wrap_pi(q_of(s, 1) - q_of(s, 3) - dq24)) < 1e-10);
}

TEST_CASE("embedding Jacobian matches finite differences") {
  SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0.7, .bx = 0.9, .bz = 0.9};
  const ClassicalState s = random_state(3, 6);
  const Eigen::MatrixXd jac = step_jacobian_embedding(s, p);
  const double h = 1e-6;
  for (int m = 0; m < 3; ++m) {
    for (int c = 0; c < 3; ++c) {
      ClassicalState sp = s, sm = s;
      sp.n[m](c) += h;
      sm.n[m](c) -= h;
      const ClassicalState tp = classical_step(sp, p);
      const ClassicalState tm = classical_step(sm, p);
      for (int mm = 0; mm < 3; ++mm) {
        const Eigen::Vector3d fd = (tp.n[mm] - tm.n[mm]) / (2 * h);
        const Eigen::Vector3d an = jac.block<3, 1>(3 * mm, 3 * m + c);
        CHECK((fd - an).norm() < 1e-7);
      }
    }
  }
}

TEST_CASE("qp Jacobian: finite differences and symplecticity") {
  SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0.7, .bx = 0.9, .bz = 0.9};
  // A state safely away from the poles.
  ClassicalState s;
  s.n.push_back(chart_to_sphere(0.3, 0.2, 0));
  s.n.push_back(chart_to_sphere(-1.1, -0.4, 0));
  s.n.push_back(chart_to_sphere(2.0, 0.5, 0));
  const int n = 3;
  const Eigen::MatrixXd jac = step_jacobian_qp(s, p);

  const double h = 1e-6;
  for (int col = 0; col < 2 * n; ++col) {
    Eigen::VectorXd x(2 * n);
    for (int m = 0; m < n; ++m) {
      const auto [q, pp] = sphere_to_chart(s.n[m], 0);
      x(m) = q;
      x(n + m) = pp;
    }
    Eigen::VectorXd xp = x, xm = x;
    xp(col) += h;
    xm(col) -= h;
    ClassicalState sp, sm;
    for (int m = 0; m < n; ++m) {
      sp.n.push_back(chart_to_sphere(xp(m), xp(n + m), 0));
      sm.n.push_back(chart_to_sphere(xm(m), xm(n + m), 0));
    }
    const ClassicalState tp = classical_step(sp, p);
    const ClassicalState tm = classical_step(sm, p);
    for (int m = 0; m < n; ++m) {
      const auto [qp1, pp1] = sphere_to_chart(tp.n[m], 0);
      const auto [qm1, pm1] = sphere_to_chart(tm.n[m], 0);
      CHECK(std::abs(wrap_pi(qp1 - qm1) / (2 * h) - jac(m, col)) < 1e-6);
      CHECK(std::abs((pp1 - pm1) / (2 * h) - jac(n + m, col)) < 1e-6);
    }
  }

  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  CHECK((jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("euler decomposition of the kick rotation") {
  SUBCASE("generic bx=bz=0.9 recomposes entrywise") {
    const EulerAngles e = euler_decompose(0.9, 0.9);
    const Eigen::Matrix3d lhs =
        rotation_about(Eigen::Vector3d(0.9, 0, 0.9), 2 * std::hypot(0.9, 0.9));
    const Eigen::Matrix3d rhs =
        rotation_about(Eigen::Vector3d::UnitZ(), e.alpha) *
        rotation_about(Eigen::Vector3d::UnitX(), e.beta) *
        rotation_about(Eigen::Vector3d::UnitZ(), e.gamma);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(e.alpha - e.gamma) < 1e-10);
    // cos(beta) = (bz/b)^2 + (bx/b)^2 cos(2b)
    const double b = std::hypot(0.9, 0.9);
    const double expect = 0.5 + 0.5 * std::cos(2 * b);
    CHECK(std::abs(std::cos(e.beta) - expect) < 1e-12);
    // bz tan(pi/2 - alpha) = b cot(b)
    CHECK(std::abs(0.9 * std::tan(kPi / 2 - e.alpha) -
                   b * std::cos(b) / std::sin(b)) < 1e-10);
  }
  SUBCASE("bx=0: beta=0 and alpha+gamma = 2 bz") {
    const EulerAngles e = euler_decompose(0.0, 0.7);
    CHECK(e.beta == 0.0);
    CHECK(std::abs(e.alpha + e.gamma - 1.4) < 1e-12);
  }
  SUBCASE("bz=0: cos beta = cos 2b") {
    const EulerAngles e = euler_decompose(0.6, 0.0);
    CHECK(std::abs(std::cos(e.beta) - std::cos(1.2)) < 1e-12);
  }
  SUBCASE("b=0 returns zeros") {
    const EulerAngles e = euler_decompose(0.0, 0.0);
    CHECK(e.alpha == 0.0);
    CHECK(e.beta == 0.0);
  }
}

TEST_CASE("phase portrait") {
  SUBCASE("bx=0: orbits on circles p = const") {
    SpinChainParams p{.two_j = 1, .n_sites = 1, .J = 0.7, .bx = 0.0,
                      .bz = 0.9 * std::sqrt(2.0)};
    const PhasePortrait pp = phase_portrait(p, 20, 200);
    for (const auto& orbit : pp.orbits) {
      double lo = 2, hi = -2;
      for (const auto& [q, mom] : orbit) {
        lo = std::min(lo, mom);
        hi = std::max(hi, mom);
      }
      CHECK(hi - lo < 1e-10);
    }
  }
  SUBCASE("mixed phase: generic seeds spread in p") {
    SpinChainParams p{.two_j = 1, .n_sites = 1, .J = 0.7, .bx = 0.9,
                      .bz = 0.9};
    const PhasePortrait pp = phase_portrait(p, 30, 300);
    double max_spread = 0;
    for (const auto& orbit : pp.orbits) {
      double lo = 2, hi = -2;
      for (const auto& [q, mom] : orbit) {
        lo = std::min(lo, mom);
        hi = std::max(hi, mom);
      }
      max_spread = std::max(max_spread, hi - lo);
    }
    CHECK(max_spread > 0.5);
  }
  SUBCASE("n_steps=0 returns the initial points") {
    SpinChainParams p{.two_j = 1, .n_sites = 1, .J = 0.7, .bx = 0.9,
                      .bz = 0.9};
    const PhasePortrait pp = phase_portrait(p, 7, 0);
    CHECK(pp.orbits.size() == 7);
    for (const auto& orbit : pp.orbits) CHECK(orbit.size() == 1);
  }
}

TEST_CASE("kicked top N=1, T=1: exactly two periodic orbits") {
  SpinChainParams p{.two_j = 1, .n_sites = 1, .J = 0.7, .bx = 0.9, .bz = 0.9};
  const auto orbits = find_periodic_orbits(p, 1, 400);
  CHECK(orbits.size() == 2);
  for (const auto& o : orbits) {
    CHECK(o.residual < 1e-10);
    CHECK(o.monodromy_eigenvalues.size() == 2);
    // Symplectic pairing lambda, 1/lambda.
    const cplx prod = o.monodromy_eigenvalues[0] * o.monodromy_eigenvalues[1];
    CHECK(std::abs(prod - 1.0) < 1e-6);
  }
}

TEST_CASE("orbit action: J=0, b=0 trivially zero") {
  SpinChainParams p{.two_j = 1, .n_sites = 2, .J = 0, .bx = 0, .bz = 0};
  std::vector<ClassicalState> pts = {random_state(2, 9)};
  CHECK(std::abs(orbit_action(pts, p)) < 1e-12);
}

TEST_CASE("orbit families: cyclic site shifts share action and stability") {
  SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0.7, .bx = 0.9, .bz = 0.9};
  const auto orbits = find_periodic_orbits(p, 1, 150);
  REQUIRE(!orbits.empty());
  const PeriodicOrbit& o = orbits.front();
  // Shift the whole orbit by one site and recompute.
  std::vector<ClassicalState> shifted;
  for (const ClassicalState& s : o.points) {
    ClassicalState t;
    for (int m = 0; m < 3; ++m) t.n.push_back(s.n[(m + 1) % 3]);
    shifted.push_back(t);
  }
  CHECK(std::abs(wrap_pi(orbit_action(shifted, p) - o.action)) < 1e-8);
  const Eigen::MatrixXd m0 = monodromy(o.points[0], p, 1);
  const Eigen::MatrixXd m1 = monodromy(shifted[0], p, 1);
  const double d0 =
      std::abs((m0 - Eigen::MatrixXd::Identity(6, 6)).determinant());
  const double d1 =
      std::abs((m1 - Eigen::MatrixXd::Identity(6, 6)).determinant());
  CHECK(std::abs(d0 - d1) < 1e-8 * std::max(1.0, d0));
}

TEST_CASE("stability prefactor") {
  SUBCASE("marginal eigenvalue rejected") {
    PeriodicOrbit o;
    o.T_p = 1;
    o.monodromy_eigenvalues = {cplx(1.0 + 1e-9, 0), cplx(1.0, 1e-9)};
    CHECK_THROWS_AS((void)stability_prefactor(o), NumericalError);
  }
  SUBCASE("hyperbolic value") {
    PeriodicOrbit o;
    o.T_p = 2;
    o.monodromy_eigenvalues = {cplx(3.0, 0), cplx(1.0 / 3.0, 0)};
    // det(M-1) = (3-1)(1/3-1) = -4/3.
    CHECK(stability_prefactor(o) ==
          doctest::Approx(2.0 / std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("integrable enumeration") {
  SUBCASE("uniform winding gives the symmetric solution") {
    SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0.7, .bx = 0.0,
                      .bz = 0.9};
    const auto orbits = integrable_enumeration(p, 1);
    CHECK(!orbits.empty());
    bool saw_uniform = false;
    for (const auto& o : orbits) {
      bool uni = true;
      for (int mi : o.m) uni = uni && (mi == o.m[0]);
      if (!uni) continue;
      saw_uniform = true;
      const double expect = (2 * kPi * o.m[0] - 2 * p.bz) / (8 * p.J);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(o.p(i) - expect) < 1e-10);
    }
    CHECK(saw_uniform);
  }
  SUBCASE("empty window when bz > 4J and 4J + bz < pi/T") {
    SpinChainParams p{.two_j = 1, .n_sites = 3, .J = 0.2, .bx = 0.0,
                      .bz = 0.9};
    // bz=0.9 > 4J=0.8 and 4J+bz=1.7 < pi.
    CHECK(integrable_enumeration(p, 1).empty());
  }
  SUBCASE("even-N resonant circulant handled") {
    SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.7, .bx = 0.0,
                      .bz = 0.9};
    const auto orbits = integrable_enumeration(p, 1);
    CHECK(!orbits.empty());
    for (const auto& o : orbits) {
      for (int i = 0; i < 4; ++i) {
        const double lhs = 4.0 * p.J * (o.p((i + 3) % 4) + o.p((i + 1) % 4));
        CHECK(std::abs(lhs - (2 * kPi * o.m[i] - 2 * p.bz)) < 1e-8);
        CHECK(std::abs(o.p(i)) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("manifold solutions") {
  SUBCASE("small J: no manifold") {
    SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.2, .bx = 0.3,
                      .bz = 0.3};
    CHECK(manifold_solutions(p).regime == "none");
  }
  SUBCASE("J=0.6: single manifold near chi=0.33") {
    SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.6, .bx = 0.9,
                      .bz = 0.9};
    const ManifoldFamily fam = manifold_solutions(p);
    CHECK(fam.regime == "single");
    double chi = 2;
    for (double c : fam.chi) {
      if (std::abs(c) < std::abs(chi)) chi = c;
    }
    CHECK(std::abs(p.bz * std::tan(2 * p.J * chi) -
                   p.b() * std::cos(p.b()) / std::sin(p.b())) < 1e-12);
    CHECK(std::abs(std::abs(chi) - 0.334) < 0.01);
    CHECK(fam.s_man == doctest::Approx(2 * p.J * chi * chi).epsilon(1e-12));
  }
  SUBCASE("J=0.8: multiple manifolds") {
    SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.8, .bx = 0.9,
                      .bz = 0.9};
    CHECK(manifold_solutions(p).regime == "multiple");
  }
}

TEST_CASE("manifold samples are period-2 orbits with the closed-form action") {
  SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.6, .bx = 0.9, .bz = 0.9};
  const ManifoldFamily fam = manifold_solutions(p);
  REQUIRE(fam.regime == "single");
  double chi = 2;
  for (double c : fam.chi) {
    if (std::abs(c) < std::abs(chi)) chi = c;
  }
  const auto samples = manifold_samples(p, chi, 20);
  for (const ClassicalState& s : samples) {
    // Constraints hold.
    const Eigen::Matrix3d r = kick_matrix(p);
    CHECK(std::abs(s.n[0].z() + s.n[2].z() - chi) < 1e-12);
    CHECK(std::abs(s.n[1].z() + s.n[3].z() - chi) < 1e-12);
    CHECK(std::abs((r * (s.n[0] + s.n[2])).z() - chi) < 1e-12);
    CHECK(std::abs((r * (s.n[1] + s.n[3])).z() - chi) < 1e-12);
    // Exactly period 2.
    const ClassicalState two = classical_evolve(s, p, 2);
    double res = 0;
    for (int m = 0; m < 4; ++m) {
      res = std::max(res, (two.n[m] - s.n[m]).norm());
    }
    CHECK(res < 1e-10);
    // Action of the 2-step orbit: N * 2 J chi^2 mod 2pi.
    std::vector<ClassicalState> pts = {s, classical_step(s, p)};
    const double action = orbit_action(pts, p);
    const double expect = mod_2pi(4.0 * 2.0 * p.J * chi * chi);
    CHECK(std::abs(wrap_pi(action - expect)) < 1e-8);
  }
}

TEST_CASE("manifold orbits have 4 unit monodromy eigenvalues") {
  SpinChainParams p{.two_j = 1, .n_sites = 4, .J = 0.6, .bx = 0.9, .bz = 0.9};
  const ManifoldFamily fam = manifold_solutions(p);
  double chi = 2;
  for (double c : fam.chi) {
    if (std::abs(c) < std::abs(chi)) chi = c;
  }
  const auto samples = manifold_samples(p, chi, 3);
  for (const ClassicalState& s : samples) {
    const Eigen::MatrixXd m = monodromy(s, p, 2);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    int near_one = 0;
    for (Eigen::Index i = 0; i < 8; ++i) {
      if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-6) ++near_one;
    }
    CHECK(near_one >= 4);
  }
}
