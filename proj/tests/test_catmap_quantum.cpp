// Unit tests for the quantized cat-map chain: kick/interaction builders
// against independent element formulas, exact trace duality, the discrete
// action versus the accumulated quantum phase, and the form factor.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdual/catmap_quantum.hpp"
#include "qdual/spin_chain.hpp"

using namespace qdual;

TEST_CASE("single-site kick is unitary with unit-modulus determinant") {
  for (const auto& [L, a, b] : std::vector<std::array<int, 3>>{
           {2, 2, 2}, {3, 2, 1}, {5, 2, 1}, {4, 6, 7}}) {
    const CMatrix u = build_u_kick(L, a, b);
    CHECK(unitarity_defect(u) < 1e-10);
    CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-10);
  }
}

TEST_CASE("evolution matrix elements match the explicit formula") {
  // <m|U|k> = exp(i sum_n f1(m_n, m_{n+1})) L^{-N/2} exp(i sum_n f2(m_n, k_n))
  const int L = 3, n = 2;
  std::mt19937_64 rng(11);
  CatQuantumParams p;
  p.L = L;
  p.a = 2;
  p.b = 1;
  p.n_sites = n;
  p.v = CatPotential::random(0.3, rng);
  const CMatrix u = build_u_cat(p);
  const int dim = 9;
  REQUIRE(u.rows() == dim);
  for (int row = 0; row < dim; ++row) {
    // Slot 0 fastest, labels 1..L.
    const std::array<int, 2> m{row % L + 1, row / L + 1};
    for (int col = 0; col < dim; ++col) {
      const std::array<int, 2> k{col % L + 1, col / L + 1};
      double phase = 0;
      for (int s = 0; s < n; ++s) {
        phase += cat_f1(L, p.v, m[s], m[(s + 1) % n]);
        phase += cat_f2(L, p.a, p.b, m[s], k[s]);
      }
      const cplx expect = std::exp(cplx(0, phase)) / double(L);
      CHECK(std::abs(u(row, col) - expect) < 1e-12);
    }
  }
}

TEST_CASE("evolution commutes with the cyclic site translation") {
  const int L = 2, n = 3, dim = 8;
  std::mt19937_64 rng(12);
  CatQuantumParams p;
  p.L = L;
  p.n_sites = n;
  p.v = CatPotential::random(0.4, rng);
  const CMatrix u = build_u_cat(p);
  CMatrix perm = CMatrix::Zero(dim, dim);
  for (int idx = 0; idx < dim; ++idx) {
    // Site s at tuple digit s (slot 0 fastest); shift sites by one.
    int shifted = 0;
    for (int s = 0; s < n; ++s) {
      const int digit = (idx / (s == 0 ? 1 : (s == 1 ? L : L * L))) % L;
      int target = (s + 1) % n;
      int stride = 1;
      for (int t = 0; t < target; ++t) stride *= L;
      shifted += digit * stride;
    }
    perm(shifted, idx) = 1;
  }
  CHECK((u * perm - perm * u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace duality and space-time exchange") {
  SUBCASE("V = 0, L = 2, N = 3, T = 2") {
    CatQuantumParams p;
    p.L = 2;
    p.n_sites = 3;
    p.t_period = 2;
    const CatDualityReport rep = duality_check_cat(p);
    CHECK(rep.err_dual < 1e-10);
    CHECK(rep.err_exchange < 1e-10);
    CHECK(rep.w_unitarity < 1e-9);
  }
  SUBCASE("random V, L = 3, N = 2, T = 2") {
    std::mt19937_64 rng(13);
    CatQuantumParams p;
    p.L = 3;
    p.a = 2;
    p.b = 1;
    p.n_sites = 2;
    p.t_period = 2;
    p.v = CatPotential::random(0.5, rng);
    const CatDualityReport rep = duality_check_cat(p);
    CHECK(rep.err_dual < 1e-10);
    CHECK(rep.err_exchange < 1e-10);
    CHECK(rep.w_unitarity < 1e-9);
  }
  SUBCASE("sign-flipped V, L = 2, N = 4, T = 3") {
    std::mt19937_64 rng(14);
    CatQuantumParams p;
    p.L = 2;
    p.n_sites = 4;
    p.t_period = 3;
    p.v = CatPotential::random(0.5, rng);
    p.v.eps = -p.v.eps;
    const CatDualityReport rep = duality_check_cat(p);
    CHECK(rep.err_dual < 1e-10);
    CHECK(rep.err_exchange < 1e-10);
  }
  SUBCASE("N = T is trivially exchange symmetric") {
    std::mt19937_64 rng(15);
    CatQuantumParams p;
    p.L = 2;
    p.n_sites = 3;
    p.t_period = 3;
    p.v = CatPotential::random(0.2, rng);
    const CatDualityReport rep = duality_check_cat(p);
    CHECK(rep.err_exchange == 0.0);
    CHECK(rep.err_dual < 1e-10);
  }
}

TEST_CASE("cat_trace picks the cheaper side and matches the direct trace") {
  std::mt19937_64 rng(16);
  CatQuantumParams p;
  p.L = 2;
  p.n_sites = 4;
  p.t_period = 2;
  p.v = CatPotential::random(0.3, rng);
  const cplx direct = trace_power(build_u_cat(p), p.t_period);
  CHECK(std::abs(cat_trace(p) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
}

TEST_CASE("accumulated quantum phase equals 2 pi L S + NT pi/4") {
  // For any closed lattice path eta the product of matrix elements has phase
  //   sum f1(eta_{n,t}, eta_{n+1,t}) + f2(eta_{n,t+1}, eta_{n,t})
  // equal (mod 2 pi) to 2 pi L S(q = eta / L, m) + N T pi / 4 for every
  // integer symbol array m, since the -m q term contributes multiples of
  // 2 pi.  This pins the sign and normalization of the discrete action.
  std::mt19937_64 rng(17);
  for (const int L : {2, 3}) {
    const int n = 3, t = 2;
    CatMapParams cl;
    cl.a = 2;
    cl.b = L == 2 ? 2 : 1;
    cl.d = -1;
    cl.n_sites = n;
    cl.t_period = t;
    cl.v = CatPotential::random(0.4, rng);
    std::uniform_int_distribution<int> label(1, L);
    std::uniform_int_distribution<int> sym(-5, 5);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::MatrixXi eta(n, t);
      CatOrbit path;
      path.q.resize(n, t);
      path.m.resize(n, t);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < t; ++j) {
          eta(i, j) = label(rng);
          path.q(i, j) = double(eta(i, j)) / L;
          path.m(i, j) = sym(rng);
        }
      }
      double phase = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < t; ++j) {
          phase += cat_f1(L, cl.v, eta(i, j), eta((i + 1) % n, j));
          phase += cat_f2(L, cl.a, cl.b, eta(i, (j + 1) % t), eta(i, j));
        }
      }
      const double s = orbit_action_catmap(path, cl);
      const double expect = 2 * kPi * L * s + n * t * kPi / 4;
      CHECK(std::abs(std::exp(cplx(0, phase)) - std::exp(cplx(0, expect))) <
            1e-10);
    }
  }
}

TEST_CASE("k_rmt: limits, series, plateau") {
  CHECK(k_rmt(0.0, 1) == 0.0);
  CHECK(k_rmt(0.5, 2) == 0.5);
  CHECK(k_rmt(3.0, 2) == 1.0);
  // Small-tau series 2 tau - 2 tau^2 + 2 tau^3 + O(tau^4).
  const double tau = 0.01;
  CHECK(std::abs(k_rmt(tau, 1) -
                 (2 * tau - 2 * tau * tau + 2 * tau * tau * tau)) < 1e-7);
  // Plateau approaches 1 from below.
  CHECK(k_rmt(50.0, 1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(k_rmt(1.0, 1) ==
        doctest::Approx(2.0 - std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS((void)k_rmt(-0.1, 1), ValidationError);
}

TEST_CASE("form factor: degenerate ensemble and universal regime") {
  CatQuantumParams p;
  p.L = 2;
  p.n_sites = 10;
  p.t_period = 2;
  const FormFactorEstimate est = form_factor(p, 0.0, 5);
  CHECK(est.stderr_value == 0.0);
  CHECK(est.tau == doctest::Approx(5.0));
  CHECK(est.regime == "universal");
  const cplx tr = cat_trace(p);
  CHECK(est.k_value ==
        doctest::Approx(std::norm(tr) / (2.0 * 1024.0)).epsilon(1e-12));
}

TEST_CASE("form factor reaches the plateau L^{T-N} for a mixing ensemble") {
  CatQuantumParams p;
  p.L = 2;
  p.n_sites = 10;
  p.t_period = 2;
  const FormFactorEstimate est = form_factor(p, 0.5, 100);
  const double target = k_cat_prediction(p);
  CHECK(est.k_value > 0.5 * target);
  CHECK(est.k_value < 2.0 * target);
}

TEST_CASE("k_cat_prediction wraps the rescaled RMT curve") {
  CatQuantumParams p;
  p.L = 2;
  p.n_sites = 2;
  p.t_period = 3;
  const double tau = 6.0 / 8.0;
  CHECK(k_cat_prediction(p) ==
        doctest::Approx(2.0 * k_rmt(tau, 1)).epsilon(1e-12));
  p.beta = 2;
  CHECK(k_cat_prediction(p) == doctest::Approx(2.0 * tau).epsilon(1e-12));
}
