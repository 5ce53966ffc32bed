// Unit tests for the classical coupled cat-map chain: exact stepping,
// stability matrix, Green's-function orbit reconstruction, action
// stationarity, and partner-orbit swaps.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdual/catmap.hpp"

using namespace qdual;

namespace {

CatMapParams chain_params(int n, int nu = 13) {
  CatMapParams p;
  p.a = nu / 2;
  p.b = nu - p.a;
  p.d = -1;
  p.n_sites = n;
  return p;
}

}  // namespace

TEST_CASE("catmap_step: origin is a fixed point for V=0") {
  CatMapParams p = chain_params(3);
  CatState z;
  z.q = Eigen::VectorXd::Zero(3);
  z.p = Eigen::VectorXd::Zero(3);
  const auto [z1, w] = catmap_step(z, p);
  CHECK(z1.q.norm() == 0.0);
  CHECK(z1.p.norm() == 0.0);
}

TEST_CASE("single cat map a=2, b=1, d=0 has matrix [[2,1],[1,1]]") {
  CatMapParams p;
  p.a = 2;
  p.b = 1;
  p.d = 0;
  p.n_sites = 1;
  const StabilityMatrix m = build_M(p);
  Eigen::Matrix2d expect;
  expect << 2, 1, 1, 1;
  CHECK((m.m - expect).cwiseAbs().maxCoeff() == 0.0);
  // Eigenvalues (3 +- sqrt 5)/2.
  const double golden = 0.5 * (3 + std::sqrt(5.0));
  double hi = 0;
  for (const cplx& lam : m.eigenvalues) hi = std::max(hi, std::abs(lam));
  CHECK(hi == doctest::Approx(golden).epsilon(1e-12));
  CHECK(m.hyperbolic);
}

TEST_CASE("catmap_step agrees with the matrix form for V=0") {
  CatMapParams p = chain_params(4);
  const StabilityMatrix ms = build_M(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    CatState z;
    z.q.resize(4);
    z.p.resize(4);
    Eigen::VectorXd vec(8);
    for (int i = 0; i < 4; ++i) {
      z.q(i) = u(rng);
      z.p(i) = u(rng);
      vec(2 * i) = z.q(i);
      vec(2 * i + 1) = z.p(i);
    }
    const auto [z1, w] = catmap_step(z, p);
    Eigen::VectorXd out = ms.m * vec;
    for (int i = 0; i < 8; ++i) out(i) -= std::floor(out(i));
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(out(2 * i) - z1.q(i)) < 1e-12);
      CHECK(std::abs(out(2 * i + 1) - z1.p(i)) < 1e-12);
    }
  }
}

TEST_CASE("rational lattice preserved exactly (denominator 64)") {
  CatMapParams p = chain_params(3);
  const int big_q = 64;
  CatState z;
  z.q.resize(3);
  z.p.resize(3);
  z.q << 13.0 / big_q, 7.0 / big_q, 50.0 / big_q;
  z.p << 1.0 / big_q, 63.0 / big_q, 32.0 / big_q;
  for (int t = 0; t < 50; ++t) {
    const auto [z1, w] = catmap_step(z, p);
    z = z1;
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(z.q(i) * big_q - std::round(z.q(i) * big_q)) < 1e-9);
      CHECK(std::abs(z.p(i) * big_q - std::round(z.p(i) * big_q)) < 1e-9);
    }
  }
}

TEST_CASE("build_M: symplectic, circulant, hyperbolicity condition") {
  CatMapParams p = chain_params(5);
  REQUIRE(p.hyperbolicity_condition());
  const StabilityMatrix ms = build_M(p);
  CHECK(ms.hyperbolic);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(10, 10);
  for (int i = 0; i < 5; ++i) {
    omega(2 * i, 2 * i + 1) = 1;
    omega(2 * i + 1, 2 * i) = -1;
  }
  CHECK((ms.m.transpose() * omega * ms.m - omega).cwiseAbs().maxCoeff() ==
        0.0);
  // d=0: eigenvalues are N copies of the single-map pair.
  CatMapParams p0 = p;
  p0.d = 0;
  const StabilityMatrix m0 = build_M(p0);
  const double tr = p.a + p.b;
  const double lam = 0.5 * (tr + std::sqrt(tr * tr - 4));
  int count_hi = 0;
  for (const cplx& ev : m0.eigenvalues) {
    if (std::abs(std::abs(ev) - lam) < 1e-9) ++count_hi;
  }
  CHECK(count_hi == 5);
}

TEST_CASE("orbit_from_symbols: zero array gives the fixed orbit") {
  CatMapParams p = chain_params(4);
  p.t_period = 4;
  const SymbolArray m = SymbolArray::Zero(4, 4);
  const CatOrbit orbit = orbit_from_symbols(m, p);
  CHECK(orbit.q.cwiseAbs().maxCoeff() == 0.0);
  CHECK(orbit.residual < 1e-12);
  CHECK(orbit.admissible);
  CHECK(orbit.action == 0.0);
}

TEST_CASE("orbit_from_symbols matches a dense linear solve") {
  CatMapParams p = chain_params(4);
  const int n = 4, t = 3;
  std::mt19937_64 rng(5);
  const SymbolArray m = random_symbol_array(n, t, p.nu(), rng);
  const CatOrbit orbit = orbit_from_symbols(m, p);
  CHECK(orbit.residual < 1e-9);
  // Dense operator (-Delta + nu - 4) on the n x t torus.
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * t, n * t);
  Eigen::VectorXd rhs(n * t);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      const int row = i * t + j;
      op(row, row) = p.nu();
      op(row, ((i + 1) % n) * t + j) -= 1;
      op(row, ((i - 1 + n) % n) * t + j) -= 1;
      op(row, i * t + (j + 1) % t) -= 1;
      op(row, i * t + (j - 1 + t) % t) -= 1;
      rhs(row) = m(i, j);
    }
  }
  const Eigen::VectorXd sol = op.fullPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      CHECK(std::abs(orbit.q(i, j) - sol(i * t + j)) < 1e-10);
    }
  }
}

TEST_CASE("iterating the map reproduces the reconstructed orbit") {
  CatMapParams p = chain_params(10);
  p.t_period = 10;
  std::mt19937_64 rng(6);
  const SymbolArray m = random_symbol_array(10, 10, p.nu(), rng);
  const CatOrbit orbit = orbit_from_symbols(m, p);
  REQUIRE(orbit.admissible);
  // One step from each reconstructed column must land on the next column
  // (iterating many steps would amplify the 1e-13 solve error by the
  // Lyapunov factor, so the check is per-step).
  for (int t = 0; t < 10; ++t) {
    CatState z;
    z.q = orbit.q.col(t);
    z.p = orbit.p.col(t);
    const auto [z1, w] = catmap_step(z, p);
    const int col = (t + 1) % 10;
    for (int i = 0; i < 10; ++i) {
      CHECK(std::abs(z1.q(i) - orbit.q(i, col)) < 1e-9);
      CHECK(std::abs(z1.p(i) - orbit.p(i, col)) < 1e-9);
    }
  }
}

TEST_CASE("action is stationary on reconstructed orbits") {
  CatMapParams p = chain_params(6);
  p.t_period = 5;
  std::mt19937_64 rng(7);
  const SymbolArray m = random_symbol_array(6, 5, p.nu(), rng);
  CatOrbit orbit = orbit_from_symbols(m, p);
  const double h = 1e-6;
  for (const auto& [i, j] : std::vector<std::pair<int, int>>{
           {0, 0}, {2, 3}, {5, 4}}) {
    CatOrbit plus = orbit, minus = orbit;
    plus.q(i, j) += h;
    minus.q(i, j) -= h;
    const double grad = (orbit_action_catmap(plus, p) -
                         orbit_action_catmap(minus, p)) /
                        (2 * h);
    CHECK(std::abs(grad) < 1e-6);
  }
}

TEST_CASE("space-time transpose of a square symbol array is a valid orbit") {
  CatMapParams p = chain_params(8);
  p.t_period = 8;
  std::mt19937_64 rng(8);
  const SymbolArray m = random_symbol_array(8, 8, p.nu(), rng);
  const CatOrbit orbit = orbit_from_symbols(m, p);
  const SymbolArray mt = m.transpose();
  const CatOrbit dual = orbit_from_symbols(mt, p);
  CHECK(dual.residual < 1e-9);
  CHECK((dual.q - orbit.q.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(dual.action - orbit.action) < 1e-10);
}

TEST_CASE("restricted alphabet keeps random arrays admissible at nu=13") {
  CatMapParams p = chain_params(10);
  std::mt19937_64 rng(9);
  int admissible = 0;
  const int trials = 50;
  for (int rep = 0; rep < trials; ++rep) {
    const SymbolArray m = random_symbol_array(10, 10, 13, rng);
    if (orbit_from_symbols(m, p).admissible) ++admissible;
  }
  CHECK(admissible >= trials - 1);  // > 99% target, small-sample slack
}

TEST_CASE("partner swap") {
  CatMapParams p = chain_params(12);
  p.t_period = 12;
  std::mt19937_64 rng(10);
  SymbolArray m = random_symbol_array(12, 12, p.nu(), rng);
  SUBCASE("identical interiors give Delta S = 0") {
    // Make region B's interior and annulus copy region A's.
    const SymbolRegion a{1, 1, 3, 3}, b{7, 7, 3, 3};
    for (int di = -2; di < 5; ++di) {
      for (int dj = -2; dj < 5; ++dj) {
        m((b.n0 + di + 12) % 12, (b.t0 + dj + 12) % 12) =
            m((a.n0 + di + 12) % 12, (a.t0 + dj + 12) % 12);
      }
    }
    const PartnerPair pair = partner_from_swap(m, p, a, b, 2);
    CHECK(pair.delta_s == 0.0);
    CHECK((pair.gamma.q - pair.gamma_bar.q).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("mismatched annuli rejected") {
    const SymbolRegion a{0, 0, 3, 3}, b{6, 6, 3, 3};
    bool match = true;
    // Random annuli almost surely differ.
    CHECK_THROWS_AS((void)partner_from_swap(m, p, a, b, 2), ValidationError);
    (void)match;
  }
  SUBCASE("shadowing partners from a shared annulus") {
    // Impose a common annulus around two distinct interiors.
    const SymbolRegion a{1, 1, 3, 3}, b{7, 7, 3, 3};
    for (int di = -2; di < 5; ++di) {
      for (int dj = -2; dj < 5; ++dj) {
        const bool interior = di >= 0 && di < 3 && dj >= 0 && dj < 3;
        if (interior) continue;
        m((b.n0 + di + 12) % 12, (b.t0 + dj + 12) % 12) =
            m((a.n0 + di + 12) % 12, (a.t0 + dj + 12) % 12);
      }
    }
    const PartnerPair pair = partner_from_swap(m, p, a, b, 2);
    CHECK(pair.gamma.residual < 1e-9);
    CHECK(pair.gamma_bar.residual < 1e-9);
    CHECK(pair.shadowing < 1.0 / p.nu());
  }
}
