#include "qdual/catmap.hpp"

#include <cmath>

namespace qdual {

namespace {

double mod1(double x) {
  double r = std::fmod(x, 1.0);
  if (r < 0) r += 1.0;
  // fmod can return 1.0 - epsilon rounding up to 1.0 after the add.
  if (r >= 1.0) r -= 1.0;
  return r;
}

double torus_dist(double x, double y) {
  const double d = std::abs(mod1(x - y));
  return std::min(d, 1.0 - d);
}

}  // namespace

double CatPotential::value(double q) const {
  double s = 0;
  for (int k = 1; k <= 3; ++k) {
    s += c[k - 1] / (k * k) * std::cos(2 * kPi * k * q + phi[k - 1]);
  }
  return eps * s;
}

double CatPotential::deriv(double q) const {
  double s = 0;
  for (int k = 1; k <= 3; ++k) {
    s -= c[k - 1] / (k * k) * 2 * kPi * k *
         std::sin(2 * kPi * k * q + phi[k - 1]);
  }
  return eps * s;
}

CatPotential CatPotential::random(double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  CatPotential v;
  v.eps = eps;
  for (int k = 0; k < 3; ++k) {
    v.c[k] = 1.0;
    v.phi[k] = u(rng);
  }
  return v;
}

std::pair<CatState, CatWindings> catmap_step(const CatState& z,
                                             const CatMapParams& par) {
  const int n = static_cast<int>(z.q.size());
  CatState out;
  out.q.resize(n);
  out.p.resize(n);
  CatWindings w;
  w.mq.resize(n);
  w.mp.resize(n);
  for (int i = 0; i < n; ++i) {
    const double nb = z.q((i + 1) % n) + z.q((i - 1 + n) % n);
    const double vp = par.v.deriv(z.q(i));
    const double uq = z.p(i) + par.a * z.q(i) + par.d * nb + vp;
    const double up = par.b * z.p(i) + (par.a * par.b - 1) * z.q(i) +
                      par.d * par.b * nb + par.b * vp;
    w.mq(i) = static_cast<int>(std::floor(uq));
    w.mp(i) = static_cast<int>(std::floor(up));
    out.q(i) = mod1(uq);
    out.p(i) = mod1(up);
  }
  return {out, w};
}

StabilityMatrix build_M(const CatMapParams& par) {
  const int n = par.n_sites;
  Eigen::Matrix2d a_blk, b_blk;
  a_blk << par.a, 1, par.a * par.b - 1, par.b;
  b_blk << par.d, 0, par.d * par.b, 0;
  StabilityMatrix out;
  out.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    out.m.block<2, 2>(2 * i, 2 * i) = a_blk;
    if (n > 1) {
      out.m.block<2, 2>(2 * i, 2 * ((i + 1) % n)) += b_blk;
      out.m.block<2, 2>(2 * i, 2 * ((i - 1 + n) % n)) += b_blk;
    } else {
      out.m.block<2, 2>(0, 0) += 2 * b_blk;  // self-neighbor on the 1-ring
    }
  }
  out.hyperbolic = true;
  for (int k = 0; k < n; ++k) {
    // Fourier mode reduction: 2x2 block A + 2 cos(theta_k) B.
    const double ck = 2 * std::cos(2 * kPi * k / n);
    const Eigen::Matrix2d blk = a_blk + ck * b_blk;
    const double tr = blk.trace();
    const double disc = tr * tr - 4.0;  // det = 1 per mode
    if (disc > 0) {
      const double root = std::sqrt(disc);
      out.eigenvalues.push_back(cplx(0.5 * (tr + root), 0));
      out.eigenvalues.push_back(cplx(0.5 * (tr - root), 0));
      if (std::abs(std::abs(0.5 * (tr + root)) - 1.0) < 1e-12) {
        out.hyperbolic = false;
      }
    } else {
      const double root = std::sqrt(-disc);
      out.eigenvalues.emplace_back(0.5 * tr, 0.5 * root);
      out.eigenvalues.emplace_back(0.5 * tr, -0.5 * root);
      out.hyperbolic = false;
    }
  }
  return out;
}

CatOrbit orbit_from_symbols(const SymbolArray& m, const CatMapParams& par) {
  if (par.d != -1) {
    throw ValidationError("orbit reconstruction requires d = -1");
  }
  if (par.nu() <= 4) {
    throw ValidationError("Green's operator singular for nu <= 4");
  }
  const int n = static_cast<int>(m.rows());
  const int t = static_cast<int>(m.cols());
  // Green's function of (-Delta + nu - 4) on the N x T torus.
  Eigen::MatrixXd green(n, t);
  for (int dn = 0; dn < n; ++dn) {
    for (int dt = 0; dt < t; ++dt) {
      double acc = 0;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < t; ++l) {
          const double denom = par.nu() - 2 * std::cos(2 * kPi * k / n) -
                               2 * std::cos(2 * kPi * l / t);
          acc += std::cos(2 * kPi * (double(k) * dn / n + double(l) * dt / t)) /
                 denom;
        }
      }
      green(dn, dt) = acc / (n * t);
    }
  }
  CatOrbit orbit;
  orbit.m = m;
  orbit.q.setZero(n, t);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      double acc = 0;
      for (int ii = 0; ii < n; ++ii) {
        for (int jj = 0; jj < t; ++jj) {
          acc += green((i - ii + n) % n, (j - jj + t) % t) * m(ii, jj);
        }
      }
      orbit.q(i, j) = acc;
    }
  }
  // Defect of (-Delta + nu - 4) q = m and admissibility.
  orbit.admissible = true;
  orbit.residual = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      const double lap = orbit.q((i + 1) % n, j) + orbit.q((i - 1 + n) % n, j) +
                         orbit.q(i, (j + 1) % t) + orbit.q(i, (j - 1 + t) % t);
      const double lhs = par.nu() * orbit.q(i, j) - lap;
      orbit.residual = std::max(orbit.residual, std::abs(lhs - m(i, j)));
      if (orbit.q(i, j) < 0.0 || orbit.q(i, j) >= 1.0) {
        orbit.admissible = false;
      }
    }
  }
  // Momenta from the map's first line (d = -1, V = 0):
  //   p_{n,t} = q_{n,t+1} - a q_{n,t} + (q_{n+1,t} + q_{n-1,t}) mod 1.
  orbit.p.setZero(n, t);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      const double nb = orbit.q((i + 1) % n, j) + orbit.q((i - 1 + n) % n, j);
      orbit.p(i, j) = mod1(orbit.q(i, (j + 1) % t) - par.a * orbit.q(i, j) -
                           par.d * nb);
    }
  }
  orbit.action = orbit_action_catmap(orbit, par);
  return orbit;
}

double orbit_action_catmap(const CatOrbit& orbit, const CatMapParams& par) {
  const int n = static_cast<int>(orbit.q.rows());
  const int t = static_cast<int>(orbit.q.cols());
  double s = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      const double q = orbit.q(i, j);
      s += 0.5 * par.nu() * q * q - q * orbit.q(i, (j + 1) % t) +
           par.d * q * orbit.q((i + 1) % n, j) - orbit.m(i, j) * q -
           par.v.value(q);
    }
  }
  return mod1(s);
}

SymbolAlphabet restricted_alphabet(int nu) {
  // Window [-3 + delta, nu - 1 - delta]; delta tuned so random arrays are
  // admissible with > 99% frequency at nu = 13.
  const int delta = 4;
  SymbolAlphabet a;
  a.lo = -3 + delta;
  a.hi = nu - 1 - delta;
  if (a.hi < a.lo) throw ValidationError("alphabet empty: nu too small");
  return a;
}

SymbolArray random_symbol_array(int n, int t, int nu, std::mt19937_64& rng) {
  const SymbolAlphabet a = restricted_alphabet(nu);
  std::uniform_int_distribution<int> u(a.lo, a.hi);
  SymbolArray m(n, t);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) m(i, j) = u(rng);
  }
  return m;
}

namespace {

int wrap(int x, int n) { return ((x % n) + n) % n; }

bool annuli_match(const SymbolArray& m, const SymbolRegion& a,
                  const SymbolRegion& b, int width) {
  const int n = static_cast<int>(m.rows());
  const int t = static_cast<int>(m.cols());
  for (int di = -width; di < a.height + width; ++di) {
    for (int dj = -width; dj < a.width + width; ++dj) {
      const bool interior =
          di >= 0 && di < a.height && dj >= 0 && dj < a.width;
      if (interior) continue;
      const int av = m(wrap(a.n0 + di, n), wrap(a.t0 + dj, t));
      const int bv = m(wrap(b.n0 + di, n), wrap(b.t0 + dj, t));
      if (av != bv) return false;
    }
  }
  return true;
}

}  // namespace

PartnerPair partner_from_swap(const SymbolArray& m, const CatMapParams& par,
                              const SymbolRegion& a, const SymbolRegion& b,
                              int annulus_width) {
  if (a.height != b.height || a.width != b.width) {
    throw ValidationError("partner swap: regions not congruent");
  }
  if (annulus_width < 1) throw ValidationError("partner swap: width < 1");
  if (!annuli_match(m, a, b, annulus_width)) {
    throw ValidationError("partner swap: encounter annuli differ");
  }
  const int n = static_cast<int>(m.rows());
  const int t = static_cast<int>(m.cols());
  SymbolArray swapped = m;
  for (int di = 0; di < a.height; ++di) {
    for (int dj = 0; dj < a.width; ++dj) {
      const int ai = wrap(a.n0 + di, n), aj = wrap(a.t0 + dj, t);
      const int bi = wrap(b.n0 + di, n), bj = wrap(b.t0 + dj, t);
      std::swap(swapped(ai, aj), swapped(bi, bj));
    }
  }
  PartnerPair pair;
  pair.gamma = orbit_from_symbols(m, par);
  pair.gamma_bar = orbit_from_symbols(swapped, par);
  double ds = pair.gamma.action - pair.gamma_bar.action;
  ds -= std::round(ds);
  pair.delta_s = ds;
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < t; ++j) {
      double best = 1e9;
      for (int ii = 0; ii < n; ++ii) {
        for (int jj = 0; jj < t; ++jj) {
          const double dq =
              torus_dist(pair.gamma_bar.q(i, j), pair.gamma.q(ii, jj));
          const double dp =
              torus_dist(pair.gamma_bar.p(i, j), pair.gamma.p(ii, jj));
          best = std::min(best, std::hypot(dq, dp));
        }
      }
      worst = std::max(worst, best);
    }
  }
  pair.shadowing = worst;
  return pair;
}

std::vector<PartnerExperimentRow> partner_width_experiment(
    int size, int nu, int n_trials, int w_min, int w_max, unsigned seed) {
  if (w_min < 1 || w_max < w_min) {
    throw ValidationError("partner experiment: bad width range");
  }
  // Two 2 x 2 interiors at (0,0) and (size/2,size/2) with width-w annuli
  // occupy disjoint (2 + 2w) x (2 + 2w) footprints iff size >= 2 (2 + 2w).
  if (size < 2 * (2 + 2 * w_max)) {
    throw ValidationError("partner experiment: torus too small for widths");
  }
  CatMapParams par;
  par.a = nu / 2;
  par.b = nu - par.a;
  par.d = -1;
  par.n_sites = size;
  par.t_period = size;
  const SymbolRegion a{0, 0, 2, 2};
  const SymbolRegion b{size / 2, size / 2, 2, 2};
  std::mt19937_64 rng(seed);
  std::vector<PartnerExperimentRow> rows;
  for (int trial = 0; trial < n_trials; ++trial) {
    const SymbolArray base = random_symbol_array(size, size, nu, rng);
    for (int w = w_min; w <= w_max; ++w) {
      SymbolArray m = base;
      for (int di = -w; di < 2 + w; ++di) {
        for (int dj = -w; dj < 2 + w; ++dj) {
          const bool interior = di >= 0 && di < 2 && dj >= 0 && dj < 2;
          if (interior) continue;
          m(wrap(b.n0 + di, size), wrap(b.t0 + dj, size)) =
              m(wrap(a.n0 + di, size), wrap(a.t0 + dj, size));
        }
      }
      const PartnerPair pair = partner_from_swap(m, par, a, b, w);
      PartnerExperimentRow row;
      row.trial = trial;
      row.width = w;
      row.abs_delta_s = std::abs(pair.delta_s);
      row.shadowing = pair.shadowing;
      row.valid = pair.gamma.residual < 1e-9 && pair.gamma_bar.residual < 1e-9;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace qdual
