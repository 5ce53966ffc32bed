#include "qdual/action_spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace qdual {

std::vector<cplx> floquet_traces(const SpinChainParams& base, int T,
                                 int j_cut) {
  if (j_cut < 1) throw ValidationError("floquet_traces: j_cut >= 1 required");
  std::vector<cplx> traces(j_cut);
  for (int j = 1; j <= j_cut; ++j) {
    SpinChainParams p = base;
    p.two_j = 2 * j;
    traces[j - 1] = floquet_trace(p, T);
  }
  return traces;
}

cplx rho_at(const std::vector<cplx>& traces, double s) {
  cplx acc = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const double j = static_cast<double>(i + 1);
    acc += std::exp(cplx(0, -(j + 0.5) * s)) * traces[i];
  }
  return acc / static_cast<double>(traces.size());
}

ActionSpectrum spectrum_from_traces(const std::vector<cplx>& traces,
                                    int grid_size) {
  if (grid_size < 8) throw ValidationError("grid_size too small");
  ActionSpectrum spec;
  spec.j_cut = static_cast<int>(traces.size());
  spec.traces = traces;
  spec.s_grid.resize(grid_size);
  spec.rho.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    spec.s_grid[i] = 2.0 * kPi * i / grid_size;
    spec.rho[i] = rho_at(traces, spec.s_grid[i]);
  }
  return spec;
}

ActionSpectrum action_spectrum(const SpinChainParams& base, int T, int j_cut,
                               int grid_size) {
  return spectrum_from_traces(floquet_traces(base, T, j_cut), grid_size);
}

PeakSet detect_peaks(const ActionSpectrum& spec) {
  const int n = static_cast<int>(spec.s_grid.size());
  std::vector<double> mag(n);
  for (int i = 0; i < n; ++i) mag[i] = std::abs(spec.rho[i]);
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  PeakSet out;
  out.noise_floor = sorted[n / 2];
  const double threshold = 3.0 * out.noise_floor;
  const double ds = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    const double prev = mag[(i - 1 + n) % n], next = mag[(i + 1) % n];
    if (mag[i] <= threshold || mag[i] < prev || mag[i] <= next) continue;
    // Quadratic refinement through the three points.
    const double denom = prev - 2 * mag[i] + next;
    double delta = 0;
    if (denom < -1e-300) delta = 0.5 * (prev - next) / denom;
    Peak pk;
    pk.s = mod_2pi(spec.s_grid[i] + delta * ds);
    pk.height = mag[i] - 0.25 * (prev - next) * delta;
    // FWHM from the half-maximum crossings on the grid.
    const double half = 0.5 * pk.height;
    int lo = i, hi = i;
    for (int step = 0; step < n; ++step) {
      const int cand = (lo - 1 + n) % n;
      if (mag[cand] >= half) {
        lo = cand;
      } else {
        break;
      }
    }
    for (int step = 0; step < n; ++step) {
      const int cand = (hi + 1) % n;
      if (mag[cand] >= half) {
        hi = cand;
      } else {
        break;
      }
    }
    const auto cross = [&](int inside, int outside) {
      const double a = mag[inside], b = mag[outside];
      return (a - half) / std::max(a - b, 1e-300);
    };
    const double left = cross(lo, (lo - 1 + n) % n);
    const double right = cross(hi, (hi + 1) % n);
    double span = (hi - lo + n) % n + left + right;
    pk.width = span * ds;
    out.peaks.push_back(pk);
  }
  std::sort(out.peaks.begin(), out.peaks.end(),
            [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return out;
}

ActionSpectrum semiclassical_spectrum(
    const std::vector<SemiclassicalOrbit>& orbits, int j_cut, int grid_size) {
  std::vector<cplx> traces(j_cut, cplx(0));
  for (int j = 1; j <= j_cut; ++j) {
    for (const SemiclassicalOrbit& o : orbits) {
      traces[j - 1] += o.weight * std::exp(cplx(0, (j + 0.5) * o.action));
    }
  }
  return spectrum_from_traces(traces, grid_size);
}

ScalingFit peak_scaling_fit(const std::vector<cplx>& traces, double s_target,
                            const std::vector<int>& j_cut_list) {
  if (j_cut_list.size() < 4) {
    throw ValidationError("peak_scaling_fit: need >= 4 j_cut values");
  }
  ScalingFit out;
  std::vector<double> lx, ly;
  for (int jc : j_cut_list) {
    if (jc < 1 || jc > static_cast<int>(traces.size())) {
      throw ValidationError("peak_scaling_fit: j_cut outside trace range");
    }
    const std::vector<cplx> head(traces.begin(), traces.begin() + jc);
    const double mag = std::abs(rho_at(head, s_target));
    out.samples.emplace_back(jc, mag);
    lx.push_back(std::log(static_cast<double>(jc)));
    ly.push_back(std::log(std::max(mag, 1e-300)));
  }
  const LinearFit fit = fit_line(lx, ly);
  out.alpha = fit.slope;
  out.alpha_stderr = fit.slope_stderr;
  return out;
}

std::vector<std::pair<int, double>> phase_domination(
    const std::vector<cplx>& traces, double s_max) {
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (std::abs(traces[i]) < 1e-14) continue;  // phase undefined; skip
    const double j = static_cast<double>(i + 1);
    const double delta = std::arg(traces[i]) - (j + 0.5) * s_max;
    out.emplace_back(static_cast<int>(i + 1), wrap_pi(delta));
  }
  return out;
}

double circular_stddev(const std::vector<double>& angles) {
  if (angles.empty()) throw ValidationError("circular_stddev: empty input");
  cplx mean = 0;
  for (double a : angles) mean += std::exp(cplx(0, a));
  const double r = std::abs(mean) / static_cast<double>(angles.size());
  if (r < 1e-12) return std::sqrt(-2.0 * std::log(1e-12));
  return std::sqrt(-2.0 * std::log(r));
}

LargestEigenvalueSpectrum largest_eigenvalue_spectrum(
    const SpinChainParams& base, int T, int j_cut,
    const std::vector<cplx>& exact_traces, int grid_size) {
  if (static_cast<int>(exact_traces.size()) < j_cut) {
    throw ValidationError("largest_eigenvalue_spectrum: traces too short");
  }
  std::vector<cplx> approx(j_cut);
  for (int j = 1; j <= j_cut; ++j) {
    SpinChainParams p = base;
    p.two_j = 2 * j;
    const std::vector<cplx> lead = leading_dual_eigenvalues(p, T, 1);
    approx[j - 1] = std::pow(lead.at(0), p.n_sites);
  }
  LargestEigenvalueSpectrum out;
  out.approx = spectrum_from_traces(approx, grid_size);
  const std::vector<cplx> head(exact_traces.begin(),
                               exact_traces.begin() + j_cut);
  const ActionSpectrum exact = spectrum_from_traces(head, grid_size);
  for (int i = 0; i < grid_size; ++i) {
    out.max_deviation = std::max(
        out.max_deviation, std::abs(out.approx.rho[i] - exact.rho[i]));
  }
  return out;
}

}  // namespace qdual
