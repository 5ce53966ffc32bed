// Action spectra: finite Fourier transforms of Floquet traces over the spin
// quantum number, peak detection, semiclassical reconstruction from periodic
// orbits, scaling fits, and phase-domination diagnostics.
#pragma once

#include <utility>
#include <vector>

#include "qdual/classical_spin.hpp"
#include "qdual/dual_op.hpp"
#include "qdual/linear_fit.hpp"
#include "qdual/spin_chain.hpp"
#include "qdual/types.hpp"

namespace qdual {

struct ActionSpectrum {
  std::vector<double> s_grid;   // [0, 2pi), uniform
  std::vector<cplx> rho;        // same length as s_grid
  int j_cut = 0;
  std::vector<cplx> traces;     // traces[j-1] = Tr for spin j, j = 1..j_cut
};

// Tr U^T for spin j = 1..j_cut (two_j = 2j), routed through the cheapest
// exact trace path.
std::vector<cplx> floquet_traces(const SpinChainParams& base, int T, int j_cut);

// rho(S) = (1/j_cut) sum_{j=1}^{j_cut} exp(-i (j+1/2) S) tr_j at one S.
cplx rho_at(const std::vector<cplx>& traces, double s);

// Full grid evaluation from precomputed traces.
ActionSpectrum spectrum_from_traces(const std::vector<cplx>& traces,
                                    int grid_size = 4096);

ActionSpectrum action_spectrum(const SpinChainParams& base, int T, int j_cut,
                               int grid_size = 4096);

struct Peak {
  double s = 0;       // refined position
  double height = 0;  // refined |rho|
  double width = 0;   // FWHM estimated from grid crossings
};
struct PeakSet {
  std::vector<Peak> peaks;
  double noise_floor = 0;  // median |rho| over the grid
};
PeakSet detect_peaks(const ActionSpectrum& spec);

// Semiclassical traces sum_gamma |D_gamma| exp(i (j+1/2) S_gamma), then the
// same Fourier window; |rho| comparison only (no phase indices).
struct SemiclassicalOrbit {
  double action = 0;
  double weight = 0;  // |D_gamma|
};
ActionSpectrum semiclassical_spectrum(const std::vector<SemiclassicalOrbit>& orbits,
                                      int j_cut, int grid_size = 4096);

// Least-squares slope alpha of log |rho(S_target)| vs log j_cut.
struct ScalingFit {
  double alpha = 0;
  double alpha_stderr = 0;
  std::vector<std::pair<int, double>> samples;  // (j_cut, |rho|)
};
ScalingFit peak_scaling_fit(const std::vector<cplx>& traces, double s_target,
                            const std::vector<int>& j_cut_list);

// Delta(j) = Im log Tr - (j+1/2) S_max, wrapped to (-pi, pi]; points with
// |Tr| < 1e-14 are skipped.
std::vector<std::pair<int, double>> phase_domination(
    const std::vector<cplx>& traces, double s_max);

// Circular standard deviation of a sequence of angles.
double circular_stddev(const std::vector<double>& angles);

// Spectrum with traces approximated by lambda_max^N per j; max_deviation is
// the pointwise gap to the exact spectrum from the supplied traces.
struct LargestEigenvalueSpectrum {
  ActionSpectrum approx;
  double max_deviation = 0;
};
LargestEigenvalueSpectrum largest_eigenvalue_spectrum(
    const SpinChainParams& base, int T, int j_cut,
    const std::vector<cplx>& exact_traces, int grid_size = 4096);

}  // namespace qdual
