#pragma once

#include <cstdint>
#include <vector>

#include "levi/conditional_dynamics.hpp"
#include "levi/ramsey.hpp"

namespace levi {

struct ThermalSpec {
    double nbar = 0;
    std::int64_t n_samples = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr std::int64_t kSampleBlock = 1024;

/// Draws n_samples labels from the thermal P-function (1/pi nbar) exp(-|b|^2/nbar).
/// Samples are generated in fixed blocks with one engine per block, so the
/// stream does not depend on the number of worker threads.
std::vector<CoherentLabel> sample_p_function(const ThermalSpec& spec, int threads = 0);

struct MonteCarloSample {
    CoherentLabel beta;
    double p0 = 0;
};

struct MonteCarloResult {
    double mean_p0 = 0;
    double spread = 0;     // max |p0_i - mean|
    double std_error = 0;  // sample standard deviation / sqrt(n)
    std::vector<MonteCarloSample> samples;
};

struct MonteCarloOptions {
    // Allows free segments that are not whole periods (mid-protocol readout).
    bool diagnostic = false;
    int threads = 0;  // 0: LEVI_RAMSEY_THREADS or hardware concurrency
    bool keep_samples = true;
};

/// Runs the sequence for every sampled beta at orientation theta.
/// Throws SequenceError if a free segment is not a multiple of t0 and
/// options.diagnostic is false.
MonteCarloResult monte_carlo_fringe(const ThermalSpec& spec, double theta,
                                    const DerivedCouplings& couplings,
                                    const PulseSequence& sequence,
                                    const MonteCarloOptions& options = {});

/// Thermal average of P0 for pulse - free t - pulse, closed form:
/// (1 + cos(Phi) exp(-(2 nbar + 1) |dbeta|^2 / 2)) / 2.
double thermal_ramsey_p0(double nbar, double t, const DerivedCouplings& couplings);

struct ExactThermalResult {
    SpinPopulations populations;
    double motional_fidelity = 0;  // final reduced motion vs initial thermal state
    double purity_before = 0;
    double purity_after = 0;
};

/// Fock-oracle run from thermal_fock(nbar). Throws DomainError for nbar > 5.
ExactThermalResult exact_thermal_check(double nbar, const DerivedCouplings& couplings,
                                       const PulseSequence& sequence, int dim);

// Thread count from LEVI_RAMSEY_THREADS, capped by hardware concurrency.
int worker_threads(int requested = 0);

}  // namespace levi
