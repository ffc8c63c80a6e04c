#include "levi/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>

namespace levi {

void ThermalSpec::validate() const {
    if (!(nbar >= 0) || !std::isfinite(nbar)) throw DomainError("thermal spec: nbar must be >= 0");
    if (n_samples < 1) throw DomainError("thermal spec: n_samples must be >= 1");
}

int worker_threads(int requested) {
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LEVI_RAMSEY_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) return std::min(cap, hw);
    }
    return hw;
}

namespace {

// Runs fn(block) for every block index; blocks are claimed in order by
// a fixed number of workers.
template <class Fn>
void for_each_block(std::int64_t blocks, int threads, Fn&& fn) {
    threads = static_cast<int>(std::min<std::int64_t>(threads, blocks));
    if (threads <= 1) {
        for (std::int64_t b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t b = w; b < blocks; b += threads) fn(b);
        });
    }
}

std::int64_t block_count(std::int64_t n) { return (n + kSampleBlock - 1) / kSampleBlock; }

void fill_block(const ThermalSpec& spec, std::int64_t block, std::vector<CoherentLabel>& out) {
    const std::int64_t begin = block * kSampleBlock;
    const std::int64_t end = std::min(spec.n_samples, begin + kSampleBlock);
    if (spec.nbar == 0) {
        for (std::int64_t i = begin; i < end; ++i) out[i] = CoherentLabel();
        return;
    }
    const auto ub = static_cast<std::uint64_t>(block);
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(ub), static_cast<std::uint32_t>(ub >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, std::sqrt(spec.nbar / 2));
    for (std::int64_t i = begin; i < end; ++i) {
        const double re = normal(engine);
        const double im = normal(engine);
        out[i] = CoherentLabel(complex(re, im));
    }
}

bool whole_periods(double duration, double t0) {
    const double periods = duration / t0;
    return std::abs(periods - std::round(periods)) <= 1e-9 * std::max(1.0, periods);
}

}  // namespace

std::vector<CoherentLabel> sample_p_function(const ThermalSpec& spec, int threads) {
    spec.validate();
    std::vector<CoherentLabel> out(static_cast<std::size_t>(spec.n_samples));
    for_each_block(block_count(spec.n_samples), worker_threads(threads),
                   [&](std::int64_t b) { fill_block(spec, b, out); });
    return out;
}

MonteCarloResult monte_carlo_fringe(const ThermalSpec& spec, double theta,
                                    const DerivedCouplings& couplings,
                                    const PulseSequence& sequence,
                                    const MonteCarloOptions& options) {
    spec.validate();
    if (!options.diagnostic) {
        for (const auto& step : sequence.steps())
            if (const auto* f = std::get_if<FreeEvolve>(&step); f && !whole_periods(f->duration, couplings.t0))
                throw SequenceError("monte_carlo_fringe: free segment of " +
                                    std::to_string(f->duration) +
                                    " s is not a whole number of periods");
    }
    const DerivedCouplings at = with_theta(couplings, theta);
    const int threads = worker_threads(options.threads);
    const auto labels = sample_p_function(spec, threads);

    const std::int64_t n = spec.n_samples;
    const std::int64_t blocks = block_count(n);
    std::vector<double> p0(static_cast<std::size_t>(n));
    std::vector<double> block_sum(static_cast<std::size_t>(blocks), 0.0);
    for_each_block(blocks, threads, [&](std::int64_t b) {
        const std::int64_t end = std::min(n, (b + 1) * kSampleBlock);
        double sum = 0;
        for (std::int64_t i = b * kSampleBlock; i < end; ++i) {
            p0[i] = run_sequence(sequence, labels[i], at).populations.zero;
            sum += p0[i];
        }
        block_sum[b] = sum;
    });

    MonteCarloResult result;
    double total = 0;
    for (double s : block_sum) total += s;
    result.mean_p0 = total / static_cast<double>(n);
    double var = 0;
    for (double v : p0) {
        result.spread = std::max(result.spread, std::abs(v - result.mean_p0));
        var += (v - result.mean_p0) * (v - result.mean_p0);
    }
    result.std_error = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    if (options.keep_samples) {
        result.samples.reserve(p0.size());
        for (std::int64_t i = 0; i < n; ++i) result.samples.push_back({labels[i], p0[i]});
    }
    return result;
}

double thermal_ramsey_p0(double nbar, double t, const DerivedCouplings& couplings) {
    if (!(nbar >= 0)) throw DomainError("thermal_ramsey_p0: nbar must be >= 0");
    if (!(t >= 0)) throw DomainError("thermal_ramsey_p0: t must be >= 0");
    const SectorCouplings sc = SectorCouplings::from(couplings);
    const double up = u_of(SpinZ::plus, sc);
    const double um = u_of(SpinZ::minus, sc);
    const double tau = couplings.omega_z * t;
    const complex e = rotation(tau);
    const double sin_tau = -e.imag();
    const double phi = (up * up - um * um) * (tau - sin_tau);
    const double dc2 = std::norm((up - um) * (complex(1.0, 0.0) - e));
    return 0.5 * (1 + std::cos(phi) * std::exp(-(2 * nbar + 1) * dc2 / 2));
}

ExactThermalResult exact_thermal_check(double nbar, const DerivedCouplings& couplings,
                                       const PulseSequence& sequence, int dim) {
    if (!(nbar >= 0) || nbar > 5)
        throw DomainError("exact_thermal_check: nbar must lie in [0, 5]");
    const fock::FockDensity rho = fock::thermal_fock(nbar, dim);
    fock::OracleOptions options;
    options.dim = dim;
    const auto mixed = fock::ramsey_oracle_mixed(rho, couplings, sequence, options);
    ExactThermalResult out;
    out.populations = mixed.populations;
    out.motional_fidelity = mixed.return_fidelity_bound();
    out.purity_before = rho.purity();
    out.purity_after = mixed.motional_state.purity();
    return out;
}

}  // namespace levi
