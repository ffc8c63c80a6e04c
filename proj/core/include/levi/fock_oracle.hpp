#pragma once

#include <array>
#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>

#include <Eigen/Dense>

#include "levi/conditional_dynamics.hpp"

namespace levi {

class PulseSequence;

namespace fock {

inline constexpr double kTailTolerance = 1e-12;
inline constexpr int kDefaultDim = 160;

/// Smallest truncation accepted for a coherent state of amplitude |beta|.
int required_dim(double abs_beta);

/// Truncated number-basis state vector.
struct FockState {
    Eigen::VectorXcd amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
    double tail_weight() const;
    double mean_number() const;
};

/// Truncated number-basis density matrix.
struct FockDensity {
    Eigen::MatrixXcd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
    double trace() const { return matrix.trace().real(); }
    double mean_number() const;
    double purity() const;
};

// c_n = e^{-|beta|^2/2} beta^n / sqrt(n!) by recurrence. Throws DomainError if
// dim is below required_dim(|beta|), TruncationError if the tail is too heavy.
FockState coherent_fock(complex beta, int dim, double tail_tolerance = kTailTolerance);

// p_n = nbar^n / (1 + nbar)^(n+1). Throws TruncationError if p_{N-1} >= 1e-10.
FockDensity thermal_fock(double nbar, int dim);

/// Real symmetric tridiagonal matrix of one S_z sector, dimensionless units
/// (hbar = omega_z = 1): n + d s^2 on the diagonal, -2 (l s + dl) sqrt(n+1) off it.
struct SectorHamiltonian {
    SpinZ s = SpinZ::zero;
    Eigen::MatrixXd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

SectorHamiltonian sector_hamiltonian(SpinZ s, const SectorCouplings& c, int dim);

/// Eigendecomposition of a sector Hamiltonian with the constant d s^2 removed.
struct SectorSpectrum {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

/// Thread-safe memo of sector spectra keyed on (s, l, dl, N). Inserts are
/// idempotent: concurrent first requests compute the same value and one wins.
class PropagatorCache {
public:
    std::shared_ptr<const SectorSpectrum> spectrum(SpinZ s, const SectorCouplings& c, int dim);
    std::size_t size() const;
    void clear();

    static PropagatorCache& global();

private:
    using Key = std::tuple<int, double, double, int>;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const SectorSpectrum>> entries_;
};

/// exp(-i H_s omega_z t) |state>. Throws TruncationError if the evolved tail
/// weight exceeds tail_tolerance (pass a negative tolerance to skip the check).
FockState propagate(const FockState& state, SpinZ s, double t, const SectorCouplings& c,
                    double tail_tolerance = kTailTolerance,
                    PropagatorCache& cache = PropagatorCache::global());

/// Spin (x) Fock state, one vector per S_z sector in the order {+1, 0, -1}.
struct HybridFockState {
    std::array<Eigen::VectorXcd, 3> sectors;

    int dim() const { return static_cast<int>(sectors[0].size()); }
    double population(SpinZ s) const;
};

// Expands a closed-form superposition into the number basis.
HybridFockState to_fock(const HybridPureState& state, int dim);

struct SpinPopulations {
    double plus = 0;
    double zero = 0;
    double minus = 0;

    double sum() const { return plus + zero + minus; }
};

struct OracleOptions {
    int dim = kDefaultDim;
    double tail_tolerance = kTailTolerance;
    // Components of a mixed input below this weight are not propagated.
    double weight_cutoff = 1e-18;
};

/// Full spin (x) Fock simulation of a pulse sequence from a pure motional state,
/// spin initially |0>. Returns the final hybrid state.
HybridFockState run_oracle(const FockState& motion, const DerivedCouplings& couplings,
                           const PulseSequence& sequence, const OracleOptions& options = {});

SpinPopulations ramsey_oracle(const FockState& motion, const DerivedCouplings& couplings,
                              const PulseSequence& sequence, const OracleOptions& options = {});

/// Mixed motional input: propagates the eigen-ensemble of rho.
SpinPopulations ramsey_oracle(const FockDensity& motion, const DerivedCouplings& couplings,
                              const PulseSequence& sequence, const OracleOptions& options = {});

struct MixedOracleResult {
    SpinPopulations populations;
    FockDensity motional_state;  // spin traced out
    // v_s = sum_k w_k <e_k| phi_{k,s}> over the input eigen-ensemble {w_k, e_k}.
    // sum_s |v_s|^2 is the purification overlap of the final motional state with
    // the input, a lower bound on their Uhlmann fidelity.
    std::array<complex, 3> return_overlap{};

    double return_fidelity_bound() const {
        return std::norm(return_overlap[0]) + std::norm(return_overlap[1]) +
               std::norm(return_overlap[2]);
    }
};

MixedOracleResult ramsey_oracle_mixed(const FockDensity& motion, const DerivedCouplings& couplings,
                                      const PulseSequence& sequence,
                                      const OracleOptions& options = {});

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const FockDensity& rho, const FockDensity& sigma);

}  // namespace fock
}  // namespace levi
