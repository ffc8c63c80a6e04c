#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "levi/conditional_dynamics.hpp"
#include "levi/fock_oracle.hpp"

namespace levi {

// Index of s in the {|+1>, |0>, |-1>} basis.
inline int spin_index(SpinZ s) noexcept { return 1 - as_int(s); }
inline SpinZ spin_at(int index) noexcept { return static_cast<SpinZ>(1 - index); }

/// Spin-1 state in the {|+1>, |0>, |-1>} basis.
struct SpinVector {
    Eigen::Vector3cd amplitudes = Eigen::Vector3cd(0, 1, 0);

    double norm() const { return amplitudes.norm(); }
};

// Duration of the pulse that maps |0> to (|+1> + |-1>)/sqrt(2) up to phase.
double quarter_pulse_duration(double rabi_Omega);

/// exp(-i H_mw t / hbar) for H_mw = hbar Omega (|+1><0| + |-1><0| + h.c.).
Eigen::Matrix3cd mw_unitary(double duration, double rabi_Omega);

// Ideal |+1> <-> |-1> exchange.
Eigen::Matrix3cd echo_unitary();

struct MwPulse {
    double duration = 0;
    double rabi_Omega = 0;
};

/// Free evolution; theta unset means the couplings' own orientation.
struct FreeEvolve {
    double duration = 0;
    std::optional<double> theta;
};

struct EchoFlip {};
struct OrientationFlip {};
struct Measure {};

using PulseStep = std::variant<MwPulse, FreeEvolve, EchoFlip, OrientationFlip, Measure>;

class PulseSequence {
public:
    PulseSequence() = default;
    // Throws SequenceError for a negative duration, nonpositive Omega, or a
    // Measure step that is not last.
    explicit PulseSequence(std::vector<PulseStep> steps);

    const std::vector<PulseStep>& steps() const noexcept { return steps_; }
    double total_free_time() const;
    bool empty() const noexcept { return steps_.empty(); }

    /// pulse - free(periods * t0) - pulse - measure.
    static PulseSequence ramsey(const DerivedCouplings& c, double periods = 1.0);
    /// pulse - free t0 - echo [- orientation flip] - free t0 - pulse - measure.
    static PulseSequence echo(const DerivedCouplings& c, bool orientation_flip);

private:
    std::vector<PulseStep> steps_;
};

/// Couplings seen by a free-evolution step after any orientation flips.
SectorCouplings step_couplings(const DerivedCouplings& c, const FreeEvolve& step,
                               bool orientation_flipped);

using fock::SpinPopulations;

struct SequenceResult {
    SpinPopulations populations;
    HybridPureState state;
    double total_free_time = 0;
};

/// Closed-form execution, spin initially |0>, motion in |beta>.
SequenceResult run_sequence(const PulseSequence& sequence, const CoherentLabel& beta,
                            const DerivedCouplings& couplings);

// Branchwise conditional evolution of a hybrid state at orientation theta.
HybridPureState free_evolve(const HybridPureState& state, double duration, double theta,
                            const DerivedCouplings& couplings);

// arg(rho_{-1,+1}): phase of |-1> relative to |+1> with motion traced out.
double relative_phase(const HybridPureState& state);

struct ContrastOptions {
    bool dephasing = true;
    bool scattering = true;
};

inline constexpr ContrastOptions kIdealContrast{false, false};

/// exp(-t/T2) exp(-Gamma_max t), either factor optional.
double contrast_model(double free_time, const DerivedCouplings& c,
                      const ContrastOptions& options = {});

struct RamseyPoint {
    double p0 = 1;
    double delta_phi = 0;
    double contrast = 1;
};

/// P0 = (1 + C cos(dphi)) / 2 for the single-period protocol at angle theta.
RamseyPoint ramsey_population(double theta, const DerivedCouplings& c,
                              const ContrastOptions& options = kIdealContrast);

struct FringeRow {
    double theta = 0;
    double delta_phi = 0;
    double contrast = 1;
    double p0 = 1;
    double pplus = 0;
    double pminus = 0;
};

struct FringeOptions {
    ContrastOptions contrast = kIdealContrast;
    // Echo with orientation reversal: phase 2 dphi over a free time 2 t0.
    bool echo = false;
};

// Throws DomainError on an empty grid.
std::vector<FringeRow> fringe_scan(std::span<const double> thetas, const DerivedCouplings& c,
                                   const FringeOptions& options = {});

// n evenly spaced points including both ends; n = 1 gives {lo}.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace levi
