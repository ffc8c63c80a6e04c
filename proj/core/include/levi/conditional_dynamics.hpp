#pragma once

#include <complex>
#include <span>
#include <vector>

#include "levi/constants.hpp"

namespace levi {

using complex = std::complex<double>;

inline constexpr double kDefaultMaxBeta = 50.0;

/// Coherent-state label in phase-space units: Re(beta) is position in units of
/// x_zpf = sqrt(hbar / 2 m omega_z).
class CoherentLabel {
public:
    CoherentLabel() = default;
    // Throws DomainError on non-finite input.
    explicit CoherentLabel(complex beta);

    // Additionally enforces |beta| <= max_abs; used at user-input boundaries.
    static CoherentLabel bounded(complex beta, double max_abs = kDefaultMaxBeta);

    complex value() const noexcept { return beta_; }
    double re() const noexcept { return beta_.real(); }
    double im() const noexcept { return beta_.imag(); }

    friend bool operator==(const CoherentLabel&, const CoherentLabel&) = default;

private:
    complex beta_{0.0, 0.0};
};

/// Spin-1 eigenvalue of S_z.
enum class SpinZ : int { minus = -1, zero = 0, plus = 1 };

constexpr int as_int(SpinZ s) noexcept { return static_cast<int>(s); }
// Throws DomainError unless value is -1, 0 or +1.
SpinZ spin_from_int(int value);

/// Couplings in units of hbar*omega_z, plus omega_z for time conversion.
struct SectorCouplings {
    double l = 0;
    double dl = 0;  // at the current orientation
    double d = 0;
    double omega_z = 1;

    static SectorCouplings from(const DerivedCouplings& c) {
        return {c.l, c.dl, c.d, c.omega_z};
    }
};

// u(s) = 2 (s l + dl): centre of the s-conditioned well.
double u_of(SpinZ s, const SectorCouplings& c);
double u_of(int s, const SectorCouplings& c);

/// Phase accumulated by a conditioned coherent state. The zero-field part
/// -d s^2 omega_z t is kept separate: it is identical for s = +1 and s = -1 and
/// would otherwise dominate the rounding error of the relative phase.
struct CoherentEvolution {
    double dynamic_phase = 0;
    double zero_field_phase = 0;
    CoherentLabel beta;

    double phase() const noexcept { return dynamic_phase + zero_field_phase; }
    complex phase_factor() const;
};

// exp(-i tau), with tau reduced modulo 2 pi and snapped to an exact full
// period when the remainder is pure rounding noise.
complex rotation(double tau);

/// |beta>|s> -> exp(i phase) |(beta - u) e^{-i omega t} + u>|s>.
CoherentEvolution evolve_coherent(const CoherentLabel& beta, SpinZ s, double t,
                                  const SectorCouplings& c);

struct TrajectoryPoint {
    double t = 0;
    CoherentLabel beta;
    double phase = 0;
};

// Throws DomainError if times are unsorted or negative.
std::vector<TrajectoryPoint> trajectory(const CoherentLabel& beta, SpinZ s,
                                        std::span<const double> times,
                                        const SectorCouplings& c);

struct BranchSeparation {
    double separation = 0;             // |beta(t,+1) - beta(t,-1)|
    double well_center_separation = 0; // 4 |l|
    double max_separation = 0;         // 8 |l|, reached at omega t = pi
    double separation_m_zpf = 0;       // separation * x_zpf
    double separation_m_2zpf = 0;      // separation * 2 x_zpf
    double well_center_m_zpf = 0;
    double well_center_m_2zpf = 0;
};

BranchSeparation branch_separation(double t, const SectorCouplings& c, double x_zpf = 0.0);

// exp(-|beta(t,+1) - beta(t,-1)|^2 / 2).
double overlap_visibility(double t, const SectorCouplings& c);

// <alpha|gamma> for coherent states.
complex coherent_overlap(complex alpha, complex gamma);

struct ConditionalBranch {
    SpinZ s = SpinZ::zero;
    complex amplitude{0.0, 0.0};
    CoherentLabel label;
};

/// Superposition of spin-conditioned coherent states. Phases live in the
/// amplitudes; labels carry geometry only.
class HybridPureState {
public:
    static constexpr double kMergeTolerance = 1e-12;

    HybridPureState() = default;
    explicit HybridPureState(std::vector<ConditionalBranch> branches);

    static HybridPureState product(const CoherentLabel& beta, complex a_plus, complex a_zero,
                                   complex a_minus);

    const std::vector<ConditionalBranch>& branches() const noexcept { return branches_; }

    // Adds amplitude to an existing branch with the same spin and label, else appends.
    void add(const ConditionalBranch& branch);
    // Drops branches with |amplitude| below cutoff.
    void prune(double cutoff = 1e-300);

    double norm() const;
    /// Reduced spin density matrix element rho_{s,s'} after tracing out motion.
    complex spin_coherence(SpinZ s, SpinZ sp) const;
    double population(SpinZ s) const { return spin_coherence(s, s).real(); }

    // Branchwise closed-form free evolution.
    void evolve(double t, const SectorCouplings& c);

private:
    std::vector<ConditionalBranch> branches_;
};

}  // namespace levi
