#include "levi/conditional_dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace levi {

CoherentLabel::CoherentLabel(complex beta) : beta_(beta) {
    if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
        throw DomainError("coherent label must be finite");
}

CoherentLabel CoherentLabel::bounded(complex beta, double max_abs) {
    CoherentLabel label(beta);
    if (std::abs(beta) > max_abs)
        throw DomainError("|beta| = " + std::to_string(std::abs(beta)) + " exceeds bound " +
                          std::to_string(max_abs));
    return label;
}

SpinZ spin_from_int(int value) {
    if (value < -1 || value > 1)
        throw DomainError("s_z must be -1, 0 or +1, got " + std::to_string(value));
    return static_cast<SpinZ>(value);
}

double u_of(SpinZ s, const SectorCouplings& c) { return 2.0 * (as_int(s) * c.l + c.dl); }

double u_of(int s, const SectorCouplings& c) { return u_of(spin_from_int(s), c); }

complex CoherentEvolution::phase_factor() const {
    return std::polar(1.0, dynamic_phase) * std::polar(1.0, zero_field_phase);
}

complex rotation(double tau) {
    constexpr double two_pi = 2 * kPi;
    double r = std::remainder(tau, two_pi);
    const double noise = 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(tau), two_pi);
    if (std::abs(r) <= noise) return {1.0, 0.0};
    return {std::cos(r), -std::sin(r)};
}

CoherentEvolution evolve_coherent(const CoherentLabel& beta, SpinZ s, double t,
                                  const SectorCouplings& c) {
    if (!(t >= 0)) throw DomainError("evolve_coherent: t must be >= 0");
    const double tau = c.omega_z * t;
    const double u = u_of(s, c);
    const complex b = beta.value();
    // D(u) exp(-i c^dag c tau) D(-u) acting on |beta>, plus the u^2 energy shift.
    const complex e = rotation(tau);
    const complex shifted = (b - u) * e;

    CoherentEvolution out;
    // Whole periods return the label bit for bit.
    out.beta = e == complex(1.0, 0.0) ? beta : CoherentLabel(shifted + u);
    out.dynamic_phase = u * u * tau + u * (b.imag() - shifted.imag());
    const int s2 = as_int(s) * as_int(s);
    out.zero_field_phase = -c.d * s2 * tau;
    return out;
}

std::vector<TrajectoryPoint> trajectory(const CoherentLabel& beta, SpinZ s,
                                        std::span<const double> times,
                                        const SectorCouplings& c) {
    std::vector<TrajectoryPoint> points;
    points.reserve(times.size());
    double previous = 0;
    for (double t : times) {
        if (!(t >= 0)) throw DomainError("trajectory: times must be nonnegative");
        if (t < previous) throw DomainError("trajectory: times must be sorted");
        previous = t;
        const auto ev = evolve_coherent(beta, s, t, c);
        points.push_back({t, ev.beta, ev.phase()});
    }
    return points;
}

BranchSeparation branch_separation(double t, const SectorCouplings& c, double x_zpf) {
    if (!(t >= 0)) throw DomainError("branch_separation: t must be >= 0");
    BranchSeparation out;
    const double du = std::abs(u_of(SpinZ::plus, c) - u_of(SpinZ::minus, c));
    out.separation = du * std::abs(complex(1.0, 0.0) - rotation(c.omega_z * t));
    out.well_center_separation = du;
    out.max_separation = 2 * du;
    out.separation_m_zpf = out.separation * x_zpf;
    out.separation_m_2zpf = out.separation * 2 * x_zpf;
    out.well_center_m_zpf = du * x_zpf;
    out.well_center_m_2zpf = du * 2 * x_zpf;
    return out;
}

double overlap_visibility(double t, const SectorCouplings& c) {
    const double sep = branch_separation(t, c).separation;
    return std::exp(-0.5 * sep * sep);
}

complex coherent_overlap(complex alpha, complex gamma) {
    const complex diff = gamma - alpha;
    // Im(conj(alpha) gamma), written so that alpha == gamma gives exactly zero.
    const double im = alpha.real() * diff.imag() - alpha.imag() * diff.real();
    return std::exp(complex(-0.5 * std::norm(diff), im));
}

HybridPureState::HybridPureState(std::vector<ConditionalBranch> branches) {
    for (const auto& b : branches) add(b);
}

HybridPureState HybridPureState::product(const CoherentLabel& beta, complex a_plus,
                                         complex a_zero, complex a_minus) {
    HybridPureState st;
    st.add({SpinZ::plus, a_plus, beta});
    st.add({SpinZ::zero, a_zero, beta});
    st.add({SpinZ::minus, a_minus, beta});
    st.prune(0.0);
    return st;
}

void HybridPureState::add(const ConditionalBranch& branch) {
    for (auto& existing : branches_) {
        if (existing.s == branch.s &&
            std::abs(existing.label.value() - branch.label.value()) <= kMergeTolerance) {
            existing.amplitude += branch.amplitude;
            return;
        }
    }
    branches_.push_back(branch);
}

void HybridPureState::prune(double cutoff) {
    std::erase_if(branches_, [cutoff](const ConditionalBranch& b) {
        return std::abs(b.amplitude) <= cutoff;
    });
}

complex HybridPureState::spin_coherence(SpinZ s, SpinZ sp) const {
    complex acc{0.0, 0.0};
    for (const auto& bi : branches_) {
        if (bi.s != s) continue;
        for (const auto& bj : branches_) {
            if (bj.s != sp) continue;
            acc += bi.amplitude * std::conj(bj.amplitude) *
                   coherent_overlap(bj.label.value(), bi.label.value());
        }
    }
    return acc;
}

double HybridPureState::norm() const {
    return std::sqrt(population(SpinZ::plus) + population(SpinZ::zero) +
                     population(SpinZ::minus));
}

void HybridPureState::evolve(double t, const SectorCouplings& c) {
    std::vector<ConditionalBranch> old;
    old.swap(branches_);
    for (const auto& b : old) {
        const auto ev = evolve_coherent(b.label, b.s, t, c);
        add({b.s, b.amplitude * ev.phase_factor(), ev.beta});
    }
}

}  // namespace levi
