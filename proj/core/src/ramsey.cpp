#include "levi/ramsey.hpp"

#include <cmath>
#include <string>

namespace levi {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void apply_spin_unitary(HybridPureState& state, const Eigen::Matrix3cd& u) {
    HybridPureState out;
    for (const auto& b : state.branches()) {
        const int col = spin_index(b.s);
        for (int row = 0; row < 3; ++row) {
            const complex m = u(row, col);
            if (m == complex(0.0, 0.0)) continue;
            out.add({spin_at(row), m * b.amplitude, b.label});
        }
    }
    out.prune(0.0);
    state = std::move(out);
}
}  // namespace

double quarter_pulse_duration(double rabi_Omega) {
    if (!(rabi_Omega > 0)) throw DomainError("rabi_Omega must be > 0");
    return kPi / (2 * std::sqrt(2.0) * rabi_Omega);
}

Eigen::Matrix3cd mw_unitary(double duration, double rabi_Omega) {
    if (!(duration >= 0)) throw DomainError("mw pulse duration must be >= 0");
    // Bright state (|+1> + |-1>)/sqrt(2) couples to |0> at sqrt(2) Omega;
    // the dark state (|+1> - |-1>)/sqrt(2) is stationary.
    const double angle = std::sqrt(2.0) * rabi_Omega * duration;
    const double c = std::cos(angle);
    const complex off(0.0, -std::sin(angle) / std::sqrt(2.0));
    Eigen::Matrix3cd u;
    u << 0.5 * (1 + c), off, 0.5 * (c - 1),
         off,           c,   off,
         0.5 * (c - 1), off, 0.5 * (1 + c);
    return u;
}

Eigen::Matrix3cd echo_unitary() {
    Eigen::Matrix3cd u = Eigen::Matrix3cd::Zero();
    u(0, 2) = 1;
    u(1, 1) = 1;
    u(2, 0) = 1;
    return u;
}

PulseSequence::PulseSequence(std::vector<PulseStep> steps) : steps_(std::move(steps)) {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const auto where = "step " + std::to_string(i) + ": ";
        std::visit(overloaded{
                       [&](const MwPulse& p) {
                           if (!(p.duration >= 0))
                               throw SequenceError(where + "pulse duration must be >= 0");
                           if (!(p.rabi_Omega > 0))
                               throw SequenceError(where + "rabi_Omega must be > 0");
                       },
                       [&](const FreeEvolve& f) {
                           if (!(f.duration >= 0))
                               throw SequenceError(where + "free duration must be >= 0");
                           if (f.theta && !(*f.theta >= 0 && *f.theta <= kPi))
                               throw SequenceError(where + "theta must lie in [0, pi]");
                       },
                       [&](const Measure&) {
                           if (i + 1 != steps_.size())
                               throw SequenceError(where + "measure must be the last step");
                       },
                       [](const auto&) {},
                   },
                   steps_[i]);
    }
}

double PulseSequence::total_free_time() const {
    double total = 0;
    for (const auto& step : steps_)
        if (const auto* f = std::get_if<FreeEvolve>(&step)) total += f->duration;
    return total;
}

PulseSequence PulseSequence::ramsey(const DerivedCouplings& c, double periods) {
    const double tp = quarter_pulse_duration(c.rabi_Omega);
    return PulseSequence({MwPulse{tp, c.rabi_Omega}, FreeEvolve{periods * c.t0, {}},
                          MwPulse{tp, c.rabi_Omega}, Measure{}});
}

PulseSequence PulseSequence::echo(const DerivedCouplings& c, bool orientation_flip) {
    const double tp = quarter_pulse_duration(c.rabi_Omega);
    std::vector<PulseStep> steps{MwPulse{tp, c.rabi_Omega}, FreeEvolve{c.t0, {}}, EchoFlip{}};
    if (orientation_flip) steps.emplace_back(OrientationFlip{});
    steps.emplace_back(FreeEvolve{c.t0, {}});
    steps.emplace_back(MwPulse{tp, c.rabi_Omega});
    steps.emplace_back(Measure{});
    return PulseSequence(std::move(steps));
}

SectorCouplings step_couplings(const DerivedCouplings& c, const FreeEvolve& step,
                               bool orientation_flipped) {
    double theta = step.theta.value_or(c.theta);
    if (orientation_flipped) theta = kPi - theta;
    return {c.l, c.dl_vertical * orientation_cosine(theta), c.d, c.omega_z};
}

HybridPureState free_evolve(const HybridPureState& state, double duration, double theta,
                            const DerivedCouplings& couplings) {
    HybridPureState out = state;
    out.evolve(duration, step_couplings(couplings, FreeEvolve{duration, theta}, false));
    return out;
}

SequenceResult run_sequence(const PulseSequence& sequence, const CoherentLabel& beta,
                            const DerivedCouplings& couplings) {
    SequenceResult result;
    HybridPureState state = HybridPureState::product(beta, 0.0, 1.0, 0.0);
    bool flipped = false;
    bool done = false;
    for (const auto& step : sequence.steps()) {
        if (done) break;
        std::visit(overloaded{
                       [&](const MwPulse& p) {
                           apply_spin_unitary(state, mw_unitary(p.duration, p.rabi_Omega));
                       },
                       [&](const FreeEvolve& f) {
                           state.evolve(f.duration, step_couplings(couplings, f, flipped));
                           result.total_free_time += f.duration;
                       },
                       [&](const EchoFlip&) { apply_spin_unitary(state, echo_unitary()); },
                       [&](const OrientationFlip&) { flipped = !flipped; },
                       [&](const Measure&) { done = true; },
                   },
                   step);
    }
    result.populations = {state.population(SpinZ::plus), state.population(SpinZ::zero),
                          state.population(SpinZ::minus)};
    result.state = std::move(state);
    return result;
}

double relative_phase(const HybridPureState& state) {
    return std::arg(state.spin_coherence(SpinZ::minus, SpinZ::plus));
}

double contrast_model(double free_time, const DerivedCouplings& c, const ContrastOptions& options) {
    if (!(free_time >= 0)) throw DomainError("contrast_model: free time must be >= 0");
    double contrast = 1.0;
    if (options.dephasing) contrast *= std::exp(-free_time / c.T2);
    if (options.scattering) contrast *= std::exp(-c.gamma_max * free_time);
    return contrast;
}

RamseyPoint ramsey_population(double theta, const DerivedCouplings& c,
                              const ContrastOptions& options) {
    const DerivedCouplings at = with_theta(c, theta);
    RamseyPoint point;
    point.delta_phi = at.delta_phi_grav;
    point.contrast = contrast_model(at.t0, at, options);
    point.p0 = 0.5 * (1 + point.contrast * std::cos(point.delta_phi));
    return point;
}

std::vector<FringeRow> fringe_scan(std::span<const double> thetas, const DerivedCouplings& c,
                                   const FringeOptions& options) {
    if (thetas.empty()) throw DomainError("fringe_scan: empty theta grid");
    std::vector<FringeRow> rows;
    rows.reserve(thetas.size());
    for (double theta : thetas) {
        const DerivedCouplings at = with_theta(c, theta);
        FringeRow row;
        row.theta = theta;
        if (options.echo) {
            row.delta_phi = 2 * at.delta_phi_grav;
            row.contrast = contrast_model(2 * at.t0, at, options.contrast);
        } else {
            row.delta_phi = at.delta_phi_grav;
            row.contrast = contrast_model(at.t0, at, options.contrast);
        }
        row.p0 = 0.5 * (1 + row.contrast * std::cos(row.delta_phi));
        row.pplus = 0.5 * (1 - row.p0);
        row.pminus = row.pplus;
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw DomainError("linspace: need at least one point");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = lo + step * i;
    out.back() = hi;
    return out;
}

}  // namespace levi
