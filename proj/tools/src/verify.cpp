#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "levi/thermal.hpp"
#include "levi_cli/cli.hpp"

namespace levi::cli {
namespace {

double wrap(double x) { return std::remainder(x, 2 * kPi); }

DerivedCouplings flipped(DerivedCouplings c) {
    c.l = -c.l;
    c.lambda = -c.lambda;
    return with_theta(c, c.theta);
}

// Small couplings the Fock oracle can hold at N = 160.
DerivedCouplings probe_couplings(const ExperimentConfig& config, double d) {
    ExperimentConfig p = config;
    p.theta = 0.0;
    p.has_dimensionless = true;
    p.dimensionless = {0.5, 0.05, d};
    return derive_couplings(p);
}

HybridPureState superposition(const CoherentLabel& beta) {
    const double a = 1 / std::sqrt(2.0);
    return HybridPureState::product(beta, a, 0.0, a);
}

PulseSequence strip_readout(const PulseSequence& seq) {
    std::vector<PulseStep> steps = seq.steps();
    steps.resize(steps.size() - 2);
    return PulseSequence(steps);
}

double oracle_relative_phase(const fock::HybridFockState& s) {
    return std::arg(s.sectors[0].dot(s.sectors[2]));
}

class Checks {
public:
    void add(std::string name, double deviation, double tolerance) {
        checks_.push_back({std::move(name), deviation, tolerance, deviation <= tolerance});
    }
    std::vector<VerifyCheck> take() { return std::move(checks_); }

private:
    std::vector<VerifyCheck> checks_;
};

void closed_form_vs_oracle(Checks& out, const DerivedCouplings& truth, const DerivedCouplings& engine) {
    const int dim = fock::kDefaultDim;
    const SectorCouplings ct = SectorCouplings::from(truth), ce = SectorCouplings::from(engine);
    double infid = 0, phase = 0;
    for (complex b : {complex(0, 0), complex(1, -0.5), complex(-1.5, 1), complex(0, 2)}) {
        const fock::FockState start = fock::coherent_fock(b, dim);
        for (SpinZ s : {SpinZ::plus, SpinZ::zero, SpinZ::minus}) {
            for (double frac : {0.1, 0.25, 0.5, 0.77, 1.0}) {
                const double t = frac * truth.t0;
                const auto ev = evolve_coherent(CoherentLabel(b), s, t, ce);
                const Eigen::VectorXcd closed = fock::coherent_fock(ev.beta.value(), dim).amplitudes * ev.phase_factor();
                const fock::FockState exact = fock::propagate(start, s, t, ct);
                const complex ov = exact.amplitudes.dot(closed);
                infid = std::max(infid, 1 - std::norm(ov));
                phase = std::max(phase, std::abs(std::arg(ov)));
            }
        }
    }
    out.add("closed_form_oracle_infidelity", infid, 1e-8);
    out.add("closed_form_oracle_phase", phase, 1e-9);
}

void return_at_period(Checks& out, const DerivedCouplings& truth) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(0, 1);
    const SectorCouplings c = SectorCouplings::from(truth);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const complex b = std::polar(3 * std::sqrt(uni(rng)), 2 * kPi * uni(rng));
        const SpinZ s = spin_at(static_cast<int>(uni(rng) * 3) % 3);
        const fock::FockState start = fock::coherent_fock(b, fock::kDefaultDim);
        const fock::FockState end = fock::propagate(start, s, truth.t0, c);
        worst = std::max(worst, 1 - std::norm(start.amplitudes.dot(end.amplitudes)));
    }
    out.add("return_at_period", worst, 1e-8);
}

void gravitational_phase(Checks& out, const DerivedCouplings& truth, const DerivedCouplings& engine,
                         const DerivedCouplings& probe, const DerivedCouplings& probe_engine) {
    const CoherentLabel beta(complex(0.7, -0.3));
    const double rel = relative_phase(free_evolve(superposition(beta), engine.t0, engine.theta, engine));
    out.add("phase_magnitude", std::abs(std::abs(rel) - std::abs(wrap(truth.delta_phi_grav))), 1e-9);

    // Sign: engine against the oracle, and against -dphi of the true couplings.
    const MwPulse pulse{quarter_pulse_duration(probe.rabi_Omega), probe.rabi_Omega};
    const PulseSequence half({pulse, FreeEvolve{probe.t0, {}}});
    const double engine_phase = relative_phase(run_sequence(half, beta, probe_engine).state);
    const double oracle_phase = oracle_relative_phase(
        fock::run_oracle(fock::coherent_fock(beta.value(), fock::kDefaultDim), probe, half));
    double sign_dev = std::abs(wrap(engine_phase - oracle_phase));
    sign_dev = std::max(sign_dev, std::abs(wrap(rel + truth.delta_phi_grav)));
    out.add("phase_sign", sign_dev, 1e-9);

    double odd = 0;
    for (double theta : {0.3, 1.0, kPi / 2 - kPi / 40, kPi / 2}) {
        const DerivedCouplings a = with_theta(engine, theta), b = with_theta(engine, kPi - theta);
        const double pa = relative_phase(free_evolve(superposition(beta), a.t0, theta, a));
        const double pb = relative_phase(free_evolve(superposition(beta), b.t0, kPi - theta, b));
        odd = std::max(odd, std::abs(wrap(pa + pb)));
    }
    out.add("phase_odd_under_reversal", odd, 1e-9);
}

void ramsey_fringe(Checks& out, const ExperimentConfig& config, const DerivedCouplings& truth,
                   const DerivedCouplings& engine, bool flip) {
    double dev = 0;
    for (double theta : linspace(kPi / 2 - kPi / 20, kPi / 2, 101)) {
        const DerivedCouplings e = with_theta(engine, theta);
        const double p0 = run_sequence(PulseSequence::ramsey(e), CoherentLabel(complex(1, -2)), e).populations.zero;
        dev = std::max(dev, std::abs(p0 - std::pow(std::cos(with_theta(truth, theta).delta_phi_grav / 2), 2)));
    }
    out.add("ramsey_fringe", dev, 1e-10);

    // Same geometry with the magnet rescaled to K = 10.
    ExperimentConfig k10 = config;
    if (k10.has_dimensionless) k10.dimensionless.dl *= 10 / truth.K;
    else k10.magnetization *= 10 / truth.K;
    DerivedCouplings c10 = derive_couplings(k10);
    if (flip) c10 = flipped(c10);
    const auto at = [&](double theta) {
        const DerivedCouplings e = with_theta(c10, theta);
        return run_sequence(PulseSequence::ramsey(e), CoherentLabel(), e).populations.zero;
    };
    out.add("fringe_full_swing_k10", std::max(at(kPi / 2 - kPi / 20), 1 - at(kPi / 2)), 1e-3);
}

void echo_identities(Checks& out, const DerivedCouplings& truth, const DerivedCouplings& engine) {
    const CoherentLabel beta(complex(-0.4, 1.1));
    const double plain = relative_phase(run_sequence(strip_readout(PulseSequence::echo(engine, false)), beta, engine).state);
    out.add("echo_cancels", std::abs(wrap(plain)), 1e-9);
    const double doubled = relative_phase(run_sequence(strip_readout(PulseSequence::echo(engine, true)), beta, engine).state);
    out.add("echo_doubles", std::abs(wrap(doubled - 2 * truth.delta_phi_grav)), 1e-9);
}

void contrast(Checks& out, const DerivedCouplings& engine) {
    DerivedCouplings c = engine;
    out.add("contrast_at_T2", std::abs(contrast_model(c.T2, c, {true, false}) - std::exp(-1.0)), 1e-12);
    c.T2 = c.t0;
    double lo = 1, hi = 0;
    for (double theta : linspace(kPi / 2 - kPi / 20, kPi / 2, 2001)) {
        const double p0 = ramsey_population(theta, c, {true, false}).p0;
        lo = std::min(lo, p0);
        hi = std::max(hi, p0);
    }
    const double e = std::exp(-1.0);
    out.add("contrast_envelope", std::max(std::abs(lo - 0.5 * (1 - e)), std::abs(hi - 0.5 * (1 + e))), 1e-3);
}

void zero_field_independence(Checks& out, const ExperimentConfig& config, bool flip) {
    ExperimentConfig cfg = config;
    double dev = 0;
    for (bool echo : {false, true}) {
        SpinPopulations ref;
        bool first = true;
        for (double hz : {0.0, 1e6, 2.87e9, 5e9}) {
            if (cfg.has_dimensionless) cfg.dimensionless.d = 2 * kPi * hz / cfg.omega_z;
            else cfg.zero_field_D = 2 * kPi * hz;
            DerivedCouplings c = derive_couplings(cfg);
            if (flip) c = flipped(c);
            const PulseSequence seq = echo ? PulseSequence::echo(c, true) : PulseSequence::ramsey(c);
            const SpinPopulations p = run_sequence(seq, CoherentLabel(complex(1, 1)), c).populations;
            if (first) ref = p, first = false;
            dev = std::max({dev, std::abs(p.plus - ref.plus), std::abs(p.zero - ref.zero),
                            std::abs(p.minus - ref.minus)});
        }
    }
    out.add("zero_field_independence", dev, 1e-10);
}

void engine_vs_oracle_sequences(Checks& out, const DerivedCouplings& probe,
                                const DerivedCouplings& probe_engine, bool full) {
    const MwPulse pulse{quarter_pulse_duration(probe.rabi_Omega), probe.rabi_Omega};
    std::vector<PulseSequence> seqs{
        PulseSequence::ramsey(probe), PulseSequence::echo(probe, false), PulseSequence::echo(probe, true),
        PulseSequence({pulse, FreeEvolve{0.37 * probe.t0, {}}, EchoFlip{}, FreeEvolve{0.2 * probe.t0, {}}, pulse}),
        PulseSequence({MwPulse{0.3 * pulse.duration, pulse.rabi_Omega}, FreeEvolve{0.61 * probe.t0, 0.4},
                       OrientationFlip{}, FreeEvolve{0.5 * probe.t0, {}}, pulse, Measure{}})};
    if (full) {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> uni(0, 1);
        for (int i = 0; i < 20; ++i) {
            std::vector<PulseStep> steps{MwPulse{2 * uni(rng) * pulse.duration, pulse.rabi_Omega}};
            const int n = 2 + static_cast<int>(uni(rng) * 5);
            while (static_cast<int>(steps.size()) < n) {
                const double pick = uni(rng);
                if (pick < 0.4) steps.emplace_back(FreeEvolve{uni(rng) * probe.t0, {}});
                else if (pick < 0.7) steps.emplace_back(MwPulse{2 * uni(rng) * pulse.duration, pulse.rabi_Omega});
                else if (pick < 0.85) steps.emplace_back(EchoFlip{});
                else steps.emplace_back(OrientationFlip{});
            }
            seqs.emplace_back(steps);
        }
    }
    double dev = 0;
    for (complex b : {complex(0, 0), complex(1, 1), complex(-1.5, 0.5)}) {
        for (const auto& seq : seqs) {
            const SpinPopulations e = run_sequence(seq, CoherentLabel(b), probe_engine).populations;
            const SpinPopulations o = fock::ramsey_oracle(fock::coherent_fock(b, fock::kDefaultDim), probe, seq);
            dev = std::max({dev, std::abs(e.plus - o.plus), std::abs(e.zero - o.zero), std::abs(e.minus - o.minus)});
        }
    }
    out.add("engine_oracle_sequences", dev, 1e-8);
}

void thermal(Checks& out, const DerivedCouplings& truth, const DerivedCouplings& engine,
             const DerivedCouplings& probe, bool full) {
    const std::int64_t n = full ? 10000 : 1000;
    MonteCarloOptions opts;
    opts.keep_samples = false;
    const auto mc = monte_carlo_fringe({truth.nbar, n, 2}, engine.theta, engine, PulseSequence::ramsey(engine), opts);
    out.add("thermal_spread", mc.spread, 1e-12);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0, 25);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100; ++i) {
        const double p0 = run_sequence(PulseSequence::ramsey(engine), CoherentLabel(complex(g(rng), g(rng))), engine).populations.zero;
        lo = std::min(lo, p0);
        hi = std::max(hi, p0);
    }
    out.add("beta_independence", hi - lo, 1e-12);

    if (!full) return;
    const auto exact = exact_thermal_check(2.0, probe, PulseSequence::ramsey(probe), 220);
    out.add("thermal_exact_population", std::abs(exact.populations.zero - thermal_ramsey_p0(2.0, probe.t0, probe)), 1e-6);
    out.add("thermal_motional_return", 1 - exact.motional_fidelity, 1e-7);
    out.add("thermal_purity_preserved", std::abs(exact.purity_after - exact.purity_before), 1e-9);
}

}  // namespace

std::vector<VerifyCheck> run_verify(const ExperimentConfig& config, const VerifyOptions& options) {
    const DerivedCouplings truth = derive_couplings(config);
    const DerivedCouplings engine = options.flip_lambda_sign ? flipped(truth) : truth;
    const DerivedCouplings probe = probe_couplings(config, truth.d);
    const DerivedCouplings probe_engine = options.flip_lambda_sign ? flipped(probe) : probe;

    Checks out;
    closed_form_vs_oracle(out, probe, probe_engine);
    return_at_period(out, probe);
    gravitational_phase(out, truth, engine, probe, probe_engine);
    ramsey_fringe(out, config, truth, engine, options.flip_lambda_sign);
    echo_identities(out, truth, engine);
    contrast(out, engine);
    zero_field_independence(out, config, options.flip_lambda_sign);
    engine_vs_oracle_sequences(out, probe, probe_engine, options.full);
    thermal(out, truth, engine, probe, options.full);
    return out.take();
}

std::string verify_report_json(const std::vector<VerifyCheck>& checks, std::string_view suite) {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"deviation", std::isfinite(c.deviation) ? nlohmann::ordered_json(c.deviation)
                                                                        : nlohmann::ordered_json(nullptr)},
                               {"tolerance", c.tolerance},
                               {"passed", c.passed}});
    }
    return j.dump(2) + "\n";
}

}  // namespace levi::cli
