// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levi/thermal.hpp"
#include "levi_cli/cli.hpp"

namespace {

using namespace levi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double wrap(double x) { return std::remainder(x, 2 * kPi); }

DerivedCouplings dimensionless(double l, double dl_vertical, double d = 0.0, double theta = 0.0) {
    ExperimentConfig cfg;
    cfg.theta = theta;
    cfg.has_dimensionless = true;
    cfg.dimensionless = {l, dl_vertical, d};
    return derive_couplings(cfg);
}

HybridPureState superposition(complex beta) {
    const double a = 1 / std::sqrt(2.0);
    return HybridPureState::product(CoherentLabel(beta), a, 0.0, a);
}

PulseSequence without_readout(const PulseSequence& seq) {
    std::vector<PulseStep> steps = seq.steps();
    steps.resize(steps.size() - 2);
    return PulseSequence(steps);
}

const DerivedCouplings& design() {
    static const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    return c;
}

Outcome mass() {
    const double m = derive_mass(100e-9, 3000);
    const double rel = std::abs(m / 1.25e-17 - 1);
    return {rel <= 0.01 && std::abs(m - 1.2566e-17) < 5e-22, fmt("m = %.5g kg, %.2f%% from 1.25e-17", m, 100 * rel)};
}

Outcome scattering() {
    const double r = design().gamma_sc / design().omega_z;
    const double rel = std::abs(r / 5e-3 - 1);
    return {rel <= 0.1 && std::abs(r - 4.73e-3) < 1e-5, fmt("gamma_sc/omega_z = %.4g, %.1f%% from 5e-3", r, 100 * rel)};
}

Outcome phonons() {
    const double n = thermal_occupation(1e-3, 1e5);
    const double rel = std::abs(n / 1000 - 1);
    return {rel <= 0.5 && std::abs(n - 1.31e3) < 5, fmt("nbar = %.4g, %.0f%% from 1000", n, 100 * rel)};
}

Outcome design_point() {
    const auto& c = design();
    const double sep_pm = c.well_separation * c.x_zpf * 1e12;
    const double rel = std::abs(sep_pm / 0.15 - 1);
    const bool ok = c.K >= 10 && c.K <= 13 && c.well_separation >= 0.025 && c.well_separation <= 0.03 && rel <= 0.25;
    return {ok, fmt("K = %.4g, 4l = %.4g, separation %.3g pm (%.0f%% from 0.15 pm)", c.K, c.well_separation, sep_pm,
                    100 * rel)};
}

Outcome closed_form_oracle() {
    const std::vector<complex> betas{{0, 0}, {2, 0}, {0, -2}, {-1.4, 1.4}, {1, 1.5}, {-0.3, -0.9}};
    const std::vector<std::pair<double, double>> couplings{
        {0.0, 0.0}, {0.5, 0.05}, {0.5, -0.5}, {0.25, 0.75}, {0.9, 0.1}, {0.0, 1.0}};
    const int dim = fock::kDefaultDim;
    double infid = 0, phase = 0;
    for (auto [l, dl] : couplings) {
        const SectorCouplings c{l, dl, 0.0, 1e5};
        const double t0 = 2 * kPi / c.omega_z;
        for (SpinZ s : {SpinZ::minus, SpinZ::zero, SpinZ::plus}) {
            for (complex b : betas) {
                const fock::FockState init = fock::coherent_fock(b, dim);
                for (int k = 0; k <= 8; ++k) {
                    const double t = k * t0 / 8;
                    const auto ev = evolve_coherent(CoherentLabel(b), s, t, c);
                    const Eigen::VectorXcd closed = fock::coherent_fock(ev.beta.value(), dim).amplitudes * ev.phase_factor();
                    const complex ov = closed.dot(fock::propagate(init, s, t, c).amplitudes);
                    infid = std::max(infid, 1 - std::norm(ov));
                    phase = std::max(phase, std::abs(std::arg(ov)));
                }
            }
        }
    }
    return {infid <= 1e-8 && phase <= 1e-9, fmt("max infidelity %.2e, max phase error %.2e rad, N = %d", infid, phase, dim)};
}

Outcome return_at_period() {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> uni(-2, 2);
    std::uniform_int_distribution<int> spin(-1, 1);
    const SectorCouplings c{0.5, 0.05, 0.0, 1e5};
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const fock::FockState init = fock::coherent_fock(complex(uni(rng), uni(rng)), fock::kDefaultDim);
        const auto out = fock::propagate(init, spin_from_int(spin(rng)), 2 * kPi / c.omega_z, c);
        worst = std::max(worst, 1 - std::norm(init.amplitudes.dot(out.amplitudes)));
    }
    return {worst <= 1e-8, fmt("min fidelity 1 - %.2e over 20 random (beta, s_z)", worst)};
}

Outcome gravitational_phase() {
    const auto& c = design();
    const double hbar = PhysicalConstants::hbar;
    const double formula = 16 * c.lambda * c.delta_lambda * c.t0 / (hbar * hbar * c.omega_z);
    const double rel = relative_phase(free_evolve(superposition({1, -1}), c.t0, c.theta, c));
    const double magnitude = std::abs(std::abs(rel) - std::abs(wrap(formula)));

    // Sign against the oracle on couplings the truncated space can hold.
    const DerivedCouplings p = dimensionless(0.5, 0.05);
    const MwPulse pulse{quarter_pulse_duration(p.rabi_Omega), p.rabi_Omega};
    const PulseSequence seq({pulse, FreeEvolve{p.t0, {}}});
    const double engine = relative_phase(run_sequence(seq, CoherentLabel(complex(0.3, 0.4)), p).state);
    const auto orc = fock::run_oracle(fock::coherent_fock(complex(0.3, 0.4), fock::kDefaultDim), p, seq);
    const double oracle = std::arg(orc.sectors[0].dot(orc.sectors[2]));
    const double sign = std::abs(wrap(engine - oracle));

    double odd = 0;
    for (double theta : {0.2, 0.9, c.theta}) {
        const auto a = with_theta(c, theta), b = with_theta(c, kPi - theta);
        odd = std::max(odd, std::abs(wrap(relative_phase(free_evolve(superposition(0), a.t0, theta, a)) +
                                          relative_phase(free_evolve(superposition(0), b.t0, kPi - theta, b)))));
    }
    return {magnitude <= 1e-9 && sign <= 1e-9 && odd <= 1e-9,
            fmt("|dphi| = %.10f rad (dev %.1e), oracle sign dev %.1e, odd dev %.1e", std::abs(rel), magnitude, sign, odd)};
}

Outcome ramsey_fringe() {
    const auto& c = design();
    double dev = 0;
    for (double theta : linspace(kPi / 2 - kPi / 20, kPi / 2, 101)) {
        const auto ct = with_theta(c, theta);
        const double p0 = run_sequence(PulseSequence::ramsey(ct), CoherentLabel(complex(-2, 3)), ct).populations.zero;
        dev = std::max(dev, std::abs(p0 - std::pow(std::cos(ct.delta_phi_grav / 2), 2)));
    }
    ExperimentConfig k10;
    k10.magnetization *= 10 / c.K;
    const DerivedCouplings c10 = derive_couplings(k10);
    const auto p0_at = [&](double theta) {
        const auto ct = with_theta(c10, theta);
        return run_sequence(PulseSequence::ramsey(ct), CoherentLabel(), ct).populations.zero;
    };
    const double left = p0_at(kPi / 2 - kPi / 20), right = p0_at(kPi / 2);
    return {dev <= 1e-10 && left <= 1e-3 && std::abs(1 - right) <= 1e-10,
            fmt("101-point dev %.1e; K = %.3g: P0 %.2e -> 1 - %.1e", dev, c10.K, left, 1 - right)};
}

Outcome thermal_immunity() {
    const auto& c = design();
    MonteCarloOptions opts;
    opts.keep_samples = false;
    const auto mc = monte_carlo_fringe({1000.0, 10000, 1}, c.theta, c, PulseSequence::ramsey(c), opts);
    const DerivedCouplings p = dimensionless(0.5, 0.05);
    const auto exact = exact_thermal_check(2.0, p, PulseSequence::ramsey(p), 220);
    const double analytic = thermal_ramsey_p0(2.0, p.t0, p);
    const double dev = std::abs(exact.populations.zero - analytic);
    const double infid = 1 - exact.motional_fidelity;
    return {mc.spread <= 1e-12 && dev <= 1e-6 && infid <= 1e-7,
            fmt("MC spread %.1e (nbar 1000, 1e4 samples); exact nbar 2: P0 dev %.1e, fidelity 1 - %.1e", mc.spread,
                dev, infid)};
}

Outcome echo_identities() {
    const auto& c = design();
    const CoherentLabel beta(complex(4, -7));
    const double plain = relative_phase(run_sequence(without_readout(PulseSequence::echo(c, false)), beta, c).state);
    const double flipped = relative_phase(run_sequence(without_readout(PulseSequence::echo(c, true)), beta, c).state);
    const double cancel = std::abs(wrap(plain));
    const double twice = std::abs(wrap(flipped - 2 * c.delta_phi_grav));
    return {cancel <= 1e-9 && twice <= 1e-9, fmt("no flip: |phase| %.1e; flip: dev from 2 dphi %.1e", cancel, twice)};
}

Outcome contrast() {
    DerivedCouplings c = design();
    const double at_t2 = std::abs(contrast_model(c.T2, c, {true, false}) - std::exp(-1.0));
    c.T2 = c.t0;
    double lo = 1, hi = 0;
    for (const auto& row : fringe_scan(linspace(kPi / 2 - kPi / 20, kPi / 2, 4001), c, {{true, false}, false})) {
        lo = std::min(lo, row.p0);
        hi = std::max(hi, row.p0);
    }
    const bool ok = at_t2 <= 1e-12 && std::abs(lo - 0.316) <= 1e-3 && std::abs(hi - 0.684) <= 1e-3;
    return {ok, fmt("C(T2) dev %.1e; fringe spans [%.4f, %.4f]", at_t2, lo, hi)};
}

Outcome zero_field() {
    double dev = 0;
    for (bool echo : {false, true}) {
        ExperimentConfig cfg;
        SpinPopulations ref;
        for (int k = 0; k <= 10; ++k) {
            cfg.zero_field_D = 2 * kPi * 5e9 * k / 10;
            const DerivedCouplings c = derive_couplings(cfg);
            const auto seq = echo ? PulseSequence::echo(c, true) : PulseSequence::ramsey(c);
            const auto p = run_sequence(seq, CoherentLabel(complex(1, 2)), c).populations;
            if (k == 0) ref = p;
            dev = std::max({dev, std::abs(p.plus - ref.plus), std::abs(p.zero - ref.zero), std::abs(p.minus - ref.minus)});
        }
    }
    double oracle_dev = 0, ref = -1;
    for (int k = 0; k <= 4; ++k) {
        const DerivedCouplings p = dimensionless(0.5, 0.05, 2 * kPi * 5e9 * k / 4 / 1e5);
        const double p0 = fock::ramsey_oracle(fock::coherent_fock(0.5, fock::kDefaultDim), p, PulseSequence::echo(p, true)).zero;
        if (ref < 0) ref = p0;
        oracle_dev = std::max(oracle_dev, std::abs(p0 - ref));
    }
    return {dev <= 1e-10 && oracle_dev <= 1e-10, fmt("engine dev %.1e, oracle dev %.1e over D in [0, 2pi x 5 GHz]", dev, oracle_dev)};
}

Outcome negative_control() {
    std::ostringstream out, err;
    const int clean = cli::run_cli({"levi_ramsey", "verify"}, out, err);
    const int flipped = cli::run_cli({"levi_ramsey", "verify", "--debug-flip-lambda-sign"}, out, err);
    return {clean == 0 && flipped == 1, fmt("verify exit %d, with flipped lambda sign exit %d", clean, flipped)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"mass", mass},
        {"scattering", scattering},
        {"phonon-number", phonons},
        {"design-point", design_point},
        {"closed-form-oracle", closed_form_oracle},
        {"return-at-t0", return_at_period},
        {"gravitational-phase", gravitational_phase},
        {"ramsey-fringe", ramsey_fringe},
        {"thermal-immunity", thermal_immunity},
        {"echo-identities", echo_identities},
        {"contrast", contrast},
        {"d-independence", zero_field},
        {"negative-control", negative_control},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %-20s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
