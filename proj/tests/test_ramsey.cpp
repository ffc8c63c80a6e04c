#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "levi/ramsey.hpp"
#include "support/oracles.hpp"

namespace levi {
namespace {

const double kOmega = 1e5;
const double kT0 = 2 * kPi / kOmega;

DerivedCouplings dimensionless(double l, double dl_vertical, double d = 0.0, double theta = 0.0) {
    ExperimentConfig cfg;
    cfg.theta = theta;
    cfg.has_dimensionless = true;
    cfg.dimensionless = {l, dl_vertical, d};
    return derive_couplings(cfg);
}

double wrap(double x) { return std::remainder(x, 2 * kPi); }

TEST(MwUnitary, QuarterPulseMakesEqualSuperposition) {
    const double omega = 2 * kPi * 1e7;
    const Eigen::Vector3cd out = mw_unitary(quarter_pulse_duration(omega), omega) * SpinVector{}.amplitudes;
    const complex h(0.0, -1 / std::sqrt(2.0));
    EXPECT_NEAR(std::abs(out[0] - h), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out[1]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out[2] - h), 0.0, 1e-15);
}

TEST(MwUnitary, ZeroDurationIsIdentity) {
    EXPECT_TRUE(mw_unitary(0.0, 1e6).isApprox(Eigen::Matrix3cd::Identity(), 0.0));
}

TEST(MwUnitary, MatchesDenseExponentialAndIsUnitary) {
    for (double t : {1e-9, 3.3e-8, 1.7e-7}) {
        const Eigen::Matrix3cd u = mw_unitary(t, 2 * kPi * 3e6);
        EXPECT_LT((u - levi::testing::expm_mw(t, 2 * kPi * 3e6)).norm(), 1e-13);
        EXPECT_LT((u * u.adjoint() - Eigen::Matrix3cd::Identity()).norm(), 1e-14);
    }
}

TEST(MwUnitary, TwoQuarterPulsesReturnToZero) {
    const double omega = 1e7;
    const double tp = quarter_pulse_duration(omega);
    const Eigen::Vector3cd out = mw_unitary(tp, omega) * (mw_unitary(tp, omega) * SpinVector{}.amplitudes);
    EXPECT_NEAR(std::norm(out[1]), 1.0, 1e-14);
}

TEST(FreeEvolve, OnePeriodFactorsMotionOut) {
    const DerivedCouplings c = dimensionless(0.5, 0.05);
    const CoherentLabel beta(complex(0.6, -1.1));
    const double a = 1 / std::sqrt(2.0);
    const HybridPureState out = free_evolve(HybridPureState::product(beta, a, 0.0, a), c.t0, 0.0, c);
    for (const auto& b : out.branches()) EXPECT_EQ(b.label, beta);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
    EXPECT_NEAR(wrap(relative_phase(out) + c.delta_phi_grav), 0.0, 1e-9);
}

TEST(FreeEvolve, ZeroDurationIsIdentity) {
    const DerivedCouplings c = dimensionless(0.5, 0.05);
    const HybridPureState in = HybridPureState::product(CoherentLabel(complex(1, 2)), 0.6, 0.0, 0.8);
    const HybridPureState out = free_evolve(in, 0.0, 0.0, c);
    ASSERT_EQ(out.branches().size(), in.branches().size());
    for (std::size_t i = 0; i < in.branches().size(); ++i) {
        EXPECT_EQ(out.branches()[i].label, in.branches()[i].label);
        EXPECT_EQ(out.branches()[i].amplitude, in.branches()[i].amplitude);
    }
}

TEST(FreeEvolve, HalfPeriodCoherenceMagnitude) {
    const DerivedCouplings c = dimensionless(0.5, 0.05);
    const double a = 1 / std::sqrt(2.0);
    const HybridPureState out =
        free_evolve(HybridPureState::product(CoherentLabel(complex(-1, 0.4)), a, 0.0, a), c.t0 / 2, 0.0, c);
    EXPECT_NEAR(2 * std::abs(out.spin_coherence(SpinZ::minus, SpinZ::plus)),
                overlap_visibility(c.t0 / 2, SectorCouplings::from(c)), 1e-14);
}

TEST(RamseyPopulation, Examples) {
    ExperimentConfig cfg;
    const DerivedCouplings c = derive_couplings(cfg);
    const RamseyPoint top = ramsey_population(kPi / 2, c);
    EXPECT_EQ(top.delta_phi, 0.0);
    EXPECT_EQ(top.p0, 1.0);

    // Rescale the magnet so that K = 10.
    cfg.magnetization *= 10 / c.K;
    const DerivedCouplings k10 = derive_couplings(cfg);
    ASSERT_NEAR(k10.K, 10.0, 1e-12);
    const RamseyPoint edge = ramsey_population(kPi / 2 - kPi / 20, k10);
    EXPECT_NEAR(edge.delta_phi, 3.1286893008046173, 1e-12);
    EXPECT_NEAR(edge.p0, 4.162355075519742e-05, 1e-12);
    EXPECT_LT(edge.p0, 1e-3);
}

TEST(RamseyPopulation, ReducedContrastEnvelope) {
    DerivedCouplings c = derive_couplings(ExperimentConfig{});
    c.T2 = c.t0;
    const ContrastOptions dephasing_only{true, false};
    double lo = 1, hi = 0;
    for (double theta : linspace(kPi / 2 - kPi / 20, kPi / 2, 2001)) {
        const RamseyPoint p = ramsey_population(theta, c, dephasing_only);
        EXPECT_NEAR(p.contrast, std::exp(-1.0), 1e-12);
        lo = std::min(lo, p.p0);
        hi = std::max(hi, p.p0);
    }
    EXPECT_NEAR(lo, 0.5 * (1 - std::exp(-1.0)), 1e-3);
    EXPECT_NEAR(hi, 0.5 * (1 + std::exp(-1.0)), 1e-3);
}

TEST(RunSequence, RamseyFringe) {
    const DerivedCouplings base = derive_couplings(ExperimentConfig{});
    for (double theta : linspace(kPi / 2 - kPi / 20, kPi / 2, 11)) {
        const DerivedCouplings c = with_theta(base, theta);
        const auto r = run_sequence(PulseSequence::ramsey(c), CoherentLabel(complex(3, -2)), c);
        const double expected = std::pow(std::cos(c.delta_phi_grav / 2), 2);
        EXPECT_NEAR(r.populations.zero, expected, 1e-10);
        EXPECT_NEAR(r.populations.sum(), 1.0, 1e-12);
    }
}

TEST(RunSequence, EchoCancelsWithoutOrientationFlip) {
    const DerivedCouplings c = dimensionless(0.5, 0.05);
    std::vector<PulseStep> steps(PulseSequence::echo(c, false).steps());
    steps.resize(steps.size() - 2);  // stop before the readout pulse
    const auto r = run_sequence(PulseSequence(steps), CoherentLabel(complex(0.5, 0.5)), c);
    EXPECT_NEAR(relative_phase(r.state), 0.0, 1e-9);
    const auto full = run_sequence(PulseSequence::echo(c, false), CoherentLabel(complex(0.5, 0.5)), c);
    EXPECT_NEAR(full.populations.zero, 1.0, 1e-12);
}

TEST(RunSequence, EchoWithOrientationFlipDoublesPhase) {
    const DerivedCouplings c = dimensionless(0.5, 0.05);
    const CoherentLabel beta(complex(-0.7, 1.2));
    std::vector<PulseStep> steps(PulseSequence::echo(c, true).steps());
    steps.resize(steps.size() - 2);
    const double doubled = relative_phase(run_sequence(PulseSequence(steps), beta, c).state);

    std::vector<PulseStep> single(PulseSequence::ramsey(c).steps());
    single.resize(2);
    const double once = relative_phase(run_sequence(PulseSequence(single), beta, c).state);
    // The echo swap reverses the sign of the accumulated relative phase.
    EXPECT_NEAR(wrap(doubled + 2 * once), 0.0, 1e-9);
    EXPECT_NEAR(wrap(doubled - 2 * c.delta_phi_grav), 0.0, 1e-9);

    const auto full = run_sequence(PulseSequence::echo(c, true), beta, c);
    EXPECT_NEAR(full.populations.zero, std::pow(std::cos(c.delta_phi_grav), 2), 1e-12);
}

TEST(RunSequence, BetaIndependentAtPeriod) {
    const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    const PulseSequence seq = PulseSequence::ramsey(c);
    const double ref = run_sequence(seq, CoherentLabel(), c).populations.zero;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 20);
    for (int i = 0; i < 100; ++i) {
        const auto r = run_sequence(seq, CoherentLabel(complex(n(rng), n(rng))), c);
        EXPECT_NEAR(r.populations.zero, ref, 1e-12);
        EXPECT_NEAR(r.populations.sum(), 1.0, 1e-12);
    }
}

TEST(RunSequence, IndependentOfZeroFieldSplitting) {
    ExperimentConfig cfg;
    for (const bool echo : {false, true}) {
        double ref = -1;
        for (double d_hz : {0.0, 1e6, 2.87e9, 5e9}) {
            cfg.zero_field_D = 2 * kPi * d_hz;
            const DerivedCouplings c = derive_couplings(cfg);
            const PulseSequence seq = echo ? PulseSequence::echo(c, true) : PulseSequence::ramsey(c);
            const double p0 = run_sequence(seq, CoherentLabel(complex(1, 1)), c).populations.zero;
            if (ref < 0) ref = p0;
            EXPECT_NEAR(p0, ref, 1e-10);
        }
    }
}

TEST(PulseSequence, Validation) {
    EXPECT_THROW(PulseSequence({Measure{}, FreeEvolve{1e-6, {}}}), SequenceError);
    EXPECT_THROW(PulseSequence({FreeEvolve{-1.0, {}}}), SequenceError);
    EXPECT_THROW(PulseSequence({MwPulse{1e-8, 0.0}}), SequenceError);
    EXPECT_NO_THROW(PulseSequence({MwPulse{1e-8, 1e6}, EchoFlip{}, OrientationFlip{}, Measure{}}));
}

TEST(ContrastModel, Examples) {
    DerivedCouplings c = derive_couplings(ExperimentConfig{});
    EXPECT_NEAR(contrast_model(c.T2, c, {true, false}), std::exp(-1.0), 1e-12);
    EXPECT_EQ(contrast_model(0.0, c), 1.0);
    const double scatter = contrast_model(c.t0, c, {false, true});
    EXPECT_NEAR(scatter, 0.9999947831259398, 1e-12);
    EXPECT_GT(scatter, 1 - 2e-5);
    EXPECT_THROW(contrast_model(-1.0, c), DomainError);
}

TEST(FringeScan, SingleRowAndSweep) {
    const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    const std::vector<double> one{kPi / 2};
    const auto row = fringe_scan(one, c);
    ASSERT_EQ(row.size(), 1u);
    EXPECT_EQ(row[0].p0, 1.0);

    const auto grid = linspace(kPi / 2 - kPi / 20, kPi / 2, 101);
    const auto rows = fringe_scan(grid, c);
    ASSERT_EQ(rows.size(), 101u);
    EXPECT_NEAR(rows.front().delta_phi, 3.945213296058338, 1e-9);
    EXPECT_GT(rows.front().delta_phi, kPi);
    EXPECT_NEAR(rows.front().p0, 0.15294757074158125, 1e-9);
    double lo = 1;
    for (const auto& r : rows) {
        lo = std::min(lo, r.p0);
        EXPECT_NEAR(r.p0 + r.pplus + r.pminus, 1.0, 1e-12);
    }
    EXPECT_LT(lo, 1e-3);
    EXPECT_EQ(rows.back().p0, 1.0);
}

TEST(FringeScan, SymmetricUnderOrientationReversal) {
    const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    const auto grid = linspace(0.2, 1.5, 27);
    std::vector<double> mirrored;
    for (double t : grid) mirrored.push_back(kPi - t);
    const auto a = fringe_scan(grid, c);
    const auto b = fringe_scan(mirrored, c);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].p0, b[i].p0, 1e-10);
}

TEST(FringeScan, EchoDoublesFrequency) {
    const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    const auto grid = linspace(kPi / 2 - kPi / 20, kPi / 2, 21);
    const auto plain = fringe_scan(grid, c);
    const auto echo = fringe_scan(grid, c, FringeOptions{kIdealContrast, true});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(echo[i].delta_phi, 2 * plain[i].delta_phi, 1e-12);
        EXPECT_NEAR(echo[i].p0, std::pow(std::cos(plain[i].delta_phi), 2), 1e-12);
    }
}

TEST(FringeScan, RejectsEmptyGrid) {
    EXPECT_THROW(fringe_scan({}, derive_couplings(ExperimentConfig{})), DomainError);
}

// Random sequences of up to six steps, engine vs truncated Fock simulation.
TEST(EngineOracle, RandomSequences) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(0, 1);
    for (int trial = 0; trial < 40; ++trial) {
        const double l = uni(rng), dl = 2 * uni(rng) - 1;
        const DerivedCouplings c = dimensionless(l, dl, 0.0, 0.0);
        const complex b(4 * uni(rng) - 2, 4 * uni(rng) - 2);
        const CoherentLabel beta(std::abs(b) > 2 ? b * (2 / std::abs(b)) : b);

        std::vector<PulseStep> steps;
        const int count = 2 + static_cast<int>(uni(rng) * 5);  // 2..6
        steps.emplace_back(MwPulse{quarter_pulse_duration(c.rabi_Omega) * 2 * uni(rng), c.rabi_Omega});
        while (static_cast<int>(steps.size()) < count) {
            const double pick = uni(rng);
            if (pick < 0.35) steps.emplace_back(FreeEvolve{c.t0 * uni(rng), {}});
            else if (pick < 0.65) steps.emplace_back(MwPulse{quarter_pulse_duration(c.rabi_Omega) * 2 * uni(rng), c.rabi_Omega});
            else if (pick < 0.8) steps.emplace_back(EchoFlip{});
            else steps.emplace_back(OrientationFlip{});
        }
        const PulseSequence seq(steps);
        const auto engine = run_sequence(seq, beta, c);
        const int dim = 240;
        const auto oracle = fock::ramsey_oracle(fock::coherent_fock(beta.value(), dim), c, seq,
                                                fock::OracleOptions{dim});
        EXPECT_NEAR(engine.populations.plus, oracle.plus, 1e-8) << "trial " << trial;
        EXPECT_NEAR(engine.populations.zero, oracle.zero, 1e-8) << "trial " << trial;
        EXPECT_NEAR(engine.populations.minus, oracle.minus, 1e-8) << "trial " << trial;
        EXPECT_NEAR(engine.state.norm(), 1.0, 1e-12);
    }
}

TEST(EngineOracle, OracleIndependentOfZeroFieldSplitting) {
    double ref = -1;
    for (double d_hz : {0.0, 2.87e9, 5e9}) {
        const DerivedCouplings c = dimensionless(0.5, 0.05, 2 * kPi * d_hz / kOmega);
        const auto p = fock::ramsey_oracle(fock::coherent_fock(complex(0.3, 0.2), 160), c,
                                           PulseSequence::echo(c, true));
        if (ref < 0) ref = p.zero;
        EXPECT_NEAR(p.zero, ref, 1e-10);
    }
}

}  // namespace
}  // namespace levi
