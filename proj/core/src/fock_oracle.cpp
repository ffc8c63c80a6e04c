#include "levi/fock_oracle.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <variant>

#include "levi/ramsey.hpp"

namespace levi::fock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int sector_slot(SpinZ s) { return 1 - as_int(s); }

}  // namespace

int required_dim(double abs_beta) {
    return static_cast<int>(std::ceil(abs_beta * abs_beta + 8 * abs_beta + 20));
}

double FockState::tail_weight() const {
    return amplitudes.size() == 0 ? 0.0 : std::norm(amplitudes[amplitudes.size() - 1]);
}

double FockState::mean_number() const {
    double acc = 0;
    for (Eigen::Index n = 0; n < amplitudes.size(); ++n)
        acc += static_cast<double>(n) * std::norm(amplitudes[n]);
    return acc;
}

double FockDensity::mean_number() const {
    double acc = 0;
    for (Eigen::Index n = 0; n < matrix.rows(); ++n)
        acc += static_cast<double>(n) * matrix(n, n).real();
    return acc;
}

double FockDensity::purity() const { return (matrix * matrix).trace().real(); }

FockState coherent_fock(complex beta, int dim, double tail_tolerance) {
    const double r = std::abs(beta);
    if (dim < required_dim(r))
        throw DomainError("coherent_fock: dim " + std::to_string(dim) + " below required " +
                          std::to_string(required_dim(r)) + " for |beta| = " + std::to_string(r));
    FockState st;
    st.amplitudes = Eigen::VectorXcd::Zero(dim);
    if (r == 0) {
        st.amplitudes[0] = 1.0;
        return st;
    }
    // |c_n| in log space avoids under/overflow of exp(-r^2/2) and r^n.
    const double log_r = std::log(r);
    const double phase = std::arg(beta);
    double kept = 0;
    for (int n = 0; n < dim; ++n) {
        const double log_mag = -0.5 * r * r + n * log_r - 0.5 * std::lgamma(n + 1.0);
        st.amplitudes[n] = std::polar(std::exp(log_mag), n * phase);
        kept += std::norm(st.amplitudes[n]);
    }
    const double missing = 1.0 - kept;
    if (missing > tail_tolerance || st.tail_weight() > tail_tolerance)
        throw TruncationError("coherent_fock: truncation loses " + std::to_string(missing) +
                              " of the norm at dim " + std::to_string(dim));
    st.amplitudes /= std::sqrt(kept);
    return st;
}

FockDensity thermal_fock(double nbar, int dim) {
    if (!(nbar >= 0)) throw DomainError("thermal_fock: nbar must be >= 0");
    if (dim < 1) throw DomainError("thermal_fock: dim must be >= 1");
    const double ratio = nbar / (1 + nbar);
    const double last = std::pow(ratio, dim - 1) / (1 + nbar);
    if (last >= 1e-10)
        throw TruncationError("thermal_fock: p_{N-1} = " + std::to_string(last) +
                              " at dim " + std::to_string(dim));
    FockDensity rho;
    rho.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    double p = 1.0 / (1 + nbar);
    double total = 0;
    for (int n = 0; n < dim; ++n) {
        rho.matrix(n, n) = p;
        total += p;
        p *= ratio;
    }
    rho.matrix /= total;
    return rho;
}

SectorHamiltonian sector_hamiltonian(SpinZ s, const SectorCouplings& c, int dim) {
    if (dim < 1) throw DomainError("sector_hamiltonian: dim must be >= 1");
    const int sz = as_int(s);
    const double coupling = -2.0 * (c.l * sz + c.dl);
    SectorHamiltonian h;
    h.s = s;
    h.matrix = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        h.matrix(n, n) = n + c.d * sz * sz;
        if (n + 1 < dim) {
            const double off = coupling * std::sqrt(n + 1.0);
            h.matrix(n, n + 1) = off;
            h.matrix(n + 1, n) = off;
        }
    }
    return h;
}

std::shared_ptr<const SectorSpectrum> PropagatorCache::spectrum(SpinZ s, const SectorCouplings& c,
                                                                int dim) {
    const Key key{as_int(s), c.l, c.dl, dim};
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    // The constant d s^2 is applied as a separate phase, not diagonalized.
    const SectorCouplings bare{c.l, c.dl, 0.0, c.omega_z};
    const SectorHamiltonian h = sector_hamiltonian(s, bare, dim);
    Eigen::VectorXd diag = h.matrix.diagonal();
    Eigen::VectorXd sub(dim > 1 ? dim - 1 : 0);
    for (int n = 0; n + 1 < dim; ++n) sub[n] = h.matrix(n + 1, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    auto spec = std::make_shared<SectorSpectrum>();
    spec->energies = solver.eigenvalues();
    spec->vectors = solver.eigenvectors();

    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(key, std::move(spec));
    return it->second;
}

std::size_t PropagatorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void PropagatorCache::clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
}

PropagatorCache& PropagatorCache::global() {
    static PropagatorCache cache;
    return cache;
}

FockState propagate(const FockState& state, SpinZ s, double t, const SectorCouplings& c,
                    double tail_tolerance, PropagatorCache& cache) {
    if (!(t >= 0)) throw DomainError("propagate: t must be >= 0");
    const int dim = state.dim();
    const auto spec = cache.spectrum(s, c, dim);
    const double tau = c.omega_z * t;
    const int sz = as_int(s);

    const Eigen::MatrixXd& v = spec->vectors;
    Eigen::VectorXd re = v.transpose() * state.amplitudes.real();
    Eigen::VectorXd im = v.transpose() * state.amplitudes.imag();
    for (int k = 0; k < dim; ++k) {
        const complex z = complex(re[k], im[k]) * std::polar(1.0, -spec->energies[k] * tau);
        re[k] = z.real();
        im[k] = z.imag();
    }
    FockState out;
    out.amplitudes.resize(dim);
    out.amplitudes.real() = v * re;
    out.amplitudes.imag() = v * im;
    out.amplitudes *= std::polar(1.0, -c.d * sz * sz * tau);

    if (tail_tolerance >= 0 && out.tail_weight() > tail_tolerance)
        throw TruncationError("propagate: evolved tail weight " +
                              std::to_string(out.tail_weight()) + " exceeds tolerance");
    return out;
}

double HybridFockState::population(SpinZ s) const {
    return sectors[sector_slot(s)].squaredNorm();
}

HybridFockState to_fock(const HybridPureState& state, int dim) {
    HybridFockState out;
    for (auto& sector : out.sectors) sector = Eigen::VectorXcd::Zero(dim);
    for (const auto& b : state.branches())
        out.sectors[sector_slot(b.s)] += b.amplitude * coherent_fock(b.label.value(), dim).amplitudes;
    return out;
}

HybridFockState run_oracle(const FockState& motion, const DerivedCouplings& couplings,
                           const PulseSequence& sequence, const OracleOptions& options) {
    const int dim = motion.dim();
    HybridFockState st;
    for (auto& sector : st.sectors) sector = Eigen::VectorXcd::Zero(dim);
    st.sectors[sector_slot(SpinZ::zero)] = motion.amplitudes;

    auto apply_spin = [&](const Eigen::Matrix3cd& u) {
        std::array<Eigen::VectorXcd, 3> next;
        for (int row = 0; row < 3; ++row) {
            next[row] = u(row, 0) * st.sectors[0] + u(row, 1) * st.sectors[1] +
                        u(row, 2) * st.sectors[2];
        }
        st.sectors = std::move(next);
    };

    bool flipped = false;
    for (const auto& step : sequence.steps()) {
        if (std::holds_alternative<Measure>(step)) break;
        std::visit(overloaded{
                       [&](const MwPulse& p) { apply_spin(mw_unitary(p.duration, p.rabi_Omega)); },
                       [&](const FreeEvolve& f) {
                           const SectorCouplings sc = step_couplings(couplings, f, flipped);
                           for (int slot = 0; slot < 3; ++slot) {
                               if (st.sectors[slot].squaredNorm() == 0) continue;
                               FockState part{st.sectors[slot]};
                               st.sectors[slot] = propagate(part, spin_at(slot), f.duration, sc,
                                                            options.tail_tolerance)
                                                      .amplitudes;
                           }
                       },
                       [&](const EchoFlip&) { apply_spin(echo_unitary()); },
                       [&](const OrientationFlip&) { flipped = !flipped; },
                       [](const Measure&) {},
                   },
                   step);
    }
    return st;
}

SpinPopulations ramsey_oracle(const FockState& motion, const DerivedCouplings& couplings,
                              const PulseSequence& sequence, const OracleOptions& options) {
    const HybridFockState st = run_oracle(motion, couplings, sequence, options);
    return {st.population(SpinZ::plus), st.population(SpinZ::zero), st.population(SpinZ::minus)};
}

MixedOracleResult ramsey_oracle_mixed(const FockDensity& motion, const DerivedCouplings& couplings,
                                      const PulseSequence& sequence,
                                      const OracleOptions& options) {
    const int dim = motion.dim();
    Eigen::VectorXd weights;
    Eigen::MatrixXcd basis;
    const Eigen::MatrixXcd off = motion.matrix - Eigen::MatrixXcd(motion.matrix.diagonal().asDiagonal());
    if (off.norm() == 0) {
        weights = motion.matrix.diagonal().real();
        basis = Eigen::MatrixXcd::Identity(dim, dim);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(motion.matrix);
        weights = solver.eigenvalues();
        basis = solver.eigenvectors();
    }

    MixedOracleResult result;
    result.motional_state.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double w = weights[k];
        if (w <= options.weight_cutoff) continue;
        const FockState component{basis.col(k)};
        const HybridFockState st = run_oracle(component, couplings, sequence, options);
        result.populations.plus += w * st.population(SpinZ::plus);
        result.populations.zero += w * st.population(SpinZ::zero);
        result.populations.minus += w * st.population(SpinZ::minus);
        for (int slot = 0; slot < 3; ++slot) {
            const auto& psi = st.sectors[slot];
            result.motional_state.matrix.noalias() += w * psi * psi.adjoint();
            result.return_overlap[slot] += w * component.amplitudes.dot(psi);
        }
    }
    return result;
}

SpinPopulations ramsey_oracle(const FockDensity& motion, const DerivedCouplings& couplings,
                              const PulseSequence& sequence, const OracleOptions& options) {
    return ramsey_oracle_mixed(motion, couplings, sequence, options).populations;
}

double fidelity(const FockDensity& rho, const FockDensity& sigma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd sqrt_rho = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::MatrixXcd m = sqrt_rho * sigma.matrix * sqrt_rho;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(m, Eigen::EigenvaluesOnly);
    const double t = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return t * t;
}

}  // namespace levi::fock
