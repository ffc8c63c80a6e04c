#include "levi_cli/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "levi/config_io.hpp"
#include "levi/thermal.hpp"

namespace levi::cli {
namespace {

struct Source {
    LoadedConfig loaded;
    std::string path;
    std::string hash;
};

std::string hex_hash(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a64(bytes));
    return buf;
}

Source load_source(const std::string& path, const ExperimentConfig& fallback) {
    Source src;
    if (path.empty()) {
        src.loaded.experiment = fallback;
        src.path = "<builtin>";
        src.hash = hex_hash(config_to_json(fallback));
        return src;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    src.loaded = parse_config(bytes);
    src.path = path;
    src.hash = hex_hash(bytes);
    return src;
}

ExperimentConfig fig2_config() {
    ExperimentConfig cfg;
    cfg.theta = 0.0;
    cfg.has_dimensionless = true;
    cfg.dimensionless = {0.5, 0.05, 0.0};
    return cfg;
}

// "2+1.5i", "-0.5i", "3", or "re,im".
complex parse_complex(const std::string& text) {
    static const std::string num = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
    static const std::regex pair("^\\s*([+-]?" + num + ")\\s*,\\s*([+-]?" + num + ")\\s*$");
    static const std::regex full("^\\s*([+-]?" + num + ")?(?:([+-]?)(" + num + ")?i)?\\s*$");
    std::smatch m;
    if (std::regex_match(text, m, pair)) return {std::stod(m[1]), std::stod(m[2])};
    if (!text.empty() && std::regex_match(text, m, full) && (m[1].matched || text.find('i') != std::string::npos)) {
        const double re = m[1].matched ? std::stod(m[1]) : 0.0;
        double im = 0.0;
        if (text.find('i') != std::string::npos) {
            if (m[1].matched && m[2].length() == 0) throw DomainError("bad complex number '" + text + "'");
            im = m[3].matched ? std::stod(m[3]) : 1.0;
            if (m[2] == "-") im = -im;
        }
        return {re, im};
    }
    throw DomainError("bad complex number '" + text + "'");
}

class Emitter {
public:
    Emitter(std::string command, const Source& src, std::ostream& out)
        : out_(out) {
        manifest_.command = std::move(command);
        manifest_.config_path = src.path;
        manifest_.config_hash = src.hash;
        manifest_.version = tool_version();
    }

    void seed(std::uint64_t s) { manifest_.seed = s; }

    // Empty path or "-" means stdout.
    void emit(const std::string& path, const std::string& content) {
        if (path.empty() || path == "-") {
            out_ << content;
            return;
        }
        write_atomic(path, content);
        manifest_.outputs.push_back(path);
    }

    void finish() {
        if (!manifest_.outputs.empty()) write_atomic(manifest_.outputs.front() + ".manifest.json", manifest_.to_json());
    }

private:
    std::ostream& out_;
    RunManifest manifest_;
};

bool on_off(const std::string& v) { return v == "on"; }

struct ParamsArgs {
    std::string config, out;
};

struct TrajectoryArgs {
    std::string config, out;
    std::vector<std::string> betas;
    int sz = 1;
    int samples = 64;
    double periods = 1.0;
};

struct FringeArgs {
    std::string config, out;
    double theta_min = kPi / 2 - kPi / 20;
    double theta_max = kPi / 2;
    int steps = 101;
    std::string contrast = "off", echo = "off";
};

struct ThermalArgs {
    std::string config, out, summary;
    std::optional<double> nbar, theta;
    std::int64_t samples = 10000;
    std::uint64_t seed = 0;
    int threads = 0;
    bool diagnostic = false;
};

struct VerifyArgs {
    std::string config, report, suite = "quick";
    bool flip = false;
};

int cmd_params(const ParamsArgs& a, std::ostream& out) {
    const Source src = load_source(a.config, ExperimentConfig{});
    Emitter em("params", src, out);
    em.emit(a.out, couplings_to_json(derive_couplings(src.loaded.experiment)) + "\n");
    em.finish();
    return kOk;
}

int cmd_trajectory(const TrajectoryArgs& a, std::ostream& out) {
    const Source src = load_source(a.config, fig2_config());
    const DerivedCouplings c = derive_couplings(src.loaded.experiment);
    const SectorCouplings sc = SectorCouplings::from(c);
    const SpinZ s = spin_from_int(a.sz);

    std::vector<CoherentLabel> betas;
    for (const auto& b : a.betas) betas.push_back(CoherentLabel::bounded(parse_complex(b)));
    if (betas.empty()) betas = {CoherentLabel(), CoherentLabel(complex(2, 1.5))};

    const std::vector<double> times = linspace(0.0, a.periods * c.t0, a.samples);
    std::ostringstream csv;
    csv << "t,re_beta,im_beta,phase,s_z\n";
    for (const auto& b : betas) {
        for (const auto& p : trajectory(b, s, times, sc)) {
            csv << csv_number(p.t) << ',' << csv_number(p.beta.re()) << ',' << csv_number(p.beta.im()) << ','
                << csv_number(p.phase) << ',' << a.sz << '\n';
        }
    }
    Emitter em("trajectory", src, out);
    em.emit(a.out, csv.str());
    em.finish();
    return kOk;
}

int cmd_fringe(const FringeArgs& a, std::ostream& out) {
    const Source src = load_source(a.config, ExperimentConfig{});
    const DerivedCouplings c = derive_couplings(src.loaded.experiment);
    if (a.steps < 1) throw DomainError("fringe: --steps must be >= 1");
    FringeOptions opts;
    opts.contrast = on_off(a.contrast) ? ContrastOptions{} : kIdealContrast;
    opts.echo = on_off(a.echo);
    const auto grid = linspace(a.theta_min, a.theta_max, a.steps);
    std::ostringstream csv;
    csv << "theta,delta_phi,contrast,p0,pplus,pminus\n";
    for (const auto& r : fringe_scan(grid, c, opts)) {
        csv << csv_number(r.theta) << ',' << csv_number(r.delta_phi) << ',' << csv_number(r.contrast) << ','
            << csv_number(r.p0) << ',' << csv_number(r.pplus) << ',' << csv_number(r.pminus) << '\n';
    }
    Emitter em("fringe", src, out);
    em.emit(a.out, csv.str());
    em.finish();
    return kOk;
}

int cmd_thermal(const ThermalArgs& a, std::ostream& out, std::ostream& err) {
    const Source src = load_source(a.config, ExperimentConfig{});
    DerivedCouplings c = derive_couplings(src.loaded.experiment);
    if (a.theta) c = with_theta(c, *a.theta);
    const PulseSequence seq = src.loaded.has_sequence ? src.loaded.sequence : PulseSequence::ramsey(c);

    ThermalSpec spec{a.nbar.value_or(c.nbar), a.samples, a.seed};
    spec.validate();
    // The P-function of the ground state is a point: one run says everything.
    if (spec.nbar == 0) spec.n_samples = 1;
    MonteCarloOptions opts;
    opts.diagnostic = a.diagnostic;
    opts.threads = a.threads;
    const MonteCarloResult r = monte_carlo_fringe(spec, c.theta, c, seq, opts);

    std::ostringstream csv;
    csv << "sample,re_beta,im_beta,p0\n";
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& smp = r.samples[i];
        csv << i << ',' << csv_number(smp.beta.re()) << ',' << csv_number(smp.beta.im()) << ','
            << csv_number(smp.p0) << '\n';
    }
    nlohmann::ordered_json summary;
    summary["mean"] = r.mean_p0;
    summary["spread"] = r.spread;
    summary["std_error"] = r.std_error;
    summary["seed"] = spec.seed;
    summary["nbar"] = spec.nbar;
    summary["samples"] = spec.n_samples;
    summary["theta"] = c.theta;

    Emitter em("thermal", src, out);
    em.seed(spec.seed);
    em.emit(a.out, csv.str());
    if (!a.summary.empty()) {
        em.emit(a.summary, summary.dump(2) + "\n");
    } else if (!a.out.empty() && a.out != "-") {
        std::filesystem::path p(a.out);
        em.emit(p.replace_extension(".summary.json").string(), summary.dump(2) + "\n");
    } else {
        err << summary.dump() << '\n';
    }
    em.finish();
    return kOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    const Source src = load_source(a.config, ExperimentConfig{});
    const auto checks = run_verify(src.loaded.experiment, {a.suite == "full", a.flip});
    std::size_t passed = 0;
    for (const auto& c : checks) passed += c.passed;
    Emitter em("verify", src, out);
    em.emit(a.report, verify_report_json(checks, a.suite));
    em.finish();
    err << "verify (" << a.suite << "): " << passed << "/" << checks.size() << " checks passed\n";
    for (const auto& c : checks)
        if (!c.passed) err << "  FAILED " << c.name << ": deviation " << c.deviation << " > " << c.tolerance << '\n';
    return passed == checks.size() ? kOk : kVerifyFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gravitationally induced spin phase in a levitated NV nanodiamond", "levi_ramsey"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    ParamsArgs pa;
    auto* params = app.add_subcommand("params", "Print derived couplings as JSON");
    params->add_option("-c,--config", pa.config, "JSON config (default: built-in)");
    params->add_option("-o,--out", pa.out, "Output path (default: stdout)");

    TrajectoryArgs ta;
    auto* traj = app.add_subcommand("trajectory", "Phase-space trajectory CSV");
    traj->add_option("-c,--config", ta.config, "JSON config (default: dimensionless l=0.5, dl=0.05, theta=0)");
    traj->add_option("-o,--out", ta.out, "Output path (default: stdout)");
    traj->add_option("--beta", ta.betas, "Initial coherent amplitude, e.g. 2+1.5i (repeatable)");
    traj->add_option("--sz", ta.sz, "Spin projection")->check(CLI::IsMember({-1, 0, 1}))->capture_default_str();
    traj->add_option("--samples", ta.samples, "Points per trajectory")->check(CLI::PositiveNumber)->capture_default_str();
    traj->add_option("--periods", ta.periods, "Duration in trap periods")->check(CLI::NonNegativeNumber)->capture_default_str();

    FringeArgs fa;
    auto* fringe = app.add_subcommand("fringe", "Ramsey fringe P0(theta) CSV");
    fringe->add_option("-c,--config", fa.config, "JSON config (default: built-in)");
    fringe->add_option("-o,--out", fa.out, "Output path (default: stdout)");
    fringe->add_option("--theta-min", fa.theta_min)->capture_default_str();
    fringe->add_option("--theta-max", fa.theta_max)->capture_default_str();
    fringe->add_option("--steps", fa.steps)->capture_default_str();
    fringe->add_option("--contrast", fa.contrast, "Dephasing and scattering envelope")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    fringe->add_option("--echo", fa.echo, "Echo with orientation reversal")->check(CLI::IsMember({"on", "off"}))->capture_default_str();

    ThermalArgs tha;
    auto* therm = app.add_subcommand("thermal", "Monte Carlo over the thermal P-function");
    therm->add_option("-c,--config", tha.config, "JSON config (default: built-in)");
    therm->add_option("-o,--out", tha.out, "Sample CSV path (default: stdout)");
    therm->add_option("--summary", tha.summary, "Summary JSON path (default: next to --out, else stderr)");
    therm->add_option("--nbar", tha.nbar, "Mean phonon number (default: from temperature)");
    therm->add_option("--samples", tha.samples)->check(CLI::PositiveNumber)->capture_default_str();
    therm->add_option("--seed", tha.seed)->capture_default_str();
    therm->add_option("--theta", tha.theta, "Orientation (default: from config)");
    therm->add_option("--threads", tha.threads, "Worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
    therm->add_flag("--diagnostic", tha.diagnostic, "Allow free segments that are not whole periods");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run invariant and oracle checks");
    verify->add_option("-c,--config", va.config, "JSON config (default: built-in)");
    verify->add_option("--suite", va.suite)->check(CLI::IsMember({"quick", "full"}))->capture_default_str();
    verify->add_option("--report", va.report, "Report JSON path (default: stdout)");
    verify->add_flag("--debug-flip-lambda-sign", va.flip)->group("");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("levi_ramsey");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (params->parsed()) return cmd_params(pa, out);
        if (traj->parsed()) return cmd_trajectory(ta, out);
        if (fringe->parsed()) return cmd_fringe(fa, out);
        if (therm->parsed()) return cmd_thermal(tha, out, err);
        if (verify->parsed()) return cmd_verify(va, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SequenceError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
    return kUsage;
}

}  // namespace levi::cli
