#include "levi/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace levi {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double number_at(const json& obj, const std::string& key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path, "must be a number");
    return v.get<double>();
}

struct FieldRef {
    const char* key;
    double ExperimentConfig::*member;
};

constexpr FieldRef kFields[] = {
    {"bead_radius", &ExperimentConfig::bead_radius},
    {"density", &ExperimentConfig::density},
    {"omega_z", &ExperimentConfig::omega_z},
    {"omega_x", &ExperimentConfig::omega_x},
    {"omega_y", &ExperimentConfig::omega_y},
    {"trap_wavelength", &ExperimentConfig::trap_wavelength},
    {"permittivity", &ExperimentConfig::permittivity},
    {"magnet_radius", &ExperimentConfig::magnet_radius},
    {"magnetization", &ExperimentConfig::magnetization},
    {"magnet_offset", &ExperimentConfig::magnet_offset},
    {"theta", &ExperimentConfig::theta},
    {"g_NV", &ExperimentConfig::g_NV},
    {"zero_field_D", &ExperimentConfig::zero_field_D},
    {"T2", &ExperimentConfig::T2},
    {"rabi_Omega", &ExperimentConfig::rabi_Omega},
    {"temperature", &ExperimentConfig::temperature},
};

const FieldRef* find_field(const std::string& key) {
    for (const auto& f : kFields)
        if (key == f.key) return &f;
    return nullptr;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(prefix + it.key(), "unknown key");
    }
}

PulseStep parse_step(const json& step, std::size_t index, const DerivedCouplings& c) {
    const std::string prefix = "sequence[" + std::to_string(index) + "].";
    if (!step.is_object()) throw ConfigError(prefix.substr(0, prefix.size() - 1), "must be an object");
    if (!step.contains("type") || !step.at("type").is_string())
        throw ConfigError(prefix + "type", "missing or not a string");
    const std::string type = step.at("type").get<std::string>();

    if (type == "mw") {
        reject_unknown(step, {"type", "duration", "rabi_Omega"}, prefix);
        MwPulse p;
        p.rabi_Omega = step.contains("rabi_Omega") ? number_at(step, "rabi_Omega", prefix + "rabi_Omega")
                                                   : c.rabi_Omega;
        if (!(p.rabi_Omega > 0)) throw ConfigError(prefix + "rabi_Omega", "must be > 0");
        p.duration = step.contains("duration") ? number_at(step, "duration", prefix + "duration")
                                               : quarter_pulse_duration(p.rabi_Omega);
        return p;
    }
    if (type == "free") {
        reject_unknown(step, {"type", "duration", "periods", "theta"}, prefix);
        const bool has_d = step.contains("duration");
        const bool has_p = step.contains("periods");
        if (has_d == has_p) throw ConfigError(prefix + "duration", "give exactly one of duration, periods");
        FreeEvolve f;
        f.duration = has_d ? number_at(step, "duration", prefix + "duration")
                           : number_at(step, "periods", prefix + "periods") * c.t0;
        if (step.contains("theta")) f.theta = number_at(step, "theta", prefix + "theta");
        return f;
    }
    reject_unknown(step, {"type"}, prefix);
    if (type == "echo") return EchoFlip{};
    if (type == "orientation_flip") return OrientationFlip{};
    if (type == "measure") return Measure{};
    throw ConfigError(prefix + "type", "unknown step type '" + type + "'");
}

}  // namespace

LoadedConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

    LoadedConfig out;
    ExperimentConfig& cfg = out.experiment;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (const FieldRef* f = find_field(key)) {
            cfg.*(f->member) = number_at(doc, key, key);
        } else if (key == "dimensionless") {
            const json& d = it.value();
            if (!d.is_object()) throw ConfigError(key, "must be an object");
            reject_unknown(d, {"l", "dl", "d"}, "dimensionless.");
            cfg.has_dimensionless = true;
            if (d.contains("l")) cfg.dimensionless.l = number_at(d, "l", "dimensionless.l");
            if (d.contains("dl")) cfg.dimensionless.dl = number_at(d, "dl", "dimensionless.dl");
            if (d.contains("d")) cfg.dimensionless.d = number_at(d, "d", "dimensionless.d");
        } else if (key != "sequence") {
            throw ConfigError(key, "unknown key");
        }
    }
    cfg.validate();

    if (doc.contains("sequence")) {
        const json& seq = doc.at("sequence");
        if (!seq.is_array()) throw ConfigError("sequence", "must be an array");
        const DerivedCouplings c = derive_couplings(cfg);
        std::vector<PulseStep> steps;
        for (std::size_t i = 0; i < seq.size(); ++i) steps.push_back(parse_step(seq[i], i, c));
        try {
            out.sequence = PulseSequence(std::move(steps));
        } catch (const SequenceError& e) {
            throw ConfigError("sequence", e.what());
        }
        out.has_sequence = true;
    }
    return out;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
    ordered_json doc;
    for (const auto& f : kFields) doc[f.key] = cfg.*(f.member);
    if (cfg.has_dimensionless)
        doc["dimensionless"] = {{"l", cfg.dimensionless.l},
                                {"dl", cfg.dimensionless.dl},
                                {"d", cfg.dimensionless.d}};
    return doc.dump(indent);
}

std::string couplings_to_json(const DerivedCouplings& c, int indent) {
    ordered_json doc;
    doc["mass"] = c.mass;
    doc["dipole"] = c.dipole;
    doc["x_zpf"] = c.x_zpf;
    doc["lambda"] = c.lambda;
    doc["delta_lambda"] = c.delta_lambda;
    doc["l"] = c.l;
    doc["dl"] = c.dl;
    doc["u_plus"] = c.u_plus;
    doc["u_zero"] = c.u_zero;
    doc["u_minus"] = c.u_minus;
    doc["t0"] = c.t0;
    doc["K"] = c.K;
    doc["theta"] = c.theta;
    doc["delta_phi_grav"] = c.delta_phi_grav;
    doc["gamma_sc"] = c.gamma_sc;
    doc["gamma_sc_over_omega_z"] = c.gamma_sc / c.omega_z;
    doc["gamma_max"] = c.gamma_max;
    doc["nbar"] = c.nbar;
    doc["well_separation"] = c.well_separation;
    doc["max_separation"] = 2 * c.well_separation;
    doc["well_separation_m_zpf"] = c.well_separation * c.x_zpf;
    doc["well_separation_m_2zpf"] = c.well_separation * 2 * c.x_zpf;
    doc["max_separation_m_zpf"] = 2 * c.well_separation * c.x_zpf;
    doc["max_separation_m_2zpf"] = 2 * c.well_separation * 2 * c.x_zpf;
    return doc.dump(indent);
}

}  // namespace levi
