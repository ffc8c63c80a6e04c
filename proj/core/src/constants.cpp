#include "levi/constants.hpp"

#include <cmath>
#include <string>

namespace levi {
namespace {

using PC = PhysicalConstants;

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void ExperimentConfig::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"bead_radius", bead_radius},       {"density", density},
        {"omega_z", omega_z},               {"omega_x", omega_x},
        {"omega_y", omega_y},               {"trap_wavelength", trap_wavelength},
        {"permittivity", permittivity},     {"magnet_radius", magnet_radius},
        {"magnetization", magnetization},   {"magnet_offset", magnet_offset},
        {"theta", theta},                   {"g_NV", g_NV},
        {"zero_field_D", zero_field_D},     {"T2", T2},
        {"rabi_Omega", rabi_Omega},         {"temperature", temperature},
    };
    for (const auto& [key, value] : fields) require(finite(value), key, "must be finite");

    require(bead_radius > 0, "bead_radius", "must be > 0");
    require(density > 0, "density", "must be > 0");
    require(omega_z > 0, "omega_z", "must be > 0");
    require(omega_x >= omega_z, "omega_x", "must be >= omega_z");
    require(omega_y >= omega_z, "omega_y", "must be >= omega_z");
    require(trap_wavelength > 0, "trap_wavelength", "must be > 0");
    require(permittivity > 1, "permittivity", "must be > 1");
    require(magnet_radius > 0, "magnet_radius", "must be > 0");
    require(magnetization > 0, "magnetization", "must be > 0");
    require(magnet_offset != 0, "magnet_offset", "must be nonzero");
    require(std::abs(magnet_offset) > magnet_radius + bead_radius, "magnet_offset",
            "|z0| must exceed magnet_radius + bead_radius");
    require(theta >= 0 && theta <= kPi, "theta", "must lie in [0, pi]");
    require(T2 > 0, "T2", "must be > 0");
    require(rabi_Omega > 0, "rabi_Omega", "must be > 0");
    require(temperature >= 0, "temperature", "must be >= 0");
    if (has_dimensionless) {
        require(finite(dimensionless.l) && finite(dimensionless.dl) && finite(dimensionless.d),
                "dimensionless", "l, dl and d must be finite");
    }
}

double derive_mass(double radius, double density) {
    if (!(radius > 0) || !(density > 0))
        throw DomainError("derive_mass: radius and density must be > 0");
    return 4.0 / 3.0 * kPi * radius * radius * radius * density;
}

double derive_dipole(double magnetization, double magnet_radius) {
    if (!(magnetization > 0) || !(magnet_radius > 0))
        throw DomainError("derive_dipole: magnetization and radius must be > 0");
    return magnetization * 4.0 / 3.0 * kPi * magnet_radius * magnet_radius * magnet_radius;
}

double field_gradient_scale(double dipole, double z0) {
    if (z0 == 0 || !std::isfinite(z0)) throw DomainError("field expansion: z0 must be nonzero");
    const double az = std::abs(z0);
    return 3.0 * PC::mu0 * dipole * z0 / (4.0 * kPi * az * az * az * az * az);
}

FieldVector field_expansion(double dipole, double z0, const FieldVector& r) {
    const double b0 = field_gradient_scale(dipole, z0);
    const double az = std::abs(z0);
    const double bias = PC::mu0 * dipole / (2.0 * kPi * az * az * az);
    return {-b0 * r.x, -b0 * r.y, bias + 2.0 * b0 * r.z};
}

double orientation_cosine(double theta) { return std::sin(kPi / 2 - theta); }

double scattering_ratio(double permittivity, double radius, double wavelength) {
    if (!(wavelength > 0)) throw DomainError("scattering: trap wavelength must be > 0");
    if (permittivity <= -2) throw DomainError("scattering: permittivity must exceed -2");
    if (!(radius >= 0)) throw DomainError("scattering: radius must be >= 0");
    const double ratio = radius / wavelength;
    return 16.0 * kPi * kPi * kPi / 15.0 * ((permittivity - 1) / (permittivity + 2)) * ratio *
           ratio * ratio;
}

ScatteringRates scattering_rate(const ExperimentConfig& cfg) {
    const double gamma_sc =
        cfg.omega_z * scattering_ratio(cfg.permittivity, cfg.bead_radius, cfg.trap_wavelength);
    const double l = derive_couplings(cfg).l;
    return {gamma_sc, gamma_sc * (2 * l) * (2 * l)};
}

double thermal_occupation(double temperature, double omega_z) {
    if (!(temperature >= 0)) throw DomainError("thermal_occupation: temperature must be >= 0");
    if (!(omega_z > 0)) throw DomainError("thermal_occupation: omega_z must be > 0");
    if (temperature == 0) return 0.0;
    return 1.0 / std::expm1(PC::hbar * omega_z / (PC::kB * temperature));
}

namespace {

// Fills every theta-dependent field from l, dl_vertical and the angle.
void apply_orientation(DerivedCouplings& c, double theta) {
    const double hbar2_omega = PC::hbar * PC::hbar * c.omega_z;
    c.theta = theta;
    c.cos_theta = orientation_cosine(theta);
    c.dl = c.dl_vertical * c.cos_theta;
    c.delta_lambda = c.delta_lambda_vertical * c.cos_theta;
    c.u_plus = 2 * (c.l + c.dl);
    c.u_zero = 2 * c.dl;
    c.u_minus = 2 * (-c.l + c.dl);
    // 8 lambda dlambda t0 / (hbar^2 omega cos) with the cosine cancelled, so
    // K stays finite at theta = pi/2.
    c.K = 8 * c.lambda * c.delta_lambda_vertical * c.t0 / hbar2_omega;
    c.delta_phi_grav = 16 * c.lambda * c.delta_lambda * c.t0 / hbar2_omega;
}

}  // namespace

DerivedCouplings derive_couplings(const ExperimentConfig& cfg) {
    cfg.validate();
    DerivedCouplings c;
    const double hw = PC::hbar * cfg.omega_z;

    c.omega_z = cfg.omega_z;
    c.mass = derive_mass(cfg.bead_radius, cfg.density);
    c.dipole = derive_dipole(cfg.magnetization, cfg.magnet_radius);
    c.x_zpf = std::sqrt(PC::hbar / (2 * c.mass * cfg.omega_z));
    c.t0 = 2 * kPi / cfg.omega_z;

    if (cfg.has_dimensionless) {
        c.l = cfg.dimensionless.l;
        c.dl_vertical = cfg.dimensionless.dl;
        c.d = cfg.dimensionless.d;
        c.lambda = c.l * hw;
        c.delta_lambda_vertical = c.dl_vertical * hw;
    } else {
        const double b0 = field_gradient_scale(c.dipole, cfg.magnet_offset);
        c.lambda = b0 * cfg.g_NV * PC::muB * c.x_zpf;
        c.delta_lambda_vertical = 0.5 * c.mass * PC::g_freefall * c.x_zpf;
        c.l = c.lambda / hw;
        c.dl_vertical = c.delta_lambda_vertical / hw;
        c.d = cfg.zero_field_D / cfg.omega_z;
    }
    apply_orientation(c, cfg.theta);

    c.gamma_sc =
        cfg.omega_z * scattering_ratio(cfg.permittivity, cfg.bead_radius, cfg.trap_wavelength);
    c.gamma_max = c.gamma_sc * (2 * c.l) * (2 * c.l);
    c.nbar = thermal_occupation(cfg.temperature, cfg.omega_z);
    c.well_separation = 4 * c.l;
    c.T2 = cfg.T2;
    c.rabi_Omega = cfg.rabi_Omega;
    return c;
}

DerivedCouplings with_theta(const DerivedCouplings& base, double theta) {
    DerivedCouplings c = base;
    apply_orientation(c, theta);
    return c;
}

}  // namespace levi
