#pragma once

#include <numbers>

#include "levi/errors.hpp"

namespace levi {

inline constexpr double kPi = std::numbers::pi;

// CODATA 2018 values, SI units.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;    // J s
    static constexpr double mu0 = 1.25663706212e-6;    // T m / A
    static constexpr double muB = 9.2740100783e-24;    // J / T
    static constexpr double kB = 1.380649e-23;         // J / K
    static constexpr double g_freefall = 9.80665;      // m / s^2
};

/// Couplings given directly in units of hbar*omega_z.
///
/// `dl` is the gravitational coupling with the trap axis vertical (cos(theta) = 1);
/// the value at the configured angle is dl * cos(theta).
struct DimensionlessOverride {
    double l = 0.0;
    double dl = 0.0;
    double d = 0.0;
};

/// Trap, bead, magnet, spin, orientation and environment. SI units, angular
/// frequencies in rad/s. The defaults are the shipped design point.
struct ExperimentConfig {
    double bead_radius = 100e-9;
    double density = 3000.0;
    double omega_z = 1e5;
    double omega_x = 1e6;
    double omega_y = 1e6;
    double trap_wavelength = 1e-6;
    double permittivity = 1.5;
    double magnet_radius = 40e-6;
    double magnetization = 1.5e6;
    double magnet_offset = 120e-6;
    double theta = kPi / 2 - kPi / 40;
    double g_NV = 2.0;
    double zero_field_D = 2 * kPi * 2.87e9;
    double T2 = 10e-6;
    double rabi_Omega = 2 * kPi * 50e6;
    double temperature = 1e-3;

    bool has_dimensionless = false;
    DimensionlessOverride dimensionless{};

    // Throws ConfigError naming the first violated field.
    void validate() const;
};

/// Every constant derived from an ExperimentConfig.
struct DerivedCouplings {
    double omega_z = 0;       // rad/s, carried for time conversion
    double theta = 0;         // rad
    double cos_theta = 0;

    double mass = 0;          // kg
    double dipole = 0;        // A m^2
    double x_zpf = 0;         // m
    double lambda = 0;        // J
    double delta_lambda = 0;  // J, at theta
    double delta_lambda_vertical = 0;  // J, at cos(theta) = 1

    double l = 0;             // lambda / (hbar omega_z)
    double dl = 0;            // delta_lambda / (hbar omega_z)
    double dl_vertical = 0;
    double d = 0;             // D / omega_z

    double u_plus = 0;
    double u_zero = 0;
    double u_minus = 0;

    double t0 = 0;            // s
    double K = 0;
    double delta_phi_grav = 0;  // rad, 16 lambda dlambda t0 / (hbar^2 omega_z)
    double gamma_sc = 0;      // rad/s
    double gamma_max = 0;     // rad/s, gamma_sc (2 lambda / hbar omega_z)^2
    double nbar = 0;
    double well_separation = 0;  // 4 lambda / (hbar omega_z)

    double T2 = 0;
    double rabi_Omega = 0;
};

struct FieldVector {
    double x = 0;
    double y = 0;
    double z = 0;
};

double derive_mass(double radius, double density);
double derive_dipole(double magnetization, double magnet_radius);

// Signed gradient scale B0 = 3 mu0 m_z z0 / (4 pi |z0|^5), T/m.
double field_gradient_scale(double dipole, double z0);

/// First-order expansion of the dipole field about the trap centre.
FieldVector field_expansion(double dipole, double z0, const FieldVector& displacement);

/// cos(theta) evaluated as sin(pi/2 - theta) so that theta = pi/2 gives an exact zero.
double orientation_cosine(double theta);

DerivedCouplings derive_couplings(const ExperimentConfig& config);

/// Same as derive_couplings but with the config's angle replaced.
DerivedCouplings with_theta(const DerivedCouplings& base, double theta);

// gamma_sc / omega_z.
double scattering_ratio(double permittivity, double radius, double wavelength);

struct ScatteringRates {
    double gamma_sc = 0;   // rad/s
    double gamma_max = 0;  // rad/s, bound on motional decoherence
};

ScatteringRates scattering_rate(const ExperimentConfig& config);

double thermal_occupation(double temperature, double omega_z);

}  // namespace levi
