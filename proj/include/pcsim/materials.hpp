#ifndef PCSIM_MATERIALS_HPP
#define PCSIM_MATERIALS_HPP

#include <cmath>
#include <string>

#include "pcsim/errors.hpp"

namespace pcsim {

inline constexpr double k_boltzmann_ev = 8.617333262e-5; // eV/K

// Electrical and thermal properties of one GST phase at the reference temperature.
struct PhaseProperties {
    double sigma_ref;         // electrical conductivity at t_ref (S/m)
    double activation_energy; // conductivity activation (eV), 0 = temperature-flat
    double kappa;             // thermal conductivity (W/(m K))
    double c_vol;             // volumetric heat capacity (J/(m^3 K))
};

// Full material description: three phases plus transition and kinetics parameters.
// Values shipped by gst_defaults() are literature-magnitude defaults meant to be
// calibrated through the config file, not measured constants.
struct MaterialTable {
    PhaseProperties amorphous{3.0, 0.30, 0.3, 1.25e6};
    PhaseProperties crystalline{4.0e4, 0.02, 1.0, 1.25e6};
    PhaseProperties molten{3.0e5, 0.0, 1.5, 1.25e6};

    double t_ref = 300.0;         // reference temperature for sigma_ref (K)
    double t_melt = 900.0;        // melting temperature (K)
    double t_crys = 430.0;        // crystallization onset (K)
    double latent_heat = 6.0e8;   // volumetric latent heat of fusion (J/m^3)
    double latent_window = 20.0;  // enthalpy-method smearing width around t_melt (K)

    double growth_prefactor = 800.0;      // grain growth speed scale (m/s)
    double growth_activation = 0.25;      // growth activation energy (eV)
    double nucleation_prefactor = 2.0e42; // nucleation events / (m^3 s)
    double nucleation_activation = 1.2;   // nucleation activation energy (eV)

    // Non-phase-change regions, kept here so one table describes the whole stack.
    double electrode_sigma = 1.0e7; // S/m
    double electrode_kappa = 100.0; // W/(m K)
    double insulator_kappa = 1.0;   // W/(m K)

    static MaterialTable gst_defaults() { return MaterialTable{}; }

    void validate() const {
        if (!(t_melt > t_crys) || !(t_crys > 300.0))
            throw DomainError("material table requires t_melt > t_crys > 300 K");
        auto check_phase = [](const PhaseProperties& p, const char* name) {
            if (!(p.sigma_ref > 0.0) || !(p.kappa > 0.0) || !(p.c_vol > 0.0) ||
                p.activation_energy < 0.0)
                throw DomainError(std::string("invalid phase properties for ") + name);
        };
        check_phase(amorphous, "amorphous");
        check_phase(crystalline, "crystalline");
        check_phase(molten, "molten");
        if (crystalline.sigma_ref / amorphous.sigma_ref < 100.0)
            throw DomainError("crystalline/amorphous conductivity contrast must be >= 100");
        if (!(t_ref > 0.0) || !(latent_window > 0.0) || latent_heat < 0.0)
            throw DomainError("invalid reference temperature or latent heat parameters");
        if (!(growth_prefactor >= 0.0) || !(nucleation_prefactor >= 0.0) ||
            growth_activation < 0.0 || nucleation_activation < 0.0)
            throw DomainError("kinetics prefactors must be >= 0 and activations >= 0");
        if (!(electrode_sigma > 0.0) || !(electrode_kappa > 0.0) || !(insulator_kappa > 0.0))
            throw DomainError("electrode/insulator properties must be positive");
    }
};

// Thermally activated conductivity of a single phase.
inline double phase_conductivity(const PhaseProperties& p, double temperature, double t_ref) {
    if (p.activation_energy == 0.0) return p.sigma_ref;
    return p.sigma_ref *
           std::exp(-(p.activation_energy / k_boltzmann_ev) * (1.0 / temperature - 1.0 / t_ref));
}

// Local electrical conductivity from the crystalline fraction. Geometric mixing:
// log-linear in cd_norm, exact at both endpoints, monotone in temperature.
inline double conductivity(double cd_norm, double temperature, bool molten,
                           const MaterialTable& m) {
    if (!(cd_norm >= 0.0) || !(cd_norm <= 1.0))
        throw DomainError("conductivity: cd_norm must lie in [0,1]");
    if (!(temperature > 0.0))
        throw DomainError("conductivity: temperature must be positive");
    if (molten) return m.molten.sigma_ref;
    if (cd_norm == 0.0) return phase_conductivity(m.amorphous, temperature, m.t_ref);
    if (cd_norm == 1.0) return phase_conductivity(m.crystalline, temperature, m.t_ref);
    const double log_a = std::log(phase_conductivity(m.amorphous, temperature, m.t_ref));
    const double log_c = std::log(phase_conductivity(m.crystalline, temperature, m.t_ref));
    return std::exp((1.0 - cd_norm) * log_a + cd_norm * log_c);
}

// Grain growth speed. Zero below the crystallization onset and at/above melt;
// Arrhenius-activated with a vanishing driving force at t_melt in between.
inline double growth_velocity(double temperature, const MaterialTable& m) {
    if (!(temperature > 0.0)) throw DomainError("growth_velocity: temperature must be positive");
    if (temperature < m.t_crys || temperature >= m.t_melt) return 0.0;
    return m.growth_prefactor * std::exp(-m.growth_activation / (k_boltzmann_ev * temperature)) *
           (1.0 - temperature / m.t_melt);
}

// Expected nucleation events per volume per time, same window and form as growth.
inline double nucleation_rate(double temperature, const MaterialTable& m) {
    if (!(temperature > 0.0)) throw DomainError("nucleation_rate: temperature must be positive");
    if (temperature < m.t_crys || temperature >= m.t_melt) return 0.0;
    return m.nucleation_prefactor *
           std::exp(-m.nucleation_activation / (k_boltzmann_ev * temperature)) *
           (1.0 - temperature / m.t_melt);
}

// Thermal conductivity of GST, linear mix between phases (contrast is mild,
// unlike the electrical one).
inline double thermal_conductivity(double cd_norm, bool molten, const MaterialTable& m) {
    if (molten) return m.molten.kappa;
    return m.amorphous.kappa + (m.crystalline.kappa - m.amorphous.kappa) * cd_norm;
}

// Effective volumetric heat capacity with the latent heat applied as an
// enthalpy-method bump over latent_window around t_melt.
inline double effective_heat_capacity(double temperature, double cd_norm, bool molten,
                                      const MaterialTable& m) {
    const double base = molten ? m.molten.c_vol
                               : m.amorphous.c_vol +
                                     (m.crystalline.c_vol - m.amorphous.c_vol) * cd_norm;
    const double half = 0.5 * m.latent_window;
    if (temperature >= m.t_melt - half && temperature <= m.t_melt + half)
        return base + m.latent_heat / m.latent_window;
    return base;
}

} // namespace pcsim

#endif
