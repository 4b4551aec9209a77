#ifndef PCSIM_COUPLED_HPP
#define PCSIM_COUPLED_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pcsim/circuit.hpp"
#include "pcsim/field_state.hpp"
#include "pcsim/geometry.hpp"
#include "pcsim/heat.hpp"
#include "pcsim/kinetics.hpp"
#include "pcsim/materials.hpp"
#include "pcsim/potential.hpp"

namespace pcsim {

struct StepStats {
    bool active = false; // electrically driven this step
    int gs_passes = 0;
    double total_power = 0.0;        // device Joule power (W)
    double conservation_rel = 0.0;   // |sum I| / max |I|
    double energy_residual_rel = 0.0;
    int potential_iterations = 0;
    int heat_iterations = 0;
    std::optional<CircuitState> circuit;
};

struct StepOptions {
    int max_gs_passes = 10;
    double gs_tol = 1e-3; // relative terminal-current change between passes
    PotentialOptions potential{};
    HeatOptions heat{};
};

// Per-run solver scratch: the previous-step temperature lets the first heat
// solve of a step start from a trajectory extrapolation. Purely a solver
// seed, never part of the physical state.
struct StepScratch {
    std::vector<double> t_prev;
};

// Electrical sub-step at a frozen sigma field: fills V, returns terminal data.
using ElectricPass = std::function<PotentialSolution(
    const std::vector<double>& sigma, std::vector<double>& V,
    std::optional<CircuitState>& circuit)>;

namespace detail {

inline StepStats coupled_step_impl(const DeviceGrid& g, FieldState& s, const MaterialTable& m,
                                   const KineticsParams& kin, double dt,
                                   std::uint64_t step_index, const ElectricPass& electric,
                                   bool active, const StepOptions& opt,
                                   StepScratch* scratch) {
    StepStats stats;
    stats.active = active;

    const std::vector<double> t_old = s.T;
    JouleField joule;
    HeatStepResult heat;

    if (!active) {
        std::fill(s.V.begin(), s.V.end(), 0.0);
        // equilibrated idle: the heat solve is the identity, skip it
        double dev = 0.0;
        for (double t : s.T) dev = std::max(dev, std::fabs(t - g.t_ambient));
        if (dev > 1e-9) heat = step_heat(g, s, m, {}, dt, opt.heat);
        stats.gs_passes = 1;
        stats.heat_iterations = heat.iterations;
    } else {
        // trajectory extrapolation seeds the first implicit solve
        std::vector<double> seed;
        if (scratch && scratch->t_prev.size() == t_old.size()) {
            seed.resize(t_old.size());
            for (std::size_t i = 0; i < t_old.size(); ++i)
                seed[i] = 2.0 * t_old[i] - scratch->t_prev[i];
        }
        std::array<double, n_contacts> prev_i{};
        bool have_prev = false;
        std::vector<double> t_warm;
        for (int pass = 0; pass < opt.max_gs_passes; ++pass) {
            ++stats.gs_passes;
            const std::vector<double> sigma = sigma_field(g, s, m);
            std::optional<CircuitState> circuit;
            const PotentialSolution sol = electric(sigma, s.V, circuit);

            stats.conservation_rel =
                sol.max_current > 1e-30 ? sol.conservation_error / sol.max_current : 0.0;
            stats.potential_iterations += sol.iterations;
            if (circuit) stats.circuit = circuit;

            double change = 0.0;
            if (have_prev) {
                for (int c = 0; c < n_contacts; ++c)
                    change = std::max(change, std::fabs(sol.contact_current[c] - prev_i[c]));
                const double scale = std::max(sol.max_current, 1e-15);
                if (change / scale < opt.gs_tol) {
                    // currents settled: keep the temperature of the previous
                    // pass, whose source differed by less than gs_tol
                    joule = joule_source(g, sigma, s.V);
                    stats.total_power = joule.total;
                    break;
                }
            }
            prev_i = sol.contact_current;
            have_prev = true;

            joule = joule_source(g, sigma, s.V);
            stats.total_power = joule.total;
            if (pass > 0) t_warm = s.T;
            s.T = t_old;
            heat = step_heat(g, s, m, joule.q, dt, opt.heat,
                             pass > 0 ? &t_warm : (seed.empty() ? nullptr : &seed));
            stats.heat_iterations += heat.iterations;
        }
    }

    stats.energy_residual_rel = heat.energy_residual_rel(dt);
    update_phase(g, s, m, kin, dt, step_index);
    s.time += dt;
    if (scratch) scratch->t_prev = t_old;
    return stats;
}

} // namespace detail

// One operator-split step with fixed contact conditions: potential solve,
// Joule source, implicit heat step, then the phase update. sigma(T) and V are
// iterated within the step until the terminal currents settle.
inline StepStats coupled_step(const DeviceGrid& g, FieldState& s, const MaterialTable& m,
                              const KineticsParams& kin, const ContactBC& bc, double dt,
                              std::uint64_t step_index = 0, const StepOptions& opt = {},
                              StepScratch* scratch = nullptr) {
    const bool active = has_voltage_contact(bc);
    ElectricPass electric = [&](const std::vector<double>& sigma, std::vector<double>& V,
                                std::optional<CircuitState>&) {
        return solve_potential(g, sigma, bc, V, opt.potential);
    };
    return detail::coupled_step_impl(g, s, m, kin, dt, step_index, electric, active, opt,
                                     scratch);
}

// Device-circuit coupler. Probes the linear terminal response once per pass
// and reuses the probe fields as warm starts across steps; the final device
// potential is assembled by superposition, no extra solve.
class CircuitCoupler {
  public:
    CircuitCoupler(const CircuitConfig& cfg, DriveMode mode) : cfg_(&cfg), mode_(mode) {}

    DriveMode mode() const { return mode_; }
    const CircuitConfig& config() const { return *cfg_; }

    PotentialSolution pass(const DeviceGrid& g, const std::vector<double>& sigma,
                           std::vector<double>& V, std::optional<CircuitState>& circuit,
                           const PotentialOptions& opt) {
        if (mode_ == DriveMode::write) return write_pass(g, sigma, V, circuit, opt);
        return read_pass(g, sigma, V, circuit, opt);
    }

  private:
    PotentialSolution write_pass(const DeviceGrid& g, const std::vector<double>& sigma,
                                 std::vector<double>& V, std::optional<CircuitState>& circuit,
                                 const PotentialOptions& opt) {
        const PotentialSolution probe =
            solve_potential(g, sigma, detail::write_bc(1.0), warm_[0], opt);
        DeviceOracle oracle = [&probe](const ContactBC&) { return probe.contact_current; };
        CircuitState st = solve_coupled(*cfg_, oracle, DriveMode::write);
        const double v = st.contact_voltage[W1];

        V.resize(warm_[0].size());
        for (std::size_t i = 0; i < V.size(); ++i) V[i] = v * warm_[0][i];
        PotentialSolution sol = scale_solution(probe, v);
        st.contact_current = sol.contact_current;
        st.i_write = sol.contact_current[W1];
        circuit = st;
        return sol;
    }

    PotentialSolution read_pass(const DeviceGrid& g, const std::vector<double>& sigma,
                                std::vector<double>& V, std::optional<CircuitState>& circuit,
                                const PotentialOptions& opt) {
        const double vs = cfg_->v_read_supply;
        const PotentialSolution base =
            solve_potential(g, sigma, detail::read_bc(vs, 0.0, 0.0), warm_[1], opt);
        const PotentialSolution p2 =
            solve_potential(g, sigma, detail::read_bc(vs, 1.0, 0.0), warm_[2], opt);
        const PotentialSolution p3 =
            solve_potential(g, sigma, detail::read_bc(vs, 0.0, 1.0), warm_[3], opt);

        DeviceOracle oracle = [&](const ContactBC& bc) {
            const double a = bc[R2].value, b = bc[R3].value;
            std::array<double, n_contacts> out{};
            for (int c = 0; c < n_contacts; ++c)
                out[c] = base.contact_current[c] +
                         (p2.contact_current[c] - base.contact_current[c]) * a +
                         (p3.contact_current[c] - base.contact_current[c]) * b;
            return out;
        };
        CircuitState st = solve_coupled(*cfg_, oracle, DriveMode::read);
        const double a = st.contact_voltage[R2], b = st.contact_voltage[R3];

        V.resize(warm_[1].size());
        for (std::size_t i = 0; i < V.size(); ++i)
            V[i] = warm_[1][i] + (warm_[2][i] - warm_[1][i]) * a +
                   (warm_[3][i] - warm_[1][i]) * b;

        PotentialSolution sol;
        CompensatedSum total;
        for (int c = 0; c < n_contacts; ++c) {
            sol.contact_current[c] = base.contact_current[c] +
                                     (p2.contact_current[c] - base.contact_current[c]) * a +
                                     (p3.contact_current[c] - base.contact_current[c]) * b;
            sol.contact_voltage[c] = base.contact_voltage[c] +
                                     (p2.contact_voltage[c] - base.contact_voltage[c]) * a +
                                     (p3.contact_voltage[c] - base.contact_voltage[c]) * b;
            total.add(sol.contact_current[c]);
            sol.max_current = std::max(sol.max_current, std::fabs(sol.contact_current[c]));
        }
        sol.conservation_error = std::fabs(total.value());
        sol.iterations = base.iterations + p2.iterations + p3.iterations;
        st.contact_current = sol.contact_current;
        circuit = st;
        return sol;
    }

    static PotentialSolution scale_solution(const PotentialSolution& probe, double v) {
        PotentialSolution sol;
        CompensatedSum total;
        for (int c = 0; c < n_contacts; ++c) {
            sol.contact_current[c] = v * probe.contact_current[c];
            sol.contact_voltage[c] = v * probe.contact_voltage[c];
            total.add(sol.contact_current[c]);
            sol.max_current = std::max(sol.max_current, std::fabs(sol.contact_current[c]));
        }
        sol.conservation_error = std::fabs(total.value());
        sol.iterations = probe.iterations;
        return sol;
    }

    const CircuitConfig* cfg_;
    DriveMode mode_;
    std::array<std::vector<double>, 4> warm_{};
};

// Circuit-driven step: the external circuit is re-solved on every
// Gauss-Seidel pass so the terminal voltages track sigma(T) within the step.
inline StepStats coupled_step(const DeviceGrid& g, FieldState& s, const MaterialTable& m,
                              const KineticsParams& kin, CircuitCoupler& coupler, double dt,
                              std::uint64_t step_index = 0, const StepOptions& opt = {},
                              StepScratch* scratch = nullptr) {
    ElectricPass electric = [&](const std::vector<double>& sigma, std::vector<double>& V,
                                std::optional<CircuitState>& circuit) {
        return coupler.pass(g, sigma, V, circuit, opt.potential);
    };
    return detail::coupled_step_impl(g, s, m, kin, dt, step_index, electric, true, opt,
                                     scratch);
}

// Idle step: no electrical drive, heat relaxation and phase update only.
inline StepStats idle_step(const DeviceGrid& g, FieldState& s, const MaterialTable& m,
                           const KineticsParams& kin, double dt, std::uint64_t step_index = 0,
                           const StepOptions& opt = {}, StepScratch* scratch = nullptr) {
    ElectricPass electric;
    return detail::coupled_step_impl(g, s, m, kin, dt, step_index, electric, false, opt,
                                     scratch);
}

} // namespace pcsim

#endif
