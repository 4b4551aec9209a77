#ifndef PCSIM_VERIFY_HPP
#define PCSIM_VERIFY_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pcsim/coupled.hpp"
#include "pcsim/heat.hpp"
#include "pcsim/potential.hpp"

namespace pcsim {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verifydetail {

inline DeviceGrid slab_grid(int nx, int ny, double dx, double thickness) {
    DeviceGrid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = dx;
    g.thickness = thickness;
    g.t_ambient = 300.0;
    g.material.assign(static_cast<std::size_t>(nx) * ny, Region::gst);
    g.sigma_scale.assign(g.material.size(), 1.0);
    for (int y = 0; y < ny; ++y) {
        g.material[g.idx(0, y)] = Region::electrode;
        g.material[g.idx(nx - 1, y)] = Region::electrode;
        g.contact_cells[W1].push_back(g.idx(0, y));
        g.contact_cells[W2].push_back(g.idx(nx - 1, y));
    }
    for (int x = 0; x < nx; ++x) {
        g.thermal_anchor_cells.push_back(g.idx(x, 0));
        if (ny > 1) g.thermal_anchor_cells.push_back(g.idx(x, ny - 1));
    }
    g.finalize_lookups();
    return g;
}

} // namespace verifydetail

// Analytic solver verification: slab resistance against rho L / (W t), mesh
// refinement on an exponentially graded slab, the 1D heated-strip parabola,
// per-step energy bookkeeping and terminal-current conservation.
inline std::vector<VerifyCheck> run_solver_oracles(const MaterialTable& m, double thickness) {
    std::vector<VerifyCheck> checks;
    using verifydetail::slab_grid;

    { // uniform slab resistance and charge conservation
        const int nx = 102, ny = 40;
        const double dx = 1e-9;
        const DeviceGrid g = slab_grid(nx, ny, dx, thickness);
        FieldState s = FieldState::initial(g);
        ContactBC bc = all_floating();
        bc[W1] = ContactCondition::fixed_voltage(1.0);
        bc[W2] = ContactCondition::fixed_voltage(0.0);
        const auto sol = solve_potential(g, sigma_field(g, s, m), bc, s.V);
        const double expected =
            m.crystalline.sigma_ref * (ny * dx) * thickness / ((nx - 2) * dx);
        const double err = std::fabs(sol.contact_current[W1] - expected) / expected;
        std::ostringstream os;
        os << "relative error " << err;
        checks.push_back({"slab resistance within 1% of rho*L/(W*t)", err < 0.01, os.str()});

        const double cons = sol.conservation_error / sol.max_current;
        std::ostringstream oc;
        oc << "sum(I)/max(I) = " << cons;
        checks.push_back(
            {"charge conservation <= 1e-9 x max terminal current", cons <= 1e-9, oc.str()});
    }

    { // graded slab: discretization error must drop at least 2x at dx/2
        const double length = 100e-9, width = 20e-9;
        const double beta = std::log(m.crystalline.sigma_ref / m.amorphous.sigma_ref);
        auto graded_error = [&](double dx) {
            const int n = static_cast<int>(std::lround(length / dx));
            const int ny = static_cast<int>(std::lround(width / dx));
            const DeviceGrid g = slab_grid(n + 2, ny, dx, thickness);
            FieldState s = FieldState::initial(g);
            for (int y = 0; y < g.ny; ++y)
                for (int x = 1; x <= n; ++x) {
                    s.cd1[g.idx(x, y)] = (x - 0.5) / n;
                    s.cd2[g.idx(x, y)] = 0.0;
                }
            ContactBC bc = all_floating();
            bc[W1] = ContactCondition::fixed_voltage(1.0);
            bc[W2] = ContactCondition::fixed_voltage(0.0);
            const auto sol = solve_potential(g, sigma_field(g, s, m), bc, s.V);
            const double r_analytic = length * (1.0 - std::exp(-beta)) /
                                      (m.amorphous.sigma_ref * beta * width * thickness);
            return std::fabs(1.0 / sol.contact_current[W1] - r_analytic) / r_analytic;
        };
        const double e1 = graded_error(1e-9);
        const double e2 = graded_error(0.5e-9);
        std::ostringstream os;
        os << "error " << e1 << " at dx, " << e2 << " at dx/2";
        checks.push_back({"graded slab within 1%, error reduced >= 2x at dx/2",
                          e1 < 0.01 && e2 <= 0.5 * e1, os.str()});
    }

    { // steady 1D heated strip against the parabolic profile
        const int nx = 201;
        DeviceGrid g;
        g.nx = nx;
        g.ny = 1;
        g.dx = 1e-9;
        g.thickness = thickness;
        g.t_ambient = 300.0;
        g.material.assign(nx, Region::insulator);
        g.sigma_scale.assign(nx, 1.0);
        g.thermal_anchor_cells.push_back(0);
        g.thermal_anchor_cells.push_back(nx - 1);
        g.finalize_lookups();
        FieldState s = FieldState::initial(g);
        std::vector<double> q(nx, 1e14);
        q[0] = q[nx - 1] = 0.0;
        for (int k = 0; k < 4; ++k) step_heat(g, s, m, q, 1.0);
        const double L = (nx - 1) * g.dx;
        double worst = 0.0;
        for (int i = 1; i < nx - 1; ++i) {
            const double x = i * g.dx;
            const double expected = 300.0 + 1e14 * x * (L - x) / (2.0 * m.insulator_kappa);
            worst = std::max(worst, std::fabs(s.T[i] - expected) / (expected - 300.0));
        }
        std::ostringstream os;
        os << "worst relative profile error " << worst;
        checks.push_back({"1D heated strip parabola within 2%", worst < 0.02, os.str()});
    }

    { // per-step energy bookkeeping on the reference device under write bias
        const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, thickness, 300.0);
        FieldState s = FieldState::initial(g);
        const KineticsParams kin;
        ContactBC bc = all_floating();
        bc[W1] = ContactCondition::fixed_voltage(0.5);
        bc[W2] = ContactCondition::fixed_voltage(0.0);
        bc[W3] = ContactCondition::fixed_voltage(0.0);
        double worst_energy = 0.0, worst_cons = 0.0;
        StepScratch scratch;
        for (int k = 0; k < 50; ++k) {
            const StepStats st = coupled_step(g, s, m, kin, bc, 1e-11, k, {}, &scratch);
            worst_energy = std::max(worst_energy, st.energy_residual_rel);
            worst_cons = std::max(worst_cons, st.conservation_rel);
        }
        std::ostringstream os;
        os << "worst per-step residual " << worst_energy << " of joule input";
        checks.push_back({"per-step energy balance drift < 1%", worst_energy < 0.01, os.str()});
        std::ostringstream oc;
        oc << "worst sum(I)/max(I) = " << worst_cons;
        checks.push_back({"device-run charge conservation <= 1e-9", worst_cons <= 1e-9,
                          oc.str()});
    }

    return checks;
}

} // namespace pcsim

#endif
