#ifndef PCSIM_HEAT_HPP
#define PCSIM_HEAT_HPP

#include <cmath>
#include <vector>

#include "pcsim/errors.hpp"
#include "pcsim/field_state.hpp"
#include "pcsim/geometry.hpp"
#include "pcsim/linear_solver.hpp"
#include "pcsim/materials.hpp"

namespace pcsim {

struct HeatStepResult {
    double heat_content_change = 0.0; // J, sum c_eff dT vol over the domain
    double anchor_outflow = 0.0;      // W, heat leaving through the anchors
    double joule_power = 0.0;         // W, injected source
    int iterations = 0;
    double rel_residual = 0.0;

    // |dE - (P_in - P_out) dt| relative to the Joule input of the step.
    double energy_residual_rel(double dt) const {
        const double in = joule_power * dt;
        if (in <= 0.0) return 0.0;
        return std::fabs(heat_content_change - in + anchor_outflow * dt) / in;
    }
};

struct HeatOptions {
    double tol_rel = 1e-8;
    int iteration_cap_scale = 50;
};

// Per-cell thermal conductivity over the whole stack.
inline std::vector<double> kappa_field(const DeviceGrid& g, const FieldState& s,
                                       const MaterialTable& m) {
    std::vector<double> k(g.material.size(), m.insulator_kappa);
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (g.material[i] == Region::electrode) {
            k[i] = m.electrode_kappa;
        } else if (g.material[i] == Region::gst) {
            double cd = s.cd1[i] + s.cd2[i];
            if (cd > 1.0) cd = 1.0;
            const bool molten = s.molten[i] != 0 || s.T[i] >= m.t_melt;
            k[i] = thermal_conductivity(cd, molten, m);
        }
    }
    return k;
}

// One backward-Euler step of c_eff dT/dt = div(kappa grad T) + q with
// Dirichlet anchors at ambient and adiabatic outer walls elsewhere. s.T is
// the previous-step field; warm, when given, seeds the iterative solve.
inline HeatStepResult step_heat(const DeviceGrid& g, FieldState& s, const MaterialTable& m,
                                const std::vector<double>& q, double dt,
                                const HeatOptions& opt = {},
                                const std::vector<double>* warm = nullptr) {
    if (!(dt > 0.0)) throw DomainError("step_heat: dt must be positive");
    const int ncell = g.cell_count();
    const double vol = g.cell_volume();

    std::vector<double> kap = kappa_field(g, s, m);
    std::vector<double> ceff(ncell);
    for (int i = 0; i < ncell; ++i) {
        double cd = 0.0;
        bool molten = false;
        if (g.material[i] == Region::gst) {
            cd = std::min(1.0, s.cd1[i] + s.cd2[i]);
            molten = s.molten[i] != 0;
            ceff[i] = effective_heat_capacity(s.T[i], cd, molten, m);
        } else {
            ceff[i] = m.crystalline.c_vol; // common substrate heat capacity
        }
    }

    std::vector<int> uid(ncell, -1);
    int nu = 0;
    for (int i = 0; i < ncell; ++i)
        if (!g.anchor_lookup[i]) uid[i] = nu++;

    SpdSystem A;
    A.resize(nu);
    std::vector<double> b(nu, 0.0);
    for (int i = 0; i < ncell; ++i) {
        if (uid[i] < 0) continue;
        const double mass = ceff[i] * vol / dt;
        A.diag[uid[i]] += mass;
        b[uid[i]] += mass * s.T[i] + (q.empty() ? 0.0 : q[i]) * vol;
    }

    struct AnchorFace {
        int cell;
        double g;
    };
    std::vector<AnchorFace> anchor_faces;
    auto add_face = [&](int ia, int ib) {
        const double gcond = detail::harmonic_mean(kap[ia], kap[ib]) * g.thickness;
        const int ua = uid[ia], ub = uid[ib];
        if (ua >= 0 && ub >= 0) {
            A.faces.push_back({ua, ub, gcond});
        } else if (ua >= 0) {
            A.diag[ua] += gcond;
            b[ua] += gcond * g.t_ambient;
            anchor_faces.push_back({ia, gcond});
        } else if (ub >= 0) {
            A.diag[ub] += gcond;
            b[ub] += gcond * g.t_ambient;
            anchor_faces.push_back({ib, gcond});
        }
    };
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            const int i = g.idx(x, y);
            if (x + 1 < g.nx) add_face(i, g.idx(x + 1, y));
            if (y + 1 < g.ny) add_face(i, g.idx(x, y + 1));
        }

    std::vector<double> x(nu);
    const std::vector<double>& seed = warm ? *warm : s.T;
    for (int i = 0; i < ncell; ++i)
        if (uid[i] >= 0) x[uid[i]] = seed[i];
    const int cap =
        opt.iteration_cap_scale * static_cast<int>(std::sqrt(static_cast<double>(ncell))) + 16;
    const CgResult cg = solve_spd(A, b, x, opt.tol_rel, cap, "heat");

    HeatStepResult res;
    res.iterations = cg.iterations;
    res.rel_residual = cg.rel_residual;

    CompensatedSum de, pin;
    for (int i = 0; i < ncell; ++i) {
        const double t_new = uid[i] >= 0 ? x[uid[i]] : g.t_ambient;
        if (uid[i] >= 0) {
            de.add(ceff[i] * vol * (t_new - s.T[i]));
            if (!q.empty()) pin.add(q[i] * vol);
        }
        s.T[i] = t_new;
    }
    CompensatedSum outflow;
    for (const AnchorFace& f : anchor_faces) outflow.add(f.g * (s.T[f.cell] - g.t_ambient));
    res.heat_content_change = de.value();
    res.joule_power = pin.value();
    res.anchor_outflow = outflow.value();
    return res;
}

} // namespace pcsim

#endif
