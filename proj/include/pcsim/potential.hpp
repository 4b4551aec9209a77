#ifndef PCSIM_POTENTIAL_HPP
#define PCSIM_POTENTIAL_HPP

#include <array>
#include <cmath>
#include <vector>

#include "pcsim/errors.hpp"
#include "pcsim/field_state.hpp"
#include "pcsim/geometry.hpp"
#include "pcsim/linear_solver.hpp"
#include "pcsim/materials.hpp"

namespace pcsim {

// Electrical boundary condition of one contact.
struct ContactCondition {
    enum class Kind { floating, voltage, current } kind = Kind::floating;
    double value = 0.0;

    static ContactCondition floating() { return {}; }
    static ContactCondition fixed_voltage(double v) { return {Kind::voltage, v}; }
    static ContactCondition fixed_current(double i) { return {Kind::current, i}; }
};

using ContactBC = std::array<ContactCondition, n_contacts>;

inline ContactBC all_floating() { return ContactBC{}; }

inline bool has_voltage_contact(const ContactBC& bc) {
    for (const auto& c : bc)
        if (c.kind == ContactCondition::Kind::voltage) return true;
    return false;
}

struct PotentialSolution {
    std::array<double, n_contacts> contact_current{}; // positive into the device (A)
    std::array<double, n_contacts> contact_voltage{};
    double conservation_error = 0.0; // |sum I| (A)
    double max_current = 0.0;
    int iterations = 0;
    double rel_residual = 0.0;
};

// Per-cell electrical conductivity including region tags and the geometric
// asymmetry perturbation. Insulator cells carry exactly zero. A cell counts
// as molten when flagged or when its temperature sits at or above t_melt, so
// the within-step iteration sees the conductivity jump of a fresh melt.
inline std::vector<double> sigma_field(const DeviceGrid& g, const FieldState& s,
                                       const MaterialTable& m) {
    std::vector<double> sig(g.material.size(), 0.0);
    for (std::size_t i = 0; i < sig.size(); ++i) {
        switch (g.material[i]) {
            case Region::insulator: break;
            case Region::electrode: sig[i] = m.electrode_sigma; break;
            case Region::gst: {
                double cd = s.cd1[i] + s.cd2[i];
                if (cd > 1.0) cd = 1.0;
                const bool molten = s.molten[i] != 0 || s.T[i] >= m.t_melt;
                sig[i] = conductivity(cd, s.T[i], molten, m) * g.sigma_scale[i];
                break;
            }
        }
    }
    return sig;
}

struct PotentialOptions {
    double tol_rel = 1e-12;
    int iteration_cap_scale = 50; // cap = scale * sqrt(nx*ny)
};

// Solves div(sigma grad V) = 0 with the given contact conditions. Voltage
// contacts are Dirichlet super-nodes, current and floating contacts are merged
// unknowns with a prescribed net injection (zero when floating). Contact
// currents are face-flux sums, positive into the device.
inline PotentialSolution solve_potential(const DeviceGrid& g, const std::vector<double>& sigma,
                                         const ContactBC& bc, std::vector<double>& V,
                                         const PotentialOptions& opt = {}) {
    if (!has_voltage_contact(bc))
        throw ConfigError("potential solve requires at least one voltage-driven contact");

    const int ncell = g.cell_count();
    // unknown ids: >=0 unknown index; -1 outside the conducting domain;
    // -2-k fixed at contact k's voltage
    std::vector<int> uid(ncell, -1);
    std::array<int, n_contacts> super{};
    int nu = 0;
    for (int c = 0; c < n_contacts; ++c) {
        if (g.contact_cells[c].empty())
            super[c] = -1; // absent contact, no unknown
        else if (bc[c].kind == ContactCondition::Kind::voltage)
            super[c] = -2 - c;
        else
            super[c] = nu++;
    }
    for (int i = 0; i < ncell; ++i) {
        if (sigma[i] <= 0.0) continue;
        const int c = g.contact_of(i);
        uid[i] = (c >= 0) ? super[c] : nu++;
    }

    SpdSystem A;
    A.resize(nu);
    std::vector<double> b(nu, 0.0);
    for (int c = 0; c < n_contacts; ++c)
        if (bc[c].kind == ContactCondition::Kind::current && !g.contact_cells[c].empty())
            b[super[c]] += bc[c].value;

    struct FluxFace {
        int cell_a, cell_b;
        double g;
    };
    std::vector<FluxFace> contact_faces; // faces with at least one contact cell

    auto add_face = [&](int ia, int ib) {
        const double gcond = detail::harmonic_mean(sigma[ia], sigma[ib]) * g.thickness;
        if (gcond <= 0.0) return;
        const int ua = uid[ia], ub = uid[ib];
        if (ua == ub) return; // same super-node or both outside
        const bool da = ua <= -2, db = ub <= -2;
        if (!da && !db) {
            A.faces.push_back({ua, ub, gcond});
        } else if (da && !db) {
            A.diag[ub] += gcond;
            b[ub] += gcond * bc[-2 - ua].value;
        } else if (!da && db) {
            A.diag[ua] += gcond;
            b[ua] += gcond * bc[-2 - ub].value;
        }
        if (g.contact_of(ia) >= 0 || g.contact_of(ib) >= 0)
            contact_faces.push_back({ia, ib, gcond});
    };
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            const int i = g.idx(x, y);
            if (uid[i] == -1) continue;
            if (x + 1 < g.nx && uid[g.idx(x + 1, y)] != -1) add_face(i, g.idx(x + 1, y));
            if (y + 1 < g.ny && uid[g.idx(x, y + 1)] != -1) add_face(i, g.idx(x, y + 1));
        }

    // warm start from the previous potential
    std::vector<double> x(nu, 0.0);
    if (static_cast<int>(V.size()) == ncell) {
        for (int i = 0; i < ncell; ++i)
            if (uid[i] >= 0) x[uid[i]] = V[i];
    }
    const int cap =
        opt.iteration_cap_scale * static_cast<int>(std::sqrt(static_cast<double>(ncell))) + 16;
    PotentialSolution sol;
    const CgResult cg = solve_spd(A, b, x, opt.tol_rel, cap, "potential");
    sol.iterations = cg.iterations;
    sol.rel_residual = cg.rel_residual;

    V.assign(ncell, 0.0);
    auto value_at = [&](int cell) {
        const int u = uid[cell];
        if (u >= 0) return x[u];
        if (u <= -2) return bc[-2 - u].value;
        return 0.0;
    };
    for (int i = 0; i < ncell; ++i)
        if (uid[i] != -1) V[i] = value_at(i);

    std::array<CompensatedSum, n_contacts> isum;
    for (const FluxFace& f : contact_faces) {
        const int ca = g.contact_of(f.cell_a), cb = g.contact_of(f.cell_b);
        if (ca == cb) continue;
        const double flux = f.g * (V[f.cell_a] - V[f.cell_b]);
        if (ca >= 0) isum[ca].add(flux);
        if (cb >= 0) isum[cb].add(-flux);
    }
    CompensatedSum total;
    for (int c = 0; c < n_contacts; ++c) {
        sol.contact_current[c] = isum[c].value();
        // prescribed-current contacts carry exactly the injected current
        if (bc[c].kind == ContactCondition::Kind::current) sol.contact_current[c] = bc[c].value;
        sol.contact_voltage[c] =
            g.contact_cells[c].empty() ? 0.0 : value_at(g.contact_cells[c].front());
        total.add(sol.contact_current[c]);
        sol.max_current = std::max(sol.max_current, std::fabs(sol.contact_current[c]));
    }
    sol.conservation_error = std::fabs(total.value());
    return sol;
}

struct JouleField {
    std::vector<double> q; // per-cell power density (W/m^3)
    double total = 0.0;    // device power (W)
};

// q = sigma |grad V|^2 evaluated as half the face dissipation on each side, so
// that the cell sum reproduces the terminal power identity exactly.
inline JouleField joule_source(const DeviceGrid& g, const std::vector<double>& sigma,
                               const std::vector<double>& V) {
    JouleField out;
    out.q.assign(g.material.size(), 0.0);
    const double vol = g.cell_volume();
    CompensatedSum total;
    auto face = [&](int ia, int ib) {
        const double gcond = detail::harmonic_mean(sigma[ia], sigma[ib]) * g.thickness;
        if (gcond <= 0.0) return;
        const double dv = V[ia] - V[ib];
        const double p = gcond * dv * dv;
        out.q[ia] += 0.5 * p / vol;
        out.q[ib] += 0.5 * p / vol;
        total.add(p);
    };
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            const int i = g.idx(x, y);
            if (sigma[i] <= 0.0) continue;
            if (x + 1 < g.nx && sigma[g.idx(x + 1, y)] > 0.0) face(i, g.idx(x + 1, y));
            if (y + 1 < g.ny && sigma[g.idx(x, y + 1)] > 0.0) face(i, g.idx(x, y + 1));
        }
    out.total = total.value();
    return out;
}

} // namespace pcsim

#endif
