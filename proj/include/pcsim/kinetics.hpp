#ifndef PCSIM_KINETICS_HPP
#define PCSIM_KINETICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pcsim/errors.hpp"
#include "pcsim/field_state.hpp"
#include "pcsim/geometry.hpp"
#include "pcsim/materials.hpp"
#include "pcsim/rng.hpp"

namespace pcsim {

struct KineticsParams {
    double melt_time_constant = 1e-10; // s, decay of |CD| while molten
    std::uint64_t rng_seed = 12345;
    double nucleus_cd = 0.5; // |CD| given to a freshly nucleated cell

    void validate() const {
        if (!(melt_time_constant > 0.0))
            throw DomainError("melt_time_constant must be positive");
        if (!(nucleus_cd > 0.0) || !(nucleus_cd <= 1.0))
            throw DomainError("nucleus_cd must lie in (0,1]");
    }
};

// One synchronous rate-equation sweep over the GST cells.
//
// Rules per cell, driven by the current temperature field:
//  - T >= t_melt: the cell is molten, |CD| decays with melt_time_constant.
//  - molten cells stay molten below t_melt (undercooled liquid, no growth)
//    until they quench below t_crys, where the flag clears; with |CD| ~ 0 the
//    cell is then amorphous.
//  - solid cells with t_crys <= T < t_melt grow at v_g(T)/dx weighted by the
//    fraction of crystalline face neighbors, inheriting the orientation mix of
//    the dominant neighbor, and may nucleate with probability
//    nucleation_rate * dx^2 * thickness * dt (counter-seeded, deterministic).
//  - below t_crys the crystal density is frozen.
inline void update_phase(const DeviceGrid& g, FieldState& s, const MaterialTable& m,
                         const KineticsParams& p, double dt, std::uint64_t step_index) {
    if (!(dt > 0.0)) throw DomainError("update_phase: dt must be positive");
    const int nx = g.nx, ny = g.ny;
    const double decay = std::exp(-dt / p.melt_time_constant);
    const double nucl_scale = g.dx * g.dx * g.thickness * dt;

    std::vector<double> n1 = s.cd1, n2 = s.cd2;
    std::vector<std::uint8_t> nm = s.molten;

    const int offs[4] = {-1, +1, -nx, +nx};
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const int i = g.idx(x, y);
            if (g.material[i] != Region::gst) continue;
            const double T = s.T[i];

            if (T >= m.t_melt) {
                nm[i] = 1;
                n1[i] = s.cd1[i] * decay;
                n2[i] = s.cd2[i] * decay;
                continue;
            }
            if (s.molten[i]) {
                if (T < m.t_crys) {
                    nm[i] = 0; // quenched: solid, amorphous at |CD| ~ 0
                } else {
                    // undercooled liquid: keeps decaying, no growth
                    n1[i] = s.cd1[i] * decay;
                    n2[i] = s.cd2[i] * decay;
                }
                continue;
            }
            if (T < m.t_crys) continue; // frozen

            // growth from crystalline face neighbors
            int n_cryst = 0;
            int donor = -1;
            double donor_cd = 0.0;
            const bool has_xm = x > 0, has_xp = x + 1 < nx, has_ym = y > 0, has_yp = y + 1 < ny;
            const bool ok[4] = {has_xm, has_xp, has_ym, has_yp};
            for (int k = 0; k < 4; ++k) {
                if (!ok[k]) continue;
                const int j = i + offs[k];
                if (g.material[j] != Region::gst || s.molten[j]) continue;
                const double cdj = s.cd1[j] + s.cd2[j];
                if (cdj >= 0.5) ++n_cryst;
                if (cdj > donor_cd) {
                    donor_cd = cdj;
                    donor = j;
                }
            }
            if (n_cryst > 0 && donor >= 0 && donor_cd > 0.0) {
                const double rate = growth_velocity(T, m) / g.dx * (0.25 * n_cryst);
                const double d = rate * dt;
                n1[i] += d * (s.cd1[donor] / donor_cd);
                n2[i] += d * (s.cd2[donor] / donor_cd);
            }

            const double prob = nucleation_rate(T, m) * nucl_scale;
            if (prob > 0.0 && n1[i] + n2[i] < p.nucleus_cd) {
                if (uniform01(p.rng_seed, step_index, static_cast<std::uint64_t>(i)) < prob) {
                    const double add = p.nucleus_cd - (n1[i] + n2[i]);
                    if (counter_hash(p.rng_seed, step_index, static_cast<std::uint64_t>(i), 1) & 1u)
                        n2[i] += add;
                    else
                        n1[i] += add;
                }
            }
        }
    }

    // clamp to the invariants
    for (std::size_t i = 0; i < n1.size(); ++i) {
        if (n1[i] < 0.0) n1[i] = 0.0;
        if (n2[i] < 0.0) n2[i] = 0.0;
        const double tot = n1[i] + n2[i];
        if (tot > 1.0) {
            n1[i] /= tot;
            n2[i] /= tot;
        }
    }
    s.cd1.swap(n1);
    s.cd2.swap(n2);
    s.molten.swap(nm);
}

enum class NeckClass { crystalline, amorphous, molten, mixed };

inline const char* neck_class_name(NeckClass c) {
    switch (c) {
        case NeckClass::crystalline: return "crystalline";
        case NeckClass::amorphous: return "amorphous";
        case NeckClass::molten: return "molten";
        default: return "mixed";
    }
}

struct NeckReport {
    NeckClass a = NeckClass::crystalline, b = NeckClass::crystalline;
    double mean_cd_a = 0.0, mean_cd_b = 0.0;
    int molten_a = 0, molten_b = 0;
};

namespace detail {

inline NeckClass classify(double mean_cd, int molten_cells) {
    if (molten_cells > 0) return NeckClass::molten;
    if (mean_cd < 0.3) return NeckClass::amorphous;
    if (mean_cd > 0.7) return NeckClass::crystalline;
    return NeckClass::mixed;
}

} // namespace detail

// Classifies both necks from mean |CD| and molten occupancy over the
// constriction band, the region whose phase opens or blocks the path.
inline NeckReport neck_state(const DeviceGrid& g, const FieldState& s) {
    NeckReport r;
    const std::vector<int>& ca = g.neck_a_core.empty() ? g.neck_a_cells : g.neck_a_core;
    const std::vector<int>& cb = g.neck_b_core.empty() ? g.neck_b_cells : g.neck_b_core;
    double sum_a = 0.0, sum_b = 0.0;
    for (int i : ca) {
        sum_a += s.cd1[i] + s.cd2[i];
        r.molten_a += s.molten[i];
    }
    for (int i : cb) {
        sum_b += s.cd1[i] + s.cd2[i];
        r.molten_b += s.molten[i];
    }
    r.mean_cd_a = ca.empty() ? 0.0 : sum_a / ca.size();
    r.mean_cd_b = cb.empty() ? 0.0 : sum_b / cb.size();
    r.a = detail::classify(r.mean_cd_a, r.molten_a);
    r.b = detail::classify(r.mean_cd_b, r.molten_b);
    return r;
}

} // namespace pcsim

#endif
