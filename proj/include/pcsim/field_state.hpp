#ifndef PCSIM_FIELD_STATE_HPP
#define PCSIM_FIELD_STATE_HPP

#include <cstdint>
#include <vector>

#include "pcsim/errors.hpp"
#include "pcsim/geometry.hpp"

namespace pcsim {

// Per-cell state of one simulation instant: temperature, potential, the
// two-component crystal density and the molten flag.
//
// The molten flag marks liquid material. It is set when a cell crosses t_melt
// and survives as an undercooled liquid until the cell drops below t_crys,
// where it clears; a cleared cell with |CD| ~ 0 is amorphous.
struct FieldState {
    int nx = 0, ny = 0;
    double time = 0.0; // simulation clock (s)
    std::vector<double> T, V, cd1, cd2;
    std::vector<std::uint8_t> molten;

    static FieldState initial(const DeviceGrid& g) {
        FieldState s;
        s.nx = g.nx;
        s.ny = g.ny;
        const std::size_t n = g.material.size();
        s.T.assign(n, g.t_ambient);
        s.V.assign(n, 0.0);
        s.cd1.assign(n, 0.0);
        s.cd2.assign(n, 0.0);
        s.molten.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (g.material[i] == Region::gst) s.cd1[i] = 1.0;
        return s;
    }

    double cd_norm(std::size_t i) const { return cd1[i] + cd2[i]; }

    // Throws on any crystal-density bound violation or non-finite field value.
    void validate(const DeviceGrid& g) const {
        for (std::size_t i = 0; i < cd1.size(); ++i) {
            if (!g.is_gst(static_cast<int>(i))) continue;
            const double a = cd1[i], b = cd2[i];
            if (!(a >= 0.0) || !(b >= 0.0) || !(a + b <= 1.0 + 1e-12))
                throw DomainError("crystal density bounds violated");
            if (!std::isfinite(T[i]) || !std::isfinite(V[i]))
                throw DomainError("non-finite field value");
        }
    }
};

} // namespace pcsim

#endif
