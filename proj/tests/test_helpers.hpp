#ifndef PCSIM_TEST_HELPERS_HPP
#define PCSIM_TEST_HELPERS_HPP

#include "pcsim/field_state.hpp"
#include "pcsim/geometry.hpp"

namespace pcsim::testing {

// Rectangular slab: electrode columns at both x ends (contacts W1 left, W2
// right), GST in between, anchor rows top and bottom. Used by the analytic
// resistance and heat oracles.
inline DeviceGrid make_slab_grid(int nx, int ny, double dx = 1e-9, double thickness = 20e-9,
                                 double t_ambient = 300.0) {
    DeviceGrid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = dx;
    g.thickness = thickness;
    g.t_ambient = t_ambient;
    g.material.assign(static_cast<std::size_t>(nx) * ny, Region::gst);
    g.sigma_scale.assign(g.material.size(), 1.0);
    for (int y = 0; y < ny; ++y) {
        g.material[g.idx(0, y)] = Region::electrode;
        g.material[g.idx(nx - 1, y)] = Region::electrode;
        g.contact_cells[W1].push_back(g.idx(0, y));
        g.contact_cells[W2].push_back(g.idx(nx - 1, y));
    }
    // W3 and the read contacts stay absent; the solver treats them as floating
    for (int x = 0; x < nx; ++x) {
        g.thermal_anchor_cells.push_back(g.idx(x, 0));
        if (ny > 1) g.thermal_anchor_cells.push_back(g.idx(x, ny - 1));
    }
    g.neck_a_box = {1, 0, nx - 1, ny};
    g.neck_b_box = {1, 0, nx - 1, ny};
    g.finalize_lookups();
    return g;
}

// All-insulator strip with anchored ends, for the 1D heated-strip oracle.
inline DeviceGrid make_insulator_strip(int nx, double dx = 1e-9, double thickness = 20e-9,
                                       double t_ambient = 300.0) {
    DeviceGrid g;
    g.nx = nx;
    g.ny = 1;
    g.dx = dx;
    g.thickness = thickness;
    g.t_ambient = t_ambient;
    g.material.assign(static_cast<std::size_t>(nx), Region::insulator);
    g.sigma_scale.assign(g.material.size(), 1.0);
    g.thermal_anchor_cells.push_back(g.idx(0, 0));
    g.thermal_anchor_cells.push_back(g.idx(nx - 1, 0));
    g.finalize_lookups();
    return g;
}

} // namespace pcsim::testing

#endif
