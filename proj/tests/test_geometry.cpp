#include <doctest.h>

#include <set>

#include "pcsim/geometry.hpp"

using namespace pcsim;

namespace {

// Independent rasterizer: recomputes the region of each cell from the layout
// rectangles in physical coordinates, without touching build_grid internals.
Region oracle_region(const GeometrySpec& s, double dx, int x, int y) {
    auto cells = [&](double len) { return static_cast<int>(std::lround(len / dx)); };
    const int w = cells(s.neck_width), l = cells(s.neck_length), sep = cells(s.neck_separation);
    const int ww = cells(s.waist_width), wl = cells(s.waist_length);
    const int he = cells(s.electrode_thickness), ov = cells(s.island_overhang);
    const int ms = cells(s.side_margin), ma = cells(s.anchor_margin);
    const int nx = 2 * (ms + ov) + w + sep;
    const int bar_y0 = ma, bar_y1 = ma + he;
    const int neck_y0 = bar_y1, neck_y1 = bar_y1 + l;
    const int isl_y0 = neck_y1, isl_y1 = neck_y1 + he;
    const int xa0 = ms + ov, xa1 = xa0 + w;
    const int xb0 = xa0 + sep, xb1 = xb0 + w;
    const int notch = (w - ww) / 2;
    const int wy0 = neck_y0 + (l - wl) / 2, wy1 = wy0 + wl;

    auto in = [&](int x0, int x1, int y0, int y1) {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    };
    if (in(ms, nx - ms, bar_y0, bar_y1)) return Region::electrode;
    auto neck = [&](int nx0, int nx1) {
        if (!in(nx0, nx1, neck_y0, neck_y1)) return false;
        if (y >= wy0 && y < wy1 && (x < nx0 + notch || x >= nx1 - notch)) return false;
        return true;
    };
    if (neck(xa0, xa1) || neck(xb0, xb1)) return Region::gst;
    if (in(xa0, xa1, neck_y0, neck_y1) || in(xb0, xb1, neck_y0, neck_y1))
        return Region::insulator; // waist notches
    if (in(ms, xa1 + ov, isl_y0, isl_y1)) return Region::electrode;
    if (in(xb0 - ov, nx - ms, isl_y0, isl_y1)) return Region::electrode;
    return Region::insulator;
}

} // namespace

TEST_CASE("default grid: six contacts, two necks, expected tags") {
    const GeometrySpec spec;
    const DeviceGrid g = build_grid(spec, 1e-9, 20e-9, 300.0);
    CHECK(g.thickness == 20e-9);

    const RegionReport r = region_report(g);
    CHECK(r.insulator_cells + r.gst_cells + r.electrode_cells ==
          static_cast<long>(g.nx) * g.ny);
    for (int c = 0; c < n_contacts; ++c) CHECK(r.contact_cell_counts[c] > 0);
    // two 10x20 nm necks minus the 2-cell waist notches on both sides
    CHECK(r.gst_cells == 2 * (10 * 20 - 2 * 2 * 6));
    CHECK(!g.neck_a_core.empty());
    CHECK(g.neck_a_core.size() == g.neck_b_core.size());
    CHECK(!g.thermal_anchor_cells.empty());

    // neck boxes disjoint and mirror-symmetric about the midline
    CHECK(g.neck_a_box.disjoint(g.neck_b_box));
    CHECK(g.nx - g.neck_b_box.x1 == g.neck_a_box.x0);
    CHECK(g.nx - g.neck_b_box.x0 == g.neck_a_box.x1);
}

TEST_CASE("grid matches the independent rasterizer at dx = 1 nm and 2 nm") {
    const GeometrySpec spec;
    for (double dx : {1e-9, 2e-9}) {
        const DeviceGrid g = build_grid(spec, dx, 20e-9, 300.0);
        for (int y = 0; y < g.ny; ++y)
            for (int x = 0; x < g.nx; ++x)
                REQUIRE(g.material[g.idx(x, y)] == oracle_region(spec, dx, x, y));
    }
    // halving resolution halves the cell counts per axis
    const DeviceGrid g1 = build_grid(spec, 1e-9, 20e-9, 300.0);
    const DeviceGrid g2 = build_grid(spec, 2e-9, 20e-9, 300.0);
    CHECK(g2.nx * 2 == g1.nx);
    CHECK(g2.ny * 2 == g1.ny);
    CHECK(!g2.neck_a_core.empty());
    CHECK(g2.neck_a_box.x1 - g2.neck_a_box.x0 == (g1.neck_a_box.x1 - g1.neck_a_box.x0) / 2);
}

TEST_CASE("contact adjacency: every contact touches electrode, electrodes abut GST") {
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    for (int c = 0; c < n_contacts; ++c)
        for (int cell : g.contact_cells[c]) CHECK(g.material[cell] == Region::electrode);

    // each neck must touch electrode cells on both ends
    auto touches_electrode = [&](const BoundingBox& b) {
        int count = 0;
        for (int x = b.x0; x < b.x1; ++x) {
            if (b.y0 > 0 && g.material[g.idx(x, b.y0 - 1)] == Region::electrode) ++count;
            if (b.y1 < g.ny && g.material[g.idx(x, b.y1)] == Region::electrode) ++count;
        }
        return count;
    };
    CHECK(touches_electrode(g.neck_a_box) == 2 * (g.neck_a_box.x1 - g.neck_a_box.x0));
    CHECK(touches_electrode(g.neck_b_box) == 2 * (g.neck_b_box.x1 - g.neck_b_box.x0));
}

TEST_CASE("mirror symmetry without asymmetry, W2<->W3 and R2<->R3 map onto each other") {
    GeometrySpec spec;
    spec.asymmetry_factor = 0.0;
    const DeviceGrid g = build_grid(spec, 1e-9, 20e-9, 300.0);
    auto mirror = [&](int cell) {
        const int x = cell % g.nx, y = cell / g.nx;
        return g.idx(g.nx - 1 - x, y);
    };
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            const int i = g.idx(x, y);
            CHECK(g.material[i] == g.material[mirror(i)]);
            CHECK(g.sigma_scale[i] == g.sigma_scale[mirror(i)]);
        }
    auto mirrored_set = [&](const std::vector<int>& cells) {
        std::set<int> out;
        for (int c : cells) out.insert(mirror(c));
        return out;
    };
    auto as_set = [](const std::vector<int>& cells) {
        return std::set<int>(cells.begin(), cells.end());
    };
    CHECK(mirrored_set(g.contact_cells[W2]) == as_set(g.contact_cells[W3]));
    CHECK(mirrored_set(g.contact_cells[R2]) == as_set(g.contact_cells[R3]));
    CHECK(mirrored_set(g.contact_cells[W1]) == as_set(g.contact_cells[W1]));
    CHECK(mirrored_set(g.contact_cells[R1]) == as_set(g.contact_cells[R1]));
}

TEST_CASE("asymmetry factor scales neck A conductivity only") {
    GeometrySpec spec;
    spec.asymmetry_factor = 0.03;
    const DeviceGrid g = build_grid(spec, 1e-9, 20e-9, 300.0);
    for (int cell : g.neck_a_cells) CHECK(g.sigma_scale[cell] == doctest::Approx(1.03));
    for (int cell : g.neck_b_cells) CHECK(g.sigma_scale[cell] == 1.0);
}

TEST_CASE("geometry errors") {
    GeometrySpec spec;
    spec.neck_separation = spec.neck_width; // necks would merge
    CHECK_THROWS_AS(build_grid(spec, 1e-9, 20e-9, 300.0), GeometryError);

    GeometrySpec tiny;
    CHECK_THROWS_AS(build_grid(tiny, 25e-9, 20e-9, 300.0), GeometryError); // unresolvable

    GeometrySpec asym;
    asym.asymmetry_factor = 0.2;
    CHECK_THROWS_AS(build_grid(asym, 1e-9, 20e-9, 300.0), GeometryError);
}

TEST_CASE("region report text and kv forms carry the same counts") {
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    const RegionReport r = region_report(g);
    const std::string kv = r.to_kv();
    CHECK(kv.find("gst_cells=" + std::to_string(r.gst_cells)) != std::string::npos);
    CHECK(kv.find("contact_W1_cells=") != std::string::npos);
    CHECK(r.to_text().find("neck A") != std::string::npos);
}
