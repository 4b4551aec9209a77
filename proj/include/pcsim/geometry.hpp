#ifndef PCSIM_GEOMETRY_HPP
#define PCSIM_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pcsim/errors.hpp"

namespace pcsim {

enum class Region : std::uint8_t { insulator = 0, gst = 1, electrode = 2 };

// Contact ids. W1/R1 sit on the shared bottom electrode bar, W2/R2 on the
// island above neck A, W3/R3 on the island above neck B.
enum Contact : int { W1 = 0, W2 = 1, W3 = 2, R1 = 3, R2 = 4, R3 = 5 };
inline constexpr int n_contacts = 6;

inline const char* contact_name(int c) {
    static const char* names[n_contacts] = {"W1", "W2", "W3", "R1", "R2", "R3"};
    return names[c];
}

// Layout parameters for the six-contact two-neck device. All lengths in meters.
// Each neck carries a central constriction (waist) that localizes melting and
// makes the first melt steal current from the other branch at once.
struct GeometrySpec {
    double neck_width = 10e-9;         // x extent of each phase-change neck
    double neck_length = 20e-9;        // y extent of each neck
    double neck_separation = 30e-9;    // center-to-center distance between necks
    double waist_width = 5e-9;         // neck width inside the constriction
    double waist_length = 6e-9;        // y extent of the constriction
    double electrode_thickness = 6e-9; // bar and island height
    double island_overhang = 4e-9;     // island extension past the neck sides
    double side_margin = 10e-9;        // insulator left/right of the outer islands
    double anchor_margin = 6e-9;       // insulator between electrodes and anchor rows
    double asymmetry_factor = 0.05;    // conductivity perturbation on neck A
};

struct BoundingBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // half-open [x0,x1) x [y0,y1)
    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    bool disjoint(const BoundingBox& o) const {
        return x1 <= o.x0 || o.x1 <= x0 || y1 <= o.y0 || o.y1 <= y0;
    }
};

// Structured finite-volume grid with region masks, contact footprints and
// thermal anchors. Immutable after construction; shared by all solvers.
struct DeviceGrid {
    int nx = 0, ny = 0;
    double dx = 1e-9;        // square cell edge (m)
    double thickness = 20e-9; // out-of-plane scale factor (m)
    double t_ambient = 300.0;

    std::vector<Region> material;     // per-cell region tag, size nx*ny
    std::vector<double> sigma_scale;  // per-cell conductivity multiplier (asymmetry)
    std::array<std::vector<int>, n_contacts> contact_cells;
    std::vector<int> thermal_anchor_cells;
    std::vector<int> neck_a_cells, neck_b_cells; // all GST cells of each neck
    std::vector<int> neck_a_core, neck_b_core;   // constriction band, the switching region
    BoundingBox neck_a_box, neck_b_box;

    int idx(int x, int y) const { return y * nx + x; }
    int cell_count() const { return nx * ny; }
    double cell_volume() const { return dx * dx * thickness; }
    bool is_gst(int cell) const { return material[cell] == Region::gst; }

    int contact_of(int cell) const { return contact_lookup[cell]; }

    // filled by build helpers
    std::vector<int> contact_lookup; // -1 or contact id per cell
    std::vector<std::uint8_t> anchor_lookup;

    void finalize_lookups() {
        contact_lookup.assign(material.size(), -1);
        for (int c = 0; c < n_contacts; ++c)
            for (int cell : contact_cells[c]) contact_lookup[cell] = c;
        anchor_lookup.assign(material.size(), 0);
        for (int cell : thermal_anchor_cells) anchor_lookup[cell] = 1;
    }
};

namespace detail {

inline int cells_of(double length, double dx, const char* feature) {
    const int n = static_cast<int>(std::lround(length / dx));
    if (n < 1)
        throw GeometryError(std::string("feature '") + feature +
                            "' is unresolvable at the given dx");
    if (std::fabs(n * dx - length) > 0.5 * dx + 1e-15 * length)
        throw GeometryError(std::string("feature '") + feature +
                            "' is not resolvable to within half a cell at the given dx");
    return n;
}

} // namespace detail

// Rasterizes the H-topology device: W1 feeds both necks from the shared bar;
// W2 / W3 terminate neck A / neck B on the islands; the read path R1->R2 runs
// through neck A and R1->R3 through neck B. All GST starts fully crystalline.
inline DeviceGrid build_grid(const GeometrySpec& spec, double dx, double thickness,
                             double t_ambient) {
    if (!(dx > 0.0) || !(thickness > 0.0) || !(t_ambient > 0.0))
        throw GeometryError("dx, thickness and t_ambient must be positive");
    if (spec.neck_separation <= spec.neck_width)
        throw GeometryError("neck_separation must exceed neck_width, necks would merge");
    if (spec.asymmetry_factor < 0.0 || spec.asymmetry_factor > 0.05)
        throw GeometryError("asymmetry_factor must lie in [0, 0.05]");

    if (spec.waist_width > spec.neck_width)
        throw GeometryError("waist_width must not exceed neck_width");
    using detail::cells_of;
    const int w = cells_of(spec.neck_width, dx, "neck_width");
    const int l = cells_of(spec.neck_length, dx, "neck_length");
    const int sep = cells_of(spec.neck_separation, dx, "neck_separation");
    const int ww = cells_of(spec.waist_width, dx, "waist_width");
    const int wl = spec.waist_length <= 0.0 ? 0 : cells_of(spec.waist_length, dx, "waist_length");
    const int he = cells_of(spec.electrode_thickness, dx, "electrode_thickness");
    const int ov = cells_of(spec.island_overhang, dx, "island_overhang");
    const int ms = cells_of(spec.side_margin, dx, "side_margin");
    const int ma = cells_of(spec.anchor_margin, dx, "anchor_margin");
    if (sep <= w) throw GeometryError("neck_separation resolves to <= neck_width cells");
    if (wl > l) throw GeometryError("waist_length must not exceed neck_length");

    DeviceGrid g;
    g.dx = dx;
    g.thickness = thickness;
    g.t_ambient = t_ambient;
    g.nx = 2 * (ms + ov) + w + sep;
    g.ny = 2 * ma + 2 * he + l;
    g.material.assign(static_cast<std::size_t>(g.nx) * g.ny, Region::insulator);
    g.sigma_scale.assign(g.material.size(), 1.0);

    const int bar_y0 = ma, bar_y1 = ma + he;
    const int neck_y0 = bar_y1, neck_y1 = bar_y1 + l;
    const int isl_y0 = neck_y1, isl_y1 = neck_y1 + he;
    const int xa0 = ms + ov, xa1 = xa0 + w;           // neck A
    const int xb0 = xa0 + sep, xb1 = xb0 + w;         // neck B
    const int isla_x0 = ms, isla_x1 = xa1 + ov;       // island A
    const int islb_x0 = xb0 - ov, islb_x1 = g.nx - ms; // island B
    if (isla_x1 >= islb_x0)
        throw GeometryError("islands overlap, reduce island_overhang or widen neck_separation");

    auto fill = [&](int x0, int x1, int y0, int y1, Region r) {
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) g.material[g.idx(x, y)] = r;
    };
    fill(isla_x0, islb_x1, bar_y0, bar_y1, Region::electrode); // shared bar
    fill(xa0, xa1, neck_y0, neck_y1, Region::gst);             // neck A
    fill(xb0, xb1, neck_y0, neck_y1, Region::gst);             // neck B
    fill(isla_x0, isla_x1, isl_y0, isl_y1, Region::electrode); // island A
    fill(islb_x0, islb_x1, isl_y0, isl_y1, Region::electrode); // island B

    // carve the constrictions: notches on both sides of each neck middle
    const int notch = (w - ww) / 2;
    const int wy0 = neck_y0 + (l - wl) / 2, wy1 = wy0 + wl;
    if (notch > 0 && wl > 0) {
        fill(xa0, xa0 + notch, wy0, wy1, Region::insulator);
        fill(xa1 - notch, xa1, wy0, wy1, Region::insulator);
        fill(xb0, xb0 + notch, wy0, wy1, Region::insulator);
        fill(xb1 - notch, xb1, wy0, wy1, Region::insulator);
    }

    g.neck_a_box = {xa0, neck_y0, xa1, neck_y1};
    g.neck_b_box = {xb0, neck_y0, xb1, neck_y1};
    const int cy0 = wl > 0 ? wy0 : neck_y0, cy1 = wl > 0 ? wy1 : neck_y1;
    for (int y = neck_y0; y < neck_y1; ++y) {
        for (int x = xa0; x < xa1; ++x)
            if (g.material[g.idx(x, y)] == Region::gst) {
                g.neck_a_cells.push_back(g.idx(x, y));
                if (y >= cy0 && y < cy1) g.neck_a_core.push_back(g.idx(x, y));
            }
        for (int x = xb0; x < xb1; ++x)
            if (g.material[g.idx(x, y)] == Region::gst) {
                g.neck_b_cells.push_back(g.idx(x, y));
                if (y >= cy0 && y < cy1) g.neck_b_core.push_back(g.idx(x, y));
            }
    }
    for (int cell : g.neck_a_cells) g.sigma_scale[cell] = 1.0 + spec.asymmetry_factor;

    // Contacts. W1/R1 straddle the symmetry axis on the bar; W2/R2 and W3/R3
    // mirror each other on the islands.
    const int cx = xa0 + (sep + w) / 2; // midline between the necks (cell units)
    const int cw = std::max(2, w / 2);
    auto push_row = [&](std::vector<int>& out, int x0, int x1, int y) {
        for (int x = x0; x < x1; ++x) out.push_back(g.idx(x, y));
    };
    push_row(g.contact_cells[W1], cx - cw, cx + cw, bar_y0);
    push_row(g.contact_cells[R1], cx - cw, cx + cw, bar_y1 - 1);
    push_row(g.contact_cells[W2], xa0, xa1, isl_y1 - 1);
    push_row(g.contact_cells[W3], xb0, xb1, isl_y1 - 1);
    push_row(g.contact_cells[R2], isla_x0, xa0, isl_y1 - 1);
    push_row(g.contact_cells[R3], xb1, islb_x1, isl_y1 - 1);

    for (int x = 0; x < g.nx; ++x) {
        g.thermal_anchor_cells.push_back(g.idx(x, 0));
        g.thermal_anchor_cells.push_back(g.idx(x, g.ny - 1));
    }

    g.finalize_lookups();

    // Structural checks: contacts on electrode cells, no overlaps.
    std::vector<int> seen(g.material.size(), -1);
    for (int c = 0; c < n_contacts; ++c) {
        if (g.contact_cells[c].empty())
            throw GeometryError(std::string("contact ") + contact_name(c) + " has no cells");
        for (int cell : g.contact_cells[c]) {
            if (g.material[cell] != Region::electrode)
                throw GeometryError(std::string("contact ") + contact_name(c) +
                                    " does not sit on electrode cells");
            if (seen[cell] != -1)
                throw GeometryError("contact footprints overlap");
            seen[cell] = c;
        }
    }
    return g;
}

// Aggregate counts and bounding boxes, printable as aligned text or as a
// machine-readable key=value block.
struct RegionReport {
    int nx = 0, ny = 0;
    long insulator_cells = 0, gst_cells = 0, electrode_cells = 0;
    std::array<int, n_contacts> contact_cell_counts{};
    int anchor_cells = 0;
    BoundingBox neck_a, neck_b;

    std::string to_text() const {
        std::ostringstream os;
        os << "grid          " << nx << " x " << ny << "\n"
           << "insulator     " << insulator_cells << "\n"
           << "gst           " << gst_cells << "\n"
           << "electrode     " << electrode_cells << "\n"
           << "anchors       " << anchor_cells << "\n";
        for (int c = 0; c < n_contacts; ++c)
            os << "contact " << contact_name(c) << "    " << contact_cell_counts[c] << "\n";
        os << "neck A        [" << neck_a.x0 << "," << neck_a.x1 << ") x [" << neck_a.y0 << ","
           << neck_a.y1 << ")\n"
           << "neck B        [" << neck_b.x0 << "," << neck_b.x1 << ") x [" << neck_b.y0 << ","
           << neck_b.y1 << ")\n";
        return os.str();
    }

    std::string to_kv() const {
        std::ostringstream os;
        os << "nx=" << nx << "\nny=" << ny << "\ninsulator_cells=" << insulator_cells
           << "\ngst_cells=" << gst_cells << "\nelectrode_cells=" << electrode_cells
           << "\nanchor_cells=" << anchor_cells << "\n";
        for (int c = 0; c < n_contacts; ++c)
            os << "contact_" << contact_name(c) << "_cells=" << contact_cell_counts[c] << "\n";
        os << "neck_a_box=" << neck_a.x0 << "," << neck_a.y0 << "," << neck_a.x1 << ","
           << neck_a.y1 << "\n";
        os << "neck_b_box=" << neck_b.x0 << "," << neck_b.y0 << "," << neck_b.x1 << ","
           << neck_b.y1 << "\n";
        return os.str();
    }
};

inline RegionReport region_report(const DeviceGrid& g) {
    RegionReport r;
    r.nx = g.nx;
    r.ny = g.ny;
    for (Region m : g.material) {
        if (m == Region::insulator) ++r.insulator_cells;
        else if (m == Region::gst) ++r.gst_cells;
        else ++r.electrode_cells;
    }
    for (int c = 0; c < n_contacts; ++c)
        r.contact_cell_counts[c] = static_cast<int>(g.contact_cells[c].size());
    r.anchor_cells = static_cast<int>(g.thermal_anchor_cells.size());
    r.neck_a = g.neck_a_box;
    r.neck_b = g.neck_b_box;
    return r;
}

} // namespace pcsim

#endif
