#include <doctest.h>

#include <cmath>

#include "pcsim/potential.hpp"
#include "test_helpers.hpp"

using namespace pcsim;
using pcsim::testing::make_slab_grid;

namespace {

ContactBC two_terminal(double v_w1, double v_w2) {
    ContactBC bc = all_floating();
    bc[W1] = ContactCondition::fixed_voltage(v_w1);
    bc[W2] = ContactCondition::fixed_voltage(v_w2);
    return bc;
}

double slab_current(const DeviceGrid& g, const MaterialTable& m, FieldState& s) {
    const std::vector<double> sigma = sigma_field(g, s, m);
    const PotentialSolution sol = solve_potential(g, sigma, two_terminal(1.0, 0.0), s.V);
    return sol.contact_current[W1];
}

} // namespace

TEST_CASE("uniform crystalline slab matches the analytic resistance within 1%") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const int nx = 102, ny = 40;
    const double dx = 1e-9;
    const DeviceGrid g = make_slab_grid(nx, ny, dx);
    FieldState s = FieldState::initial(g);

    const double i = slab_current(g, m, s);
    const double L = (nx - 2) * dx, W = ny * dx;
    const double expected = m.crystalline.sigma_ref * W * g.thickness / L; // 1 V across
    CHECK(i == doctest::Approx(expected).epsilon(0.01));

    // linear potential ramp across the GST
    const int ymid = ny / 2;
    for (int x = 2; x < nx - 2; ++x) {
        const double frac = 1.0 - (x - 0.5) / (nx - 1.0);
        CHECK(s.V[g.idx(x, ymid)] ==
              doctest::Approx(frac).epsilon(0.03));
    }
}

TEST_CASE("all contacts grounded gives the zero field and zero currents") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = make_slab_grid(40, 10);
    FieldState s = FieldState::initial(g);
    const std::vector<double> sigma = sigma_field(g, s, m);
    const PotentialSolution sol = solve_potential(g, sigma, two_terminal(0.0, 0.0), s.V);
    for (double v : s.V) CHECK(v == 0.0);
    for (int c = 0; c < n_contacts; ++c) CHECK(sol.contact_current[c] == 0.0);
}

TEST_CASE("graded slab: resistance error is below 1% and drops at least 2x at dx/2") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const double length = 100e-9, width = 20e-9;
    const double beta = std::log(m.crystalline.sigma_ref / m.amorphous.sigma_ref);

    auto resistance_error = [&](double dx) {
        const int n_gst = static_cast<int>(std::lround(length / dx));
        const int ny = static_cast<int>(std::lround(width / dx));
        const DeviceGrid g = make_slab_grid(n_gst + 2, ny, dx);
        FieldState s = FieldState::initial(g);
        // cd linear in x samples sigma(x) = sigma_a exp(beta x / L)
        for (int y = 0; y < g.ny; ++y)
            for (int x = 1; x <= n_gst; ++x) {
                const double u = (x - 0.5) / n_gst;
                s.cd1[g.idx(x, y)] = u;
                s.cd2[g.idx(x, y)] = 0.0;
            }
        const double i = slab_current(g, m, s);
        const double r_analytic =
            length * (1.0 - std::exp(-beta)) /
            (m.amorphous.sigma_ref * beta * width * g.thickness);
        return std::fabs(1.0 / i - r_analytic) / r_analytic;
    };

    const double e1 = resistance_error(1e-9);
    const double e2 = resistance_error(0.5e-9);
    CHECK(e1 < 0.01);
    CHECK(e2 <= 0.5 * e1);
}

TEST_CASE("charge conservation after every solve is at the 1e-9 level") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    const std::vector<double> sigma = sigma_field(g, s, m);

    ContactBC bc = all_floating();
    bc[W1] = ContactCondition::fixed_voltage(0.7);
    bc[W2] = ContactCondition::fixed_voltage(0.0);
    bc[W3] = ContactCondition::fixed_voltage(0.0);
    const PotentialSolution sol = solve_potential(g, sigma, bc, s.V);
    CHECK(sol.max_current > 0.0);
    CHECK(sol.conservation_error <= 1e-9 * sol.max_current);

    // floating contacts carry no net current
    CHECK(std::fabs(sol.contact_current[R2]) <= 1e-9 * sol.max_current);
}

TEST_CASE("amorphizing neck B blocks the R1->R3 read path by >= 100x") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);

    ContactBC bc = all_floating();
    bc[R1] = ContactCondition::fixed_voltage(0.5);
    bc[R3] = ContactCondition::fixed_voltage(0.0);

    FieldState cryst = FieldState::initial(g);
    std::vector<double> sigma = sigma_field(g, cryst, m);
    const double i_cryst =
        std::fabs(solve_potential(g, sigma, bc, cryst.V).contact_current[R3]);

    FieldState amor = FieldState::initial(g);
    for (int cell : g.neck_b_cells) {
        amor.cd1[cell] = 0.0;
        amor.cd2[cell] = 0.0;
    }
    sigma = sigma_field(g, amor, m);
    const double i_amor =
        std::fabs(solve_potential(g, sigma, bc, amor.V).contact_current[R3]);

    CHECK(i_cryst >= 100.0 * i_amor);
}

TEST_CASE("current boundary condition drives the prescribed current") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = make_slab_grid(52, 20);
    FieldState s = FieldState::initial(g);
    const std::vector<double> sigma = sigma_field(g, s, m);
    ContactBC bc = all_floating();
    bc[W1] = ContactCondition::fixed_current(1e-5);
    bc[W2] = ContactCondition::fixed_voltage(0.0);
    const PotentialSolution sol = solve_potential(g, sigma, bc, s.V);
    CHECK(sol.contact_current[W1] == doctest::Approx(1e-5).epsilon(1e-6));
    CHECK(sol.contact_current[W2] == doctest::Approx(-1e-5).epsilon(1e-6));
    CHECK(sol.contact_voltage[W1] > 0.0);
}

TEST_CASE("an all-floating drive is rejected") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = make_slab_grid(20, 8);
    FieldState s = FieldState::initial(g);
    const std::vector<double> sigma = sigma_field(g, s, m);
    CHECK_THROWS_AS(solve_potential(g, sigma, all_floating(), s.V), ConfigError);
}

TEST_CASE("joule power equals the terminal power to high accuracy") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = make_slab_grid(62, 24);
    FieldState s = FieldState::initial(g);
    const std::vector<double> sigma = sigma_field(g, s, m);
    const PotentialSolution sol = solve_potential(g, sigma, two_terminal(1.0, 0.0), s.V);
    const JouleField j = joule_source(g, sigma, s.V);
    double terminal = 0.0;
    for (int c = 0; c < n_contacts; ++c)
        terminal += sol.contact_voltage[c] * sol.contact_current[c];
    CHECK(j.total == doctest::Approx(terminal).epsilon(0.01));
    CHECK(j.total > 0.0);

    // 1 V across the uniform slab dissipates V^2 / R_slab
    const double r_slab = (62 - 2) * 1e-9 / (m.crystalline.sigma_ref * 24e-9 * g.thickness);
    CHECK(j.total == doctest::Approx(1.0 / r_slab).epsilon(0.01));

    double cell_sum = 0.0;
    for (std::size_t i = 0; i < j.q.size(); ++i) cell_sum += j.q[i] * g.cell_volume();
    CHECK(cell_sum == doctest::Approx(j.total).epsilon(1e-9));
}

TEST_CASE("zero potential field has zero joule source") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const DeviceGrid g = make_slab_grid(20, 8);
    FieldState s = FieldState::initial(g);
    const std::vector<double> sigma = sigma_field(g, s, m);
    const JouleField j = joule_source(g, sigma, s.V);
    CHECK(j.total == 0.0);
    for (double q : j.q) CHECK(q == 0.0);
}
