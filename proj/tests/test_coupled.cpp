#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pcsim/coupled.hpp"

using namespace pcsim;

namespace {

double max_T(const FieldState& s) { return *std::max_element(s.T.begin(), s.T.end()); }

double neck_max_T(const FieldState& s, const std::vector<int>& cells) {
    double t = 0.0;
    for (int c : cells) t = std::max(t, s.T[c]);
    return t;
}

} // namespace

TEST_CASE("zero bias leaves the state unchanged except for the clock") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const KineticsParams kin;
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    const FieldState before = s;
    const StepStats st = idle_step(g, s, m, kin, 1e-11, 0);
    CHECK(!st.active);
    CHECK(s.time == doctest::Approx(1e-11));
    CHECK(s.T == before.T);
    CHECK(s.cd1 == before.cd1);
    CHECK(s.V == before.V);
}

TEST_CASE("constant write bias heats the device monotonically at first") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const KineticsParams kin;
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    ContactBC bc = all_floating();
    bc[W1] = ContactCondition::fixed_voltage(0.5);
    bc[W2] = ContactCondition::fixed_voltage(0.0);
    bc[W3] = ContactCondition::fixed_voltage(0.0);
    double prev = 300.0;
    for (int k = 0; k < 20; ++k) {
        const StepStats st = coupled_step(g, s, m, kin, bc, 1e-11, k);
        CHECK(st.active);
        CHECK(st.total_power > 0.0);
        CHECK(st.conservation_rel <= 1e-9);
        CHECK(st.energy_residual_rel < 0.01);
        const double t = max_T(s);
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("sustained circuit write melts exactly one neck first, and it is neck A") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const KineticsParams kin;
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    CircuitConfig ccfg;
    CircuitCoupler coupler(ccfg, DriveMode::write);

    bool melted = false;
    for (int k = 0; k < 3000 && !melted; ++k) {
        coupled_step(g, s, m, kin, coupler, 1e-11, k);
        const NeckReport nr = neck_state(g, s);
        if (nr.molten_a > 0 || nr.molten_b > 0) {
            melted = true;
            CHECK(nr.molten_a > 0);
            CHECK(nr.molten_b == 0);
            CHECK(neck_max_T(s, g.neck_a_cells) > neck_max_T(s, g.neck_b_cells));
        }
    }
    CHECK(melted);
}

TEST_CASE("gauss-seidel passes settle the terminal currents") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const KineticsParams kin;
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    CircuitConfig ccfg;
    CircuitCoupler coupler(ccfg, DriveMode::write);
    const StepStats st = coupled_step(g, s, m, kin, coupler, 1e-11, 0);
    CHECK(st.gs_passes >= 2);
    CHECK(st.gs_passes <= 10);
    REQUIRE(st.circuit.has_value());
    CHECK(st.circuit->i_write > 0.0);
}

TEST_CASE("read drive reports q and q-prime and does not disturb the phase") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const KineticsParams kin;
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    // block neck A
    for (int cell : g.neck_a_cells) {
        s.cd1[cell] = 0.0;
        s.cd2[cell] = 0.0;
    }
    const NeckReport before = neck_state(g, s);
    CircuitConfig ccfg;
    CircuitCoupler coupler(ccfg, DriveMode::read);
    StepStats st;
    for (int k = 0; k < 50; ++k) st = coupled_step(g, s, m, kin, coupler, 1e-11, k);
    REQUIRE(st.circuit.has_value());
    CHECK(st.circuit->v_qprime > 10.0 * st.circuit->v_q); // neck A branch blocked
    const NeckReport after = neck_state(g, s);
    CHECK(before.a == after.a);
    CHECK(before.b == after.b);
    CHECK(max_T(s) < 320.0); // reads barely heat the device
}

TEST_CASE("mid-write: one neck molten while the other transitions toward crystalline") {
    const MaterialTable m = MaterialTable::gst_defaults();
    const KineticsParams kin;
    const DeviceGrid g = build_grid(GeometrySpec{}, 1e-9, 20e-9, 300.0);
    FieldState s = FieldState::initial(g);
    // post-initialization state: neck A constriction amorphized
    for (int cell : g.neck_a_core) {
        s.cd1[cell] = 0.0;
        s.cd2[cell] = 0.0;
    }
    const double cd_a_start = neck_state(g, s).mean_cd_a;
    CircuitConfig ccfg;
    CircuitCoupler wc(ccfg, DriveMode::write);
    StepScratch scratch;
    for (int k = 0; k < 700; ++k) coupled_step(g, s, m, kin, wc, 1e-11, k, {}, &scratch);
    const NeckReport nr = neck_state(g, s);
    CHECK(nr.b == NeckClass::molten);
    CHECK(nr.molten_a == 0);
    CHECK(nr.mean_cd_a > cd_a_start); // recrystallization under way
}
