#ifndef PCSIM_CIRCUIT_HPP
#define PCSIM_CIRCUIT_HPP

#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "pcsim/errors.hpp"
#include "pcsim/potential.hpp"

namespace pcsim {

// Square-law FET. Cutoff below v_threshold, triode/saturation above,
// continuous across the region boundary.
struct FetParams {
    double v_threshold = 0.2;         // V
    double transconductance = 1.6e-4; // A/V^2

    void validate() const {
        if (!(transconductance > 0.0)) throw DomainError("FET transconductance must be positive");
    }
};

inline double fet_current(double v_gs, double v_ds, const FetParams& p) {
    if (v_ds < 0.0) return -fet_current(v_gs - v_ds, -v_ds, p); // source/drain swap
    const double vov = v_gs - p.v_threshold;
    if (vov <= 0.0) return 0.0;
    if (v_ds >= vov) return 0.5 * p.transconductance * vov * vov;
    return p.transconductance * (vov * v_ds - 0.5 * v_ds * v_ds);
}

// Lumped external circuit: one write FET sourcing W1, and per read branch a
// read FET from the return contact into node Q (Q') with a load resistor to
// ground. Q reads the neck A branch (R2), Q' the neck B branch (R3).
struct CircuitConfig {
    double v_write_supply = 0.58; // V at the write FET drain
    double v_gate_write = 3.0;    // V
    double v_gate_read = 0.5;     // V
    double v_read_supply = 1.3;   // V driven into R1 during reads
    double r_load = 1.0e4;        // ohm, one per read branch
    FetParams write_fet{0.2, 6.0e-4};
    FetParams read_fet{0.2, 8.2e-5};

    void validate() const {
        if (!(r_load > 0.0)) throw DomainError("r_load must be positive");
        if (!std::isfinite(v_write_supply) || !std::isfinite(v_read_supply) ||
            !std::isfinite(v_gate_write) || !std::isfinite(v_gate_read))
            throw DomainError("circuit supplies must be finite");
        write_fet.validate();
        read_fet.validate();
    }
};

enum class DriveMode { write, read };

struct CircuitState {
    double v_q = 0.0, v_qprime = 0.0; // node voltages (V)
    double i_write = 0.0;             // write FET current (A)
    std::array<double, n_contacts> contact_voltage{};
    std::array<double, n_contacts> contact_current{};
    ContactBC bc = all_floating(); // device boundary condition at the solution
    int iterations = 0;
};

// Terminal response of the device at a frozen material state. Must be linear
// in the applied contact voltages; contacts not fixed by the BC are floating.
using DeviceOracle = std::function<std::array<double, n_contacts>(const ContactBC&)>;

namespace detail {

inline ContactBC write_bc(double v_w1) {
    ContactBC bc = all_floating();
    bc[W1] = ContactCondition::fixed_voltage(v_w1);
    bc[W2] = ContactCondition::fixed_voltage(0.0);
    bc[W3] = ContactCondition::fixed_voltage(0.0);
    return bc;
}

inline ContactBC read_bc(double v_r1, double v_r2, double v_r3) {
    ContactBC bc = all_floating();
    bc[R1] = ContactCondition::fixed_voltage(v_r1);
    bc[R2] = ContactCondition::fixed_voltage(v_r2);
    bc[R3] = ContactCondition::fixed_voltage(v_r3);
    return bc;
}

// Branch current entering at contact voltage v and flowing through the read
// FET into the load: i = fet(v_gate - i R, v - i R). Monotone scalar root.
inline double read_branch_current(double v, const CircuitConfig& c) {
    if (v == 0.0) return 0.0;
    double lo = std::min(0.0, v / c.r_load);
    double hi = std::max(0.0, v / c.r_load);
    auto h = [&](double i) {
        return fet_current(c.v_gate_read - i * c.r_load, v - i * c.r_load, c.read_fet) - i;
    };
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

// Couples the lumped circuit to the device terminal response.
//
// Write mode: v_write_supply through the write FET into W1, W2/W3 grounded,
// read contacts floating. Read mode: R1 at v_read_supply, each return contact
// (R2, R3) through its read FET and load resistor to ground, write contacts
// floating. Damped Newton until every terminal current mismatch is below
// 1e-12 A or 1e-4 relative.
inline CircuitState solve_coupled(const CircuitConfig& cfg, const DeviceOracle& device,
                                  DriveMode mode) {
    cfg.validate();
    CircuitState st;

    if (mode == DriveMode::write) {
        const auto probe = device(detail::write_bc(1.0));
        const double g_dev = probe[W1]; // conductance seen at W1, W2/W3 grounded
        if (!(g_dev >= 0.0)) throw SolverError("device write conductance is negative");
        auto mismatch = [&](double v) {
            return fet_current(cfg.v_gate_write - v, cfg.v_write_supply - v, cfg.write_fet) -
                   g_dev * v;
        };
        double lo = 0.0, hi = std::max(cfg.v_write_supply, 0.0);
        double v = 0.0;
        if (mismatch(0.0) <= 0.0) {
            v = 0.0; // cutoff or zero supply
        } else {
            for (int k = 0; k < 200; ++k) {
                const double mid = 0.5 * (lo + hi);
                if (mismatch(mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            v = 0.5 * (lo + hi);
            st.iterations = 200;
        }
        const double rel_gap = std::fabs(mismatch(v)) /
                               std::max({std::fabs(g_dev * v), 1e-12});
        if (std::fabs(mismatch(v)) > 1e-12 && rel_gap > 1e-4)
            throw SolverError("write coupling did not converge");
        for (int c = 0; c < n_contacts; ++c) st.contact_current[c] = v * probe[c];
        st.i_write = st.contact_current[W1];
        st.bc = detail::write_bc(v);
        st.contact_voltage[W1] = v;
        return st;
    }

    // read mode: unknown return-contact voltages x = (v_r2, v_r3)
    const double vs = cfg.v_read_supply;
    const auto i_base = device(detail::read_bc(vs, 0.0, 0.0));
    const auto i_p2 = device(detail::read_bc(vs, 1.0, 0.0));
    const auto i_p3 = device(detail::read_bc(vs, 0.0, 1.0));
    // device currents: I(v2,v3) = i_base + G * (v2, v3)
    const double G22 = i_p2[R2] - i_base[R2], G23 = i_p3[R2] - i_base[R2];
    const double G32 = i_p2[R3] - i_base[R3], G33 = i_p3[R3] - i_base[R3];

    double v2 = 0.0, v3 = 0.0;
    auto dev_r2 = [&](double a, double b) { return i_base[R2] + G22 * a + G23 * b; };
    auto dev_r3 = [&](double a, double b) { return i_base[R3] + G32 * a + G33 * b; };
    auto f2 = [&](double a, double b) { return dev_r2(a, b) + detail::read_branch_current(a, cfg); };
    auto f3 = [&](double a, double b) { return dev_r3(a, b) + detail::read_branch_current(b, cfg); };

    auto converged = [&](double a, double b) {
        const double m2 = std::fabs(f2(a, b));
        const double m3 = std::fabs(f3(a, b));
        const double s2 = std::max(std::fabs(dev_r2(a, b)), 1e-12);
        const double s3 = std::max(std::fabs(dev_r3(a, b)), 1e-12);
        return (m2 < 1e-12 || m2 / s2 < 1e-4) && (m3 < 1e-12 || m3 / s3 < 1e-4);
    };

    int it = 0;
    const int cap = 100;
    double r2 = f2(v2, v3), r3 = f3(v2, v3);
    while (!converged(v2, v3)) {
        if (++it > cap) {
            std::ostringstream os;
            os << "read coupling did not converge: mismatch " << r2 << " A at R2, " << r3
               << " A at R3 after " << cap << " iterations";
            throw SolverError(os.str());
        }
        const double h2 = std::max(1e-9, 1e-7 * std::fabs(v2));
        const double h3 = std::max(1e-9, 1e-7 * std::fabs(v3));
        const double db2 = (detail::read_branch_current(v2 + h2, cfg) -
                            detail::read_branch_current(v2 - h2, cfg)) /
                           (2.0 * h2);
        const double db3 = (detail::read_branch_current(v3 + h3, cfg) -
                            detail::read_branch_current(v3 - h3, cfg)) /
                           (2.0 * h3);
        const double J22 = G22 + db2, J23 = G23;
        const double J32 = G32, J33 = G33 + db3;
        const double det = J22 * J33 - J23 * J32;
        if (det == 0.0) throw SolverError("read coupling Jacobian is singular");
        double dv2 = (r2 * J33 - J23 * r3) / det;
        double dv3 = (r3 * J22 - J32 * r2) / det;
        double scale = 1.0;
        const double n_old = std::fabs(r2) + std::fabs(r3);
        for (int back = 0; back < 30; ++back) {
            const double t2 = v2 - scale * dv2, t3 = v3 - scale * dv3;
            if (std::fabs(f2(t2, t3)) + std::fabs(f3(t2, t3)) <= n_old || back == 29) {
                v2 = t2;
                v3 = t3;
                break;
            }
            scale *= 0.5;
        }
        r2 = f2(v2, v3);
        r3 = f3(v2, v3);
    }
    st.iterations = it;

    const double ia = detail::read_branch_current(v2, cfg);
    const double ib = detail::read_branch_current(v3, cfg);
    st.v_q = ia * cfg.r_load;
    st.v_qprime = ib * cfg.r_load;
    st.bc = detail::read_bc(vs, v2, v3);
    st.contact_voltage[R1] = vs;
    st.contact_voltage[R2] = v2;
    st.contact_voltage[R3] = v3;
    st.contact_current[R1] = i_base[R1] + (i_p2[R1] - i_base[R1]) * v2 +
                             (i_p3[R1] - i_base[R1]) * v3;
    st.contact_current[R2] = dev_r2(v2, v3);
    st.contact_current[R3] = dev_r3(v2, v3);
    return st;
}

// Device oracle backed by the field solver at a frozen conductivity field.
inline DeviceOracle make_device_oracle(const DeviceGrid& g, const std::vector<double>& sigma) {
    return [&g, &sigma](const ContactBC& bc) {
        std::vector<double> v; // cold start per probe, probes change the BC shape
        const PotentialSolution sol = solve_potential(g, sigma, bc, v);
        return sol.contact_current;
    };
}

} // namespace pcsim

#endif
