// Calibration probe: runs write/cool/read cycles on the configured device and
// prints per-pulse physics (melt timing, neck temperatures, crystal density,
// currents, powers) so the default parameter set can be tuned.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "pcsim/config.hpp"
#include "pcsim/coupled.hpp"
#include "pcsim/experiments.hpp"

using namespace pcsim;

namespace {

struct NeckProbe {
    double max_t_a = 0.0, max_t_b = 0.0;
    double mean_t_a = 0.0, mean_t_b = 0.0;
};

NeckProbe probe(const DeviceGrid& g, const FieldState& s) {
    NeckProbe p;
    for (int c : g.neck_a_cells) {
        p.max_t_a = std::max(p.max_t_a, s.T[c]);
        p.mean_t_a += s.T[c];
    }
    for (int c : g.neck_b_cells) {
        p.max_t_b = std::max(p.max_t_b, s.T[c]);
        p.mean_t_b += s.T[c];
    }
    p.mean_t_a /= g.neck_a_cells.size();
    p.mean_t_b /= g.neck_b_cells.size();
    return p;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    int pulses = 5;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) {
            cfg = parse_config(argv[++i]);
        } else if (a == "--set" && i + 1 < argc) {
            apply_override(cfg, argv[++i]);
        } else if (a == "--pulses" && i + 1 < argc) {
            pulses = std::stoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: calibrate [--config f] [--set k=v]... [--pulses n]\n");
            return 2;
        }
    }
    cfg.kinetics.rng_seed = cfg.seed;
    cfg.validate();

    const DeviceGrid g = cfg.build_device();
    std::printf("grid %dx%d, gst cells %ld\n", g.nx, g.ny,
                region_report(g).gst_cells);
    FieldState s = FieldState::initial(g);
    const double dt = cfg.dt;
    const std::uint64_t write_steps =
        static_cast<std::uint64_t>(cfg.schedule.write_duration / dt + 0.5);
    const std::uint64_t cool_steps =
        static_cast<std::uint64_t>((cfg.schedule.period - cfg.schedule.write_duration) / dt + 0.5);

    std::uint64_t n = 0;
    for (int pulse = 0; pulse < pulses; ++pulse) {
        CircuitCoupler wc(cfg.circuit, DriveMode::write);
        double melt_t_a = -1.0, melt_t_b = -1.0;
        double peak_a = 0.0, peak_b = 0.0, mean_power = 0.0, mean_i = 0.0;
        for (std::uint64_t k = 0; k < write_steps; ++k) {
            const StepStats st = coupled_step(g, s, cfg.materials, cfg.kinetics, wc, dt, n++);
            const NeckReport nr = neck_state(g, s);
            const NeckProbe pr = probe(g, s);
            peak_a = std::max(peak_a, pr.max_t_a);
            peak_b = std::max(peak_b, pr.max_t_b);
            mean_power += st.total_power;
            if (st.circuit) mean_i += st.circuit->i_write;
            if (melt_t_a < 0 && nr.molten_a > 0) melt_t_a = k * dt;
            if (melt_t_b < 0 && nr.molten_b > 0) melt_t_b = k * dt;
        }
        mean_power /= write_steps;
        mean_i /= write_steps;
        NeckReport at_end = neck_state(g, s);
        const NeckProbe pr_end = probe(g, s);
        std::printf(
            "pulse %d WRITE: I=%.1f uA P=%.1f uW meltA@%.2fns meltB@%.2fns peakA=%.0fK "
            "peakB=%.0fK endTmeanA=%.0fK endTmeanB=%.0fK cdA=%.2f cdB=%.2f moltA=%d moltB=%d\n",
            pulse, mean_i * 1e6, mean_power * 1e6, melt_t_a * 1e9, melt_t_b * 1e9, peak_a, peak_b,
            pr_end.mean_t_a, pr_end.mean_t_b, at_end.mean_cd_a, at_end.mean_cd_b, at_end.molten_a,
            at_end.molten_b);

        for (std::uint64_t k = 0; k < cool_steps; ++k) {
            idle_step(g, s, cfg.materials, cfg.kinetics, dt, n++);
            if ((k + 1) % (cool_steps / 4) == 0) {
                const NeckReport nr = neck_state(g, s);
                const NeckProbe pr = probe(g, s);
                std::printf("   cool +%.1fns: TmeanA=%.0fK TmeanB=%.0fK cdA=%.3f cdB=%.3f "
                            "moltA=%d moltB=%d\n",
                            (k + 1) * dt * 1e9, pr.mean_t_a, pr.mean_t_b, nr.mean_cd_a,
                            nr.mean_cd_b, nr.molten_a, nr.molten_b);
            }
        }
        const NeckReport nr = neck_state(g, s);
        std::printf("pulse %d END: neckA=%s (cd %.3f) neckB=%s (cd %.3f)\n", pulse,
                    neck_class_name(nr.a), nr.mean_cd_a, neck_class_name(nr.b), nr.mean_cd_b);

        // quick read
        CircuitCoupler rc(cfg.circuit, DriveMode::read);
        StepStats st;
        for (int k = 0; k < 50; ++k) st = coupled_step(g, s, cfg.materials, cfg.kinetics, rc, dt, n++);
        if (st.circuit)
            std::printf("pulse %d READ: v_q=%.3f mV v_q'=%.3f mV ratio=%.1f\n", pulse,
                        st.circuit->v_q * 1e3, st.circuit->v_qprime * 1e3,
                        std::max(st.circuit->v_q, st.circuit->v_qprime) /
                            std::max(1e-12, std::min(st.circuit->v_q, st.circuit->v_qprime)));
    }
    return 0;
}
