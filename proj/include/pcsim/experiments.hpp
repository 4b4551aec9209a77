#ifndef PCSIM_EXPERIMENTS_HPP
#define PCSIM_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pcsim/coupled.hpp"

namespace pcsim {

struct PulseEvent {
    enum class Kind { write, read, idle } kind = Kind::idle;
    double start = 0.0;    // s
    double duration = 0.0; // s
    double end() const { return start + duration; }
};

inline const char* event_kind_name(PulseEvent::Kind k) {
    switch (k) {
        case PulseEvent::Kind::write: return "write";
        case PulseEvent::Kind::read: return "read";
        default: return "idle";
    }
}

struct PulseSchedule {
    std::vector<PulseEvent> events;

    void validate() const {
        double prev_end = -1.0;
        for (const PulseEvent& e : events) {
            if (!(e.duration > 0.0) || e.start < 0.0)
                throw ConfigError("schedule events need start >= 0 and duration > 0");
            if (e.start < prev_end)
                throw ConfigError("schedule events must be sorted and non-overlapping");
            prev_end = e.end();
        }
    }

    double horizon() const {
        double h = 0.0;
        for (const PulseEvent& e : events) h = std::max(h, e.end());
        return h;
    }

    // Toggle-style schedule: a write pulse at the start of every period with a
    // read pulse read_delay after each write ends, plus a cool-down tail.
    static PulseSchedule standard(int writes, double write_duration, double read_delay,
                                  double read_duration, double period) {
        PulseSchedule s;
        for (int k = 0; k < writes; ++k) {
            const double t0 = k * period;
            s.events.push_back({PulseEvent::Kind::write, t0, write_duration});
            if (read_duration > 0.0)
                s.events.push_back(
                    {PulseEvent::Kind::read, t0 + write_duration + read_delay, read_duration});
        }
        s.validate();
        return s;
    }
};

struct TraceSample {
    double t = 0.0;
    double i_write = 0.0;
    double v_q = 0.0, v_qprime = 0.0;
    double power = 0.0;
    NeckClass neck_a = NeckClass::crystalline, neck_b = NeckClass::crystalline;
};

struct EventRecord {
    PulseEvent event;
    double energy = 0.0;     // J, integrated device power over the event
    double mean_power = 0.0; // W
    NeckClass neck_a_before{}, neck_b_before{};
    NeckClass neck_a_after{}, neck_b_after{};
    double read_v_q = 0.0, read_v_qprime = 0.0; // settled means, read events only
};

struct TraceSet {
    std::vector<TraceSample> samples;
    std::vector<EventRecord> events;
    std::vector<std::string> snapshot_files;
    double worst_conservation_rel = 0.0;
    double worst_energy_residual_rel = 0.0;
};

struct RunOptions {
    StepOptions step{};
    int idle_sample_stride = 20; // sample every Nth idle step
    int snapshot_every = 0;      // 0 disables
    std::function<std::string(const DeviceGrid&, const FieldState&, std::uint64_t)> snapshot_hook;
};

// Read levels: mean over the whole read window, which is what an integrating
// comparator attached to Q/Q' would see. Early reads on a still-hot device
// average in the conductive transient of the quenching branch.
inline void finish_read_record(EventRecord& rec, const std::vector<TraceSample>& samples) {
    if (rec.event.kind != PulseEvent::Kind::read) return;
    double sq = 0.0, sp = 0.0, cnt = 0.0;
    for (const TraceSample& s : samples) {
        if (s.t <= rec.event.start || s.t > rec.event.end() + 1e-18) continue;
        sq += s.v_q;
        sp += s.v_qprime;
        cnt += 1.0;
    }
    if (cnt == 0.0) return;
    rec.read_v_q = sq / cnt;
    rec.read_v_qprime = sp / cnt;
}

// Steps the device through a pulse schedule, sampling every coupled step
// during write and read events. Event times are relative to the state clock
// at entry and resolve to whole steps; events shorter than half a step are
// skipped. Crystal-density bounds are validated on every step; solver
// failures are rethrown with the active event attached.
inline TraceSet run_schedule(const DeviceGrid& g, const MaterialTable& m,
                             const KineticsParams& kin, const CircuitConfig& ccfg,
                             const PulseSchedule& schedule, double dt, FieldState& state,
                             const RunOptions& opt = {}) {
    schedule.validate();
    ccfg.validate();
    TraceSet out;
    const double t_origin = state.time;

    auto sample_now = [&](const StepStats* stats) {
        TraceSample ts;
        ts.t = state.time;
        if (stats) {
            ts.power = stats->total_power;
            if (stats->circuit) {
                ts.i_write = stats->circuit->i_write;
                ts.v_q = stats->circuit->v_q;
                ts.v_qprime = stats->circuit->v_qprime;
            }
        }
        const NeckReport nr = neck_state(g, state);
        ts.neck_a = nr.a;
        ts.neck_b = nr.b;
        out.samples.push_back(ts);
    };
    sample_now(nullptr);

    const std::uint64_t nsteps =
        static_cast<std::uint64_t>(std::llround(schedule.horizon() / dt));

    CircuitCoupler write_coupler(ccfg, DriveMode::write);
    CircuitCoupler read_coupler(ccfg, DriveMode::read);
    StepScratch scratch;

    std::size_t next_event = 0;
    const PulseEvent* active = nullptr;
    int active_index = -1;

    auto close_active = [&]() {
        EventRecord& rec = out.events[active_index];
        const NeckReport nr = neck_state(g, state);
        rec.neck_a_after = nr.a;
        rec.neck_b_after = nr.b;
        finish_read_record(rec, out.samples);
        active = nullptr;
    };

    for (std::uint64_t n = 0; n < nsteps; ++n) {
        const double t_mid = (static_cast<double>(n) + 0.5) * dt; // schedule-local

        if (active && t_mid >= active->end()) close_active();
        while (!active && next_event < schedule.events.size() &&
               t_mid >= schedule.events[next_event].start) {
            if (t_mid < schedule.events[next_event].end()) {
                active = &schedule.events[next_event];
                EventRecord rec;
                rec.event = *active;
                rec.event.start += t_origin; // record in absolute time
                const NeckReport nr = neck_state(g, state);
                rec.neck_a_before = nr.a;
                rec.neck_b_before = nr.b;
                out.events.push_back(rec);
                active_index = static_cast<int>(out.events.size()) - 1;
            }
            ++next_event;
        }

        const PulseEvent::Kind kind = active ? active->kind : PulseEvent::Kind::idle;
        StepStats stats;
        try {
            switch (kind) {
                case PulseEvent::Kind::write:
                    stats = coupled_step(g, state, m, kin, write_coupler, dt, n, opt.step,
                                         &scratch);
                    break;
                case PulseEvent::Kind::read:
                    stats = coupled_step(g, state, m, kin, read_coupler, dt, n, opt.step,
                                         &scratch);
                    break;
                case PulseEvent::Kind::idle:
                    stats = idle_step(g, state, m, kin, dt, n, opt.step, &scratch);
                    break;
            }
        } catch (const Error& e) {
            std::ostringstream os;
            os << e.what() << " (schedule event " << (active ? active_index : -1) << ", kind "
               << event_kind_name(kind) << ", t = " << state.time << " s)";
            throw SolverError(os.str());
        }
        state.validate(g);

        if (active) {
            out.events[active_index].energy += stats.total_power * dt;
            sample_now(&stats);
        } else if (opt.idle_sample_stride > 0 &&
                   n % static_cast<std::uint64_t>(opt.idle_sample_stride) == 0) {
            sample_now(&stats);
        }
        out.worst_conservation_rel =
            std::max(out.worst_conservation_rel, stats.conservation_rel);
        if (stats.active)
            out.worst_energy_residual_rel =
                std::max(out.worst_energy_residual_rel, stats.energy_residual_rel);

        if (opt.snapshot_every > 0 && opt.snapshot_hook && active &&
            n % static_cast<std::uint64_t>(opt.snapshot_every) == 0)
            out.snapshot_files.push_back(opt.snapshot_hook(g, state, n));
    }
    if (active) close_active();
    for (EventRecord& rec : out.events)
        rec.mean_power = rec.event.duration > 0.0 ? rec.energy / rec.event.duration : 0.0;
    return out;
}

struct SweepRow {
    double x = 0.0; // delay (s) or load (ohm)
    double v_high = 0.0, v_low = 0.0;
    double ratio = 0.0;
};

namespace detail {

inline SweepRow read_once(const DeviceGrid& g, const MaterialTable& m, const KineticsParams& kin,
                          const CircuitConfig& ccfg, FieldState state, double idle_time,
                          double read_duration, double dt, const StepOptions& opt) {
    std::uint64_t n = 0;
    StepScratch scratch;
    const std::uint64_t idle_steps = static_cast<std::uint64_t>(std::llround(idle_time / dt));
    for (std::uint64_t k = 0; k < idle_steps; ++k)
        idle_step(g, state, m, kin, dt, n++, opt, &scratch);

    CircuitCoupler coupler(ccfg, DriveMode::read);
    const std::uint64_t read_steps =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(read_duration / dt)));
    double mq = 0.0, mp = 0.0;
    for (std::uint64_t k = 0; k < read_steps; ++k) {
        const StepStats st = coupled_step(g, state, m, kin, coupler, dt, n++, opt, &scratch);
        mq += st.circuit ? st.circuit->v_q : 0.0;
        mp += st.circuit ? st.circuit->v_qprime : 0.0;
    }
    mq /= static_cast<double>(read_steps);
    mp /= static_cast<double>(read_steps);
    SweepRow row;
    row.v_high = std::max(mq, mp);
    row.v_low = std::min(mq, mp);
    row.ratio = row.v_low != 0.0 ? row.v_high / row.v_low : 0.0;
    return row;
}

template <typename Fn>
inline void run_indexed(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const int nt = static_cast<int>(std::min<std::size_t>(threads, count));
    for (int t = 0; t < nt; ++t) pool.emplace_back([&, t]() {
        for (std::size_t i = t; i < count; i += nt) fn(i);
    });
    for (auto& th : pool) th.join();
}

} // namespace detail

// Re-reads the device from one checkpointed post-write state at several
// delays. Each sweep point runs on its own copy of the checkpoint, so equal
// delays give identical rows.
inline std::vector<SweepRow> read_delay_sweep(const DeviceGrid& g, const MaterialTable& m,
                                              const KineticsParams& kin,
                                              const CircuitConfig& ccfg,
                                              const FieldState& post_write,
                                              const std::vector<double>& delays,
                                              double read_duration, double dt,
                                              const StepOptions& opt = {}, int threads = 1) {
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (!(delays[i] > 0.0)) throw ConfigError("read delays must be positive");
        if (i > 0 && delays[i] < delays[i - 1])
            throw ConfigError("read delays must be ascending");
    }
    std::vector<SweepRow> rows(delays.size());
    detail::run_indexed(delays.size(), threads, [&](std::size_t i) {
        rows[i] = detail::read_once(g, m, kin, ccfg, post_write, delays[i], read_duration, dt, opt);
        rows[i].x = delays[i];
    });
    return rows;
}

// Reads one cold device state across load resistor values.
inline std::vector<SweepRow> load_sweep(const DeviceGrid& g, const MaterialTable& m,
                                        const KineticsParams& kin, const CircuitConfig& ccfg,
                                        const FieldState& cold_state,
                                        const std::vector<double>& r_loads, double read_duration,
                                        double dt, const StepOptions& opt = {}, int threads = 1) {
    for (double r : r_loads)
        if (!(r > 0.0)) throw ConfigError("load sweep resistances must be positive");
    std::vector<SweepRow> rows(r_loads.size());
    detail::run_indexed(r_loads.size(), threads, [&](std::size_t i) {
        CircuitConfig c = ccfg;
        c.r_load = r_loads[i];
        rows[i] = detail::read_once(g, m, kin, c, cold_state, 0.0, read_duration, dt, opt);
        rows[i].x = r_loads[i];
    });
    return rows;
}

struct EventEnergy {
    PulseEvent event;
    double energy = 0.0;     // J, trapezoidal integral of the sampled power
    double mean_power = 0.0; // W
};

// Trapezoidal energy per schedule event from the sampled power series.
inline std::vector<EventEnergy> energy_report(const TraceSet& traces) {
    std::vector<EventEnergy> out;
    for (const EventRecord& rec : traces.events) {
        EventEnergy e;
        e.event = rec.event;
        const TraceSample* prev = nullptr;
        for (const TraceSample& s : traces.samples) {
            if (s.t < rec.event.start || s.t > rec.event.end() + 1e-18) continue;
            if (prev) e.energy += 0.5 * (prev->power + s.power) * (s.t - prev->t);
            prev = &s;
        }
        e.mean_power = rec.event.duration > 0.0 ? e.energy / rec.event.duration : 0.0;
        out.push_back(e);
    }
    return out;
}

} // namespace pcsim

#endif
