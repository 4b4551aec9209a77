// pcsim: phase-change toggle device simulator command line.
//
// Subcommands: run, sweep-delay, sweep-load, oracle, report.
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 verification failure in `oracle`.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcsim/config.hpp"
#include "pcsim/coupled.hpp"
#include "pcsim/experiments.hpp"
#include "pcsim/output.hpp"
#include "pcsim/verify.hpp"

namespace fs = std::filesystem;
using namespace pcsim;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int threads = 0; // 0 = keep config value
    long seed = -1;
    double dt = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "config file (sectioned key = value)");
    cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--set", a.overrides, "override a key, e.g. --set circuit.r_load=1e4")
        ->take_all();
    cmd->add_option("--threads", a.threads, "worker threads for sweeps");
    cmd->add_option("--seed", a.seed, "RNG seed override");
    cmd->add_option("--dt", a.dt, "time step override (s)");
}

RunConfig load_config(const CommonArgs& a) {
    RunConfig cfg = a.config_path.empty() ? RunConfig{} : parse_config(a.config_path);
    for (const std::string& o : a.overrides) apply_override(cfg, o);
    if (a.threads > 0) cfg.threads = a.threads;
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    if (a.dt > 0.0) cfg.dt = a.dt;
    cfg.kinetics.rng_seed = cfg.seed;
    cfg.validate();
    return cfg;
}

void write_effective_config(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir + "/effective.cfg");
    if (!f) throw ConfigError("cannot write " + out_dir + "/effective.cfg");
    f << echo_config(cfg);
}

RunOptions snapshot_options(const RunConfig& cfg, const std::string& out_dir) {
    RunOptions opt;
    opt.snapshot_every = cfg.snapshot_every;
    if (cfg.snapshot_every > 0) {
        fs::create_directories(out_dir + "/snapshots");
        opt.snapshot_hook = [out_dir, &cfg](const DeviceGrid& g, const FieldState& s,
                                            std::uint64_t step) {
            std::string names;
            std::stringstream qs(cfg.output.snapshot_quantities);
            std::string q;
            while (std::getline(qs, q, ',')) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "/snapshots/snap_%08llu_%s",
                              static_cast<unsigned long long>(step), q.c_str());
                const std::string base = out_dir + buf;
                write_snapshot_text(base + ".txt", g, s, q);
                if (cfg.output.snapshot_pgm) write_snapshot_pgm(base + ".pgm", g, s, q);
                if (!names.empty()) names += ";";
                names += base + ".txt";
            }
            return names;
        };
    }
    return opt;
}

int cmd_run(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    write_effective_config(cfg, args.out_dir);
    const DeviceGrid grid = cfg.build_device();

    std::ofstream(args.out_dir + "/region_report.txt") << region_report(grid).to_text();
    std::ofstream(args.out_dir + "/region_report.kv") << region_report(grid).to_kv();

    FieldState state = FieldState::initial(grid);
    const PulseSchedule schedule = cfg.schedule.build();
    const RunOptions opt = snapshot_options(cfg, args.out_dir);
    const TraceSet traces =
        run_schedule(grid, cfg.materials, cfg.kinetics, cfg.circuit, schedule, cfg.dt, state, opt);
    write_traces_csv(args.out_dir + "/traces.csv", traces);
    std::ofstream(args.out_dir + "/energy.csv") << energy_csv(energy_report(traces));

    std::cout << "wrote " << args.out_dir << "/traces.csv (" << traces.samples.size()
              << " samples, " << traces.events.size() << " events)\n";
    for (const EventRecord& e : traces.events) {
        std::printf("%-5s t=%.3e s dur=%.2e s mean_power=%.3e W neckA=%s neckB=%s\n",
                    event_kind_name(e.event.kind), e.event.start, e.event.duration, e.mean_power,
                    neck_class_name(e.neck_a_after), neck_class_name(e.neck_b_after));
    }
    return 0;
}

// Initialization write plus one toggle write; returns the state at the
// moment the toggle write terminates.
FieldState post_write_state(const RunConfig& cfg, const DeviceGrid& grid) {
    FieldState state = FieldState::initial(grid);
    PulseSchedule sched;
    sched.events.push_back({PulseEvent::Kind::write, 0.0, cfg.schedule.write_duration});
    sched.events.push_back(
        {PulseEvent::Kind::write, cfg.schedule.period, cfg.schedule.write_duration});
    run_schedule(grid, cfg.materials, cfg.kinetics, cfg.circuit, sched, cfg.dt, state);
    return state;
}

int cmd_sweep_delay(const CommonArgs& args, std::vector<double>& delays, double read_duration) {
    RunConfig cfg = load_config(args);
    write_effective_config(cfg, args.out_dir);
    const DeviceGrid grid = cfg.build_device();
    if (delays.empty()) delays = {5e-11, 1.5e-10, 5e-10, 1.5e-9, 5e-9};
    if (read_duration <= 0.0) read_duration = cfg.schedule.read_duration;

    const FieldState checkpoint = post_write_state(cfg, grid);
    const auto rows = read_delay_sweep(grid, cfg.materials, cfg.kinetics, cfg.circuit, checkpoint,
                                       delays, read_duration, cfg.dt, {}, cfg.threads);
    write_sweep_csv(args.out_dir + "/delay_sweep.csv", rows, "delay_s");
    std::cout << sweep_csv(rows, "delay_s");
    return 0;
}

int cmd_sweep_load(const CommonArgs& args, std::vector<double>& loads, double read_duration,
                   double cool_time) {
    RunConfig cfg = load_config(args);
    write_effective_config(cfg, args.out_dir);
    const DeviceGrid grid = cfg.build_device();
    if (loads.empty()) loads = {1e3, 1e4, 1e5};
    if (read_duration <= 0.0) read_duration = cfg.schedule.read_duration;

    FieldState state = post_write_state(cfg, grid);
    const std::uint64_t cool_steps =
        static_cast<std::uint64_t>(std::llround(cool_time / cfg.dt));
    for (std::uint64_t k = 0; k < cool_steps; ++k)
        idle_step(grid, state, cfg.materials, cfg.kinetics, cfg.dt, k);

    const auto rows = load_sweep(grid, cfg.materials, cfg.kinetics, cfg.circuit, state, loads,
                                 read_duration, cfg.dt, {}, cfg.threads);
    write_sweep_csv(args.out_dir + "/load_sweep.csv", rows, "r_load_ohm");
    std::cout << sweep_csv(rows, "r_load_ohm");
    return 0;
}

int cmd_oracle(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const auto checks = run_solver_oracles(cfg.materials, cfg.thickness);
    bool all = true;
    for (const auto& c : checks) {
        std::printf("%s %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
        all &= c.pass;
    }
    return all ? 0 : 4;
}

int cmd_report(const std::string& traces_path) {
    std::ifstream f(traces_path);
    if (!f) throw ConfigError("cannot open traces file '" + traces_path + "'");
    std::string line;
    if (!std::getline(f, line) ||
        line != "t_s,i_write_A,v_q_V,v_qprime_V,power_W,neckA_state,neckB_state")
        throw ConfigError("'" + traces_path + "' is not a pcsim traces CSV");

    struct Row {
        double t, i, vq, vqp, p;
        std::string a, b;
    };
    std::vector<Row> rows;
    while (std::getline(f, line)) {
        Row r;
        std::stringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        r.t = std::stod(tok);
        std::getline(ss, tok, ',');
        r.i = std::stod(tok);
        std::getline(ss, tok, ',');
        r.vq = std::stod(tok);
        std::getline(ss, tok, ',');
        r.vqp = std::stod(tok);
        std::getline(ss, tok, ',');
        r.p = std::stod(tok);
        std::getline(ss, r.a, ',');
        std::getline(ss, r.b, ',');
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("traces file has no samples");

    // contiguous active spans: write when i_write != 0, read when v_q or v_q' != 0
    enum class Span { none, write, read };
    Span cur = Span::none;
    double span_start = 0.0, energy = 0.0, prev_t = rows.front().t;
    double read_vq = 0.0, read_vqp = 0.0;
    int read_n = 0, writes = 0, reads = 0, toggles = 0;
    std::string last_amorph;
    std::printf("events:\n");
    auto close_span = [&](double t_end) {
        if (cur == Span::none) return;
        const double dur = t_end - span_start;
        if (cur == Span::write) {
            ++writes;
            std::printf("  write  t=%.3e s dur=%.2e s energy=%.3e J mean=%.3e W\n", span_start,
                        dur, energy, dur > 0 ? energy / dur : 0.0);
        } else {
            ++reads;
            const double vq = read_n ? read_vq / read_n : 0.0;
            const double vqp = read_n ? read_vqp / read_n : 0.0;
            const double hi = std::max(vq, vqp), lo = std::min(vq, vqp);
            const double ratio = lo > 0 ? hi / lo : 0.0;
            std::printf("  read   t=%.3e s v_q=%.3e V v_q'=%.3e V ratio=%.1f%s\n", span_start, vq,
                        vqp, ratio, ratio > 3.0 ? "" : " [indeterminate]");
        }
        cur = Span::none;
        energy = 0.0;
        read_vq = read_vqp = 0.0;
        read_n = 0;
    };
    for (const Row& r : rows) {
        const Span s = r.i != 0.0 ? Span::write
                       : (r.vq != 0.0 || r.vqp != 0.0) ? Span::read
                                                       : Span::none;
        if (s != cur) {
            close_span(prev_t);
            cur = s;
            span_start = prev_t;
        }
        if (cur == Span::write) energy += r.p * (r.t - prev_t);
        if (cur == Span::read) {
            read_vq += r.vq;
            read_vqp += r.vqp;
            ++read_n;
        }
        const std::string amorph = r.a == "amorphous" ? "A" : (r.b == "amorphous" ? "B" : "");
        if (!amorph.empty() && amorph != last_amorph) {
            if (!last_amorph.empty()) ++toggles;
            last_amorph = amorph;
        }
        prev_t = r.t;
    }
    close_span(prev_t);
    std::printf("summary: %d writes, %d reads, %d toggles, final neckA=%s neckB=%s\n", writes,
                reads, toggles, rows.back().a.c_str(), rows.back().b.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-change toggle device simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, sd_args, sl_args, oracle_args;
    std::vector<double> delays, loads;
    double read_duration = 0.0, cool_time = 2.5e-8;
    std::string traces_path = "out/traces.csv";

    CLI::App* c_run = app.add_subcommand("run", "run the configured pulse schedule");
    add_common(c_run, run_args);

    CLI::App* c_sd = app.add_subcommand("sweep-delay", "read-delay sweep from a post-write state");
    add_common(c_sd, sd_args);
    c_sd->add_option("--delays", delays, "read delays in seconds (ascending)")->delimiter(',');
    c_sd->add_option("--read-duration", read_duration, "read pulse width (s)");

    CLI::App* c_sl = app.add_subcommand("sweep-load", "load-resistor sweep from a cold state");
    add_common(c_sl, sl_args);
    c_sl->add_option("--values", loads, "load resistances in ohms")->delimiter(',');
    c_sl->add_option("--read-duration", read_duration, "read pulse width (s)");
    c_sl->add_option("--cool-time", cool_time, "idle time before the reads (s)")
        ->capture_default_str();

    CLI::App* c_or = app.add_subcommand("oracle", "run the analytic solver verification suite");
    add_common(c_or, oracle_args);

    CLI::App* c_rep = app.add_subcommand("report", "summarize a traces CSV");
    c_rep->add_option("--traces", traces_path, "traces.csv path")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(run_args);
        if (c_sd->parsed()) return cmd_sweep_delay(sd_args, delays, read_duration);
        if (c_sl->parsed()) return cmd_sweep_load(sl_args, loads, read_duration, cool_time);
        if (c_or->parsed()) return cmd_oracle(oracle_args);
        if (c_rep->parsed()) return cmd_report(traces_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
