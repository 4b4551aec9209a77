#ifndef PCSIM_OUTPUT_HPP
#define PCSIM_OUTPUT_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "pcsim/errors.hpp"
#include "pcsim/experiments.hpp"
#include "pcsim/field_state.hpp"

namespace pcsim {

namespace iodetail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10e", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write file '" + path + "'");
    return f;
}

} // namespace iodetail

inline std::string traces_csv(const TraceSet& t) {
    std::string out = "t_s,i_write_A,v_q_V,v_qprime_V,power_W,neckA_state,neckB_state\n";
    for (const TraceSample& s : t.samples) {
        out += iodetail::fmt(s.t);
        out += ',';
        out += iodetail::fmt(s.i_write);
        out += ',';
        out += iodetail::fmt(s.v_q);
        out += ',';
        out += iodetail::fmt(s.v_qprime);
        out += ',';
        out += iodetail::fmt(s.power);
        out += ',';
        out += neck_class_name(s.neck_a);
        out += ',';
        out += neck_class_name(s.neck_b);
        out += '\n';
    }
    return out;
}

inline void write_traces_csv(const std::string& path, const TraceSet& t) {
    iodetail::open_out(path) << traces_csv(t);
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& x_name) {
    std::string out = x_name + ",v_high_V,v_low_V,ratio\n";
    for (const SweepRow& r : rows) {
        out += iodetail::fmt(r.x);
        out += ',';
        out += iodetail::fmt(r.v_high);
        out += ',';
        out += iodetail::fmt(r.v_low);
        out += ',';
        out += iodetail::fmt(r.ratio);
        out += '\n';
    }
    return out;
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                            const std::string& x_name) {
    iodetail::open_out(path) << sweep_csv(rows, x_name);
}

inline std::vector<double> snapshot_quantity(const DeviceGrid& g, const FieldState& s,
                                             const std::string& quantity) {
    std::vector<double> v(g.material.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (quantity == "T") v[i] = s.T[i];
        else if (quantity == "V") v[i] = s.V[i];
        else if (quantity == "cd1") v[i] = s.cd1[i];
        else if (quantity == "cd2") v[i] = s.cd2[i];
        else if (quantity == "cdnorm") v[i] = s.cd1[i] + s.cd2[i];
        else throw ConfigError("unknown snapshot quantity '" + quantity + "'");
    }
    return v;
}

// Plain-text field snapshot: "nx ny time quantity" header, then ny rows of nx
// values, row-major from y = 0.
inline void write_snapshot_text(const std::string& path, const DeviceGrid& g,
                                const FieldState& s, const std::string& quantity) {
    auto f = iodetail::open_out(path);
    f << g.nx << ' ' << g.ny << ' ' << iodetail::fmt(s.time) << ' ' << quantity << '\n';
    const std::vector<double> v = snapshot_quantity(g, s, quantity);
    for (int y = 0; y < g.ny; ++y) {
        for (int x = 0; x < g.nx; ++x) {
            if (x) f << ' ';
            f << iodetail::fmt(v[g.idx(x, y)]);
        }
        f << '\n';
    }
}

// 8-bit binary PGM, linearly scaled between the field extremes.
inline void write_snapshot_pgm(const std::string& path, const DeviceGrid& g, const FieldState& s,
                               const std::string& quantity) {
    const std::vector<double> v = snapshot_quantity(g, s, quantity);
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it, mx = *mx_it;
    const double scale = mx > mn ? 255.0 / (mx - mn) : 0.0;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write file '" + path + "'");
    f << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    for (int y = g.ny - 1; y >= 0; --y)
        for (int x = 0; x < g.nx; ++x) {
            const unsigned char px =
                static_cast<unsigned char>((v[g.idx(x, y)] - mn) * scale + 0.5);
            f.write(reinterpret_cast<const char*>(&px), 1);
        }
}

inline std::string energy_csv(const std::vector<EventEnergy>& events) {
    std::string out = "kind,start_s,duration_s,energy_J,mean_power_W\n";
    for (const EventEnergy& e : events) {
        out += event_kind_name(e.event.kind);
        out += ',';
        out += iodetail::fmt(e.event.start);
        out += ',';
        out += iodetail::fmt(e.event.duration);
        out += ',';
        out += iodetail::fmt(e.energy);
        out += ',';
        out += iodetail::fmt(e.mean_power);
        out += '\n';
    }
    return out;
}

} // namespace pcsim

#endif
