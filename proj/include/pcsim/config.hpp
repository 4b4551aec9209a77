#ifndef PCSIM_CONFIG_HPP
#define PCSIM_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pcsim/circuit.hpp"
#include "pcsim/errors.hpp"
#include "pcsim/experiments.hpp"
#include "pcsim/geometry.hpp"
#include "pcsim/kinetics.hpp"
#include "pcsim/materials.hpp"

namespace pcsim {

struct ScheduleConfig {
    int writes = 3;                 // write pulses including the initialization one
    double write_duration = 20e-9;  // s
    double read_delay = 25e-9;      // s after write end
    double read_duration = 5e-9;    // s
    double period = 60e-9;          // s between write starts
    std::string events;             // optional explicit list, overrides the generator

    // events syntax: "kind@start:duration" separated by commas,
    // e.g. "write@0:8e-9, read@5e-8:5e-9"
    PulseSchedule build() const {
        if (events.empty())
            return PulseSchedule::standard(writes, write_duration, read_delay, read_duration,
                                           period);
        PulseSchedule s;
        std::stringstream ss(events);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto at = item.find('@');
            const auto colon = item.find(':', at == std::string::npos ? 0 : at);
            if (at == std::string::npos || colon == std::string::npos)
                throw ConfigError("bad schedule event '" + item +
                                  "', expected kind@start:duration");
            auto trim = [](std::string v) {
                const auto b = v.find_first_not_of(" \t");
                const auto e = v.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
            };
            const std::string kind = trim(item.substr(0, at));
            PulseEvent ev;
            if (kind == "write") ev.kind = PulseEvent::Kind::write;
            else if (kind == "read") ev.kind = PulseEvent::Kind::read;
            else if (kind == "idle") ev.kind = PulseEvent::Kind::idle;
            else throw ConfigError("unknown schedule event kind '" + kind + "'");
            try {
                ev.start = std::stod(item.substr(at + 1, colon - at - 1));
                ev.duration = std::stod(item.substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigError("bad number in schedule event '" + item + "'");
            }
            s.events.push_back(ev);
        }
        s.validate();
        return s;
    }
};

struct OutputConfig {
    std::string snapshot_quantities = "T,cdnorm"; // subset of T,V,cd1,cd2,cdnorm
    bool snapshot_pgm = true;
};

// Full run description, parsed from the sectioned key = value config format.
struct RunConfig {
    std::uint64_t seed = 12345;
    bool deterministic = true;
    double dt = 1e-11;      // s
    int snapshot_every = 0; // steps; 0 disables
    int threads = 1;

    MaterialTable materials;
    GeometrySpec geometry;
    double dx = 1e-9;
    double thickness = 20e-9;
    double t_ambient = 300.0;
    KineticsParams kinetics;
    CircuitConfig circuit;
    ScheduleConfig schedule;
    OutputConfig output;

    DeviceGrid build_device() const { return build_grid(geometry, dx, thickness, t_ambient); }
    void validate() const;
};

namespace cfgdetail {

struct Key {
    std::string section, name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + s + "' is not a number");
    }
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': '" + s + "' is not a boolean");
}

inline const std::vector<Key>& key_table() {
    static const std::vector<Key> table = [] {
        std::vector<Key> t;
        auto dbl = [&t](const std::string& sec, const std::string& name, auto member) {
            t.push_back({sec, name,
                         [member](const RunConfig& c) { return fmt_double(member(const_cast<RunConfig&>(c))); },
                         [member, sec, name](RunConfig& c, const std::string& v) {
                             member(c) = parse_double(v, "[" + sec + "] " + name);
                         }});
        };
        auto integer = [&t](const std::string& sec, const std::string& name, auto member) {
            t.push_back({sec, name,
                         [member](const RunConfig& c) {
                             return std::to_string(member(const_cast<RunConfig&>(c)));
                         },
                         [member, sec, name](RunConfig& c, const std::string& v) {
                             using T = std::remove_reference_t<decltype(member(c))>;
                             member(c) = static_cast<T>(parse_double(v, "[" + sec + "] " + name));
                         }});
        };
        auto boolean = [&t](const std::string& sec, const std::string& name, auto member) {
            t.push_back({sec, name,
                         [member](const RunConfig& c) {
                             return member(const_cast<RunConfig&>(c)) ? std::string("true")
                                                                      : std::string("false");
                         },
                         [member, sec, name](RunConfig& c, const std::string& v) {
                             member(c) = parse_bool(v, "[" + sec + "] " + name);
                         }});
        };
        auto text = [&t](const std::string& sec, const std::string& name, auto member) {
            t.push_back({sec, name,
                         [member](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); },
                         [member](RunConfig& c, const std::string& v) { member(c) = v; }});
        };

        integer("", "seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; });
        boolean("", "deterministic", [](RunConfig& c) -> bool& { return c.deterministic; });
        dbl("", "dt", [](RunConfig& c) -> double& { return c.dt; });
        integer("", "snapshot_every", [](RunConfig& c) -> int& { return c.snapshot_every; });
        integer("", "threads", [](RunConfig& c) -> int& { return c.threads; });

        dbl("materials", "sigma_amorphous",
            [](RunConfig& c) -> double& { return c.materials.amorphous.sigma_ref; });
        dbl("materials", "sigma_crystalline",
            [](RunConfig& c) -> double& { return c.materials.crystalline.sigma_ref; });
        dbl("materials", "sigma_molten",
            [](RunConfig& c) -> double& { return c.materials.molten.sigma_ref; });
        dbl("materials", "ea_amorphous",
            [](RunConfig& c) -> double& { return c.materials.amorphous.activation_energy; });
        dbl("materials", "ea_crystalline",
            [](RunConfig& c) -> double& { return c.materials.crystalline.activation_energy; });
        dbl("materials", "kappa_amorphous",
            [](RunConfig& c) -> double& { return c.materials.amorphous.kappa; });
        dbl("materials", "kappa_crystalline",
            [](RunConfig& c) -> double& { return c.materials.crystalline.kappa; });
        dbl("materials", "kappa_molten",
            [](RunConfig& c) -> double& { return c.materials.molten.kappa; });
        dbl("materials", "c_vol_amorphous",
            [](RunConfig& c) -> double& { return c.materials.amorphous.c_vol; });
        dbl("materials", "c_vol_crystalline",
            [](RunConfig& c) -> double& { return c.materials.crystalline.c_vol; });
        dbl("materials", "c_vol_molten",
            [](RunConfig& c) -> double& { return c.materials.molten.c_vol; });
        dbl("materials", "t_ref", [](RunConfig& c) -> double& { return c.materials.t_ref; });
        dbl("materials", "t_melt", [](RunConfig& c) -> double& { return c.materials.t_melt; });
        dbl("materials", "t_crys", [](RunConfig& c) -> double& { return c.materials.t_crys; });
        dbl("materials", "latent_heat",
            [](RunConfig& c) -> double& { return c.materials.latent_heat; });
        dbl("materials", "latent_window",
            [](RunConfig& c) -> double& { return c.materials.latent_window; });
        dbl("materials", "growth_prefactor",
            [](RunConfig& c) -> double& { return c.materials.growth_prefactor; });
        dbl("materials", "growth_activation",
            [](RunConfig& c) -> double& { return c.materials.growth_activation; });
        dbl("materials", "nucleation_prefactor",
            [](RunConfig& c) -> double& { return c.materials.nucleation_prefactor; });
        dbl("materials", "nucleation_activation",
            [](RunConfig& c) -> double& { return c.materials.nucleation_activation; });
        dbl("materials", "electrode_sigma",
            [](RunConfig& c) -> double& { return c.materials.electrode_sigma; });
        dbl("materials", "electrode_kappa",
            [](RunConfig& c) -> double& { return c.materials.electrode_kappa; });
        dbl("materials", "insulator_kappa",
            [](RunConfig& c) -> double& { return c.materials.insulator_kappa; });

        dbl("geometry", "dx", [](RunConfig& c) -> double& { return c.dx; });
        dbl("geometry", "thickness", [](RunConfig& c) -> double& { return c.thickness; });
        dbl("geometry", "t_ambient", [](RunConfig& c) -> double& { return c.t_ambient; });
        dbl("geometry", "neck_width",
            [](RunConfig& c) -> double& { return c.geometry.neck_width; });
        dbl("geometry", "neck_length",
            [](RunConfig& c) -> double& { return c.geometry.neck_length; });
        dbl("geometry", "neck_separation",
            [](RunConfig& c) -> double& { return c.geometry.neck_separation; });
        dbl("geometry", "waist_width",
            [](RunConfig& c) -> double& { return c.geometry.waist_width; });
        dbl("geometry", "waist_length",
            [](RunConfig& c) -> double& { return c.geometry.waist_length; });
        dbl("geometry", "electrode_thickness",
            [](RunConfig& c) -> double& { return c.geometry.electrode_thickness; });
        dbl("geometry", "island_overhang",
            [](RunConfig& c) -> double& { return c.geometry.island_overhang; });
        dbl("geometry", "side_margin",
            [](RunConfig& c) -> double& { return c.geometry.side_margin; });
        dbl("geometry", "anchor_margin",
            [](RunConfig& c) -> double& { return c.geometry.anchor_margin; });
        dbl("geometry", "asymmetry_factor",
            [](RunConfig& c) -> double& { return c.geometry.asymmetry_factor; });

        dbl("kinetics", "melt_time_constant",
            [](RunConfig& c) -> double& { return c.kinetics.melt_time_constant; });
        dbl("kinetics", "nucleus_cd",
            [](RunConfig& c) -> double& { return c.kinetics.nucleus_cd; });

        dbl("circuit", "v_write_supply",
            [](RunConfig& c) -> double& { return c.circuit.v_write_supply; });
        dbl("circuit", "v_gate_write",
            [](RunConfig& c) -> double& { return c.circuit.v_gate_write; });
        dbl("circuit", "v_gate_read",
            [](RunConfig& c) -> double& { return c.circuit.v_gate_read; });
        dbl("circuit", "v_read_supply",
            [](RunConfig& c) -> double& { return c.circuit.v_read_supply; });
        dbl("circuit", "r_load", [](RunConfig& c) -> double& { return c.circuit.r_load; });
        dbl("circuit", "write_vt",
            [](RunConfig& c) -> double& { return c.circuit.write_fet.v_threshold; });
        dbl("circuit", "write_k",
            [](RunConfig& c) -> double& { return c.circuit.write_fet.transconductance; });
        dbl("circuit", "read_vt",
            [](RunConfig& c) -> double& { return c.circuit.read_fet.v_threshold; });
        dbl("circuit", "read_k",
            [](RunConfig& c) -> double& { return c.circuit.read_fet.transconductance; });

        integer("schedule", "writes", [](RunConfig& c) -> int& { return c.schedule.writes; });
        dbl("schedule", "write_duration",
            [](RunConfig& c) -> double& { return c.schedule.write_duration; });
        dbl("schedule", "read_delay",
            [](RunConfig& c) -> double& { return c.schedule.read_delay; });
        dbl("schedule", "read_duration",
            [](RunConfig& c) -> double& { return c.schedule.read_duration; });
        dbl("schedule", "period", [](RunConfig& c) -> double& { return c.schedule.period; });
        text("schedule", "events",
             [](RunConfig& c) -> std::string& { return c.schedule.events; });

        text("output", "snapshot_quantities",
             [](RunConfig& c) -> std::string& { return c.output.snapshot_quantities; });
        boolean("output", "snapshot_pgm",
                [](RunConfig& c) -> bool& { return c.output.snapshot_pgm; });
        return t;
    }();
    return table;
}

inline const Key* find_key(const std::string& section, const std::string& name) {
    for (const Key& k : key_table())
        if (k.section == section && k.name == name) return &k;
    return nullptr;
}

} // namespace cfgdetail

inline void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("invalid value for " + what);
    };
    require(dt > 0.0, "dt");
    require(threads >= 1, "threads");
    require(snapshot_every >= 0, "snapshot_every");
    try {
        materials.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("[materials] ") + e.what());
    }
    require(dx > 0.0, "[geometry] dx");
    require(thickness > 0.0, "[geometry] thickness");
    require(t_ambient > 0.0, "[geometry] t_ambient");
    require(geometry.asymmetry_factor >= 0.0 && geometry.asymmetry_factor <= 0.05,
            "[geometry] asymmetry_factor");
    require(geometry.neck_separation > geometry.neck_width, "[geometry] neck_separation");
    try {
        kinetics.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("[kinetics] ") + e.what());
    }
    require(circuit.r_load > 0.0, "[circuit] r_load");
    try {
        circuit.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("[circuit] ") + e.what());
    }
    require(schedule.writes >= 0, "[schedule] writes");
    require(schedule.write_duration > 0.0, "[schedule] write_duration");
    require(schedule.read_duration >= 0.0, "[schedule] read_duration");
    require(schedule.period >=
                schedule.write_duration + schedule.read_delay + schedule.read_duration,
            "[schedule] period (must fit write + read_delay + read_duration)");
    schedule.build();
    std::stringstream qs(output.snapshot_quantities);
    std::string q;
    while (std::getline(qs, q, ',')) {
        if (q != "T" && q != "V" && q != "cd1" && q != "cd2" && q != "cdnorm")
            throw ConfigError("[output] snapshot_quantities: unknown quantity '" + q + "'");
    }
}

// Parses the line-oriented config: '#' comments, [section] headers,
// key = value pairs. Unknown keys are rejected by name, syntax errors report
// the line number, omitted keys keep their documented defaults.
inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& k : cfgdetail::key_table()) known |= (k.section == section);
            if (!known)
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const cfgdetail::Key* k = cfgdetail::find_key(section, key);
        if (!k) {
            const std::string where = section.empty() ? key : "[" + section + "] " + key;
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + where);
        }
        try {
            k->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

// Canonical echo of the effective configuration: every key with its value,
// grouped by section. parse(echo(parse(f))) == parse(f).
inline std::string echo_config(const RunConfig& cfg) {
    std::ostringstream os;
    std::string current = "\x01"; // force the first (global) group header check
    for (const auto& k : cfgdetail::key_table()) {
        if (k.section != current) {
            if (!k.section.empty()) os << "\n[" << k.section << "]\n";
            current = k.section;
        }
        os << k.name << " = " << k.get(cfg) << "\n";
    }
    return os.str();
}

// CLI-style override "section.key=value" or "key=value" for global keys.
inline void apply_override(RunConfig& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + spec + "' must look like section.key=value");
    std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    std::string section, key;
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        key = path;
    } else {
        section = path.substr(0, dot);
        key = path.substr(dot + 1);
    }
    const cfgdetail::Key* k = cfgdetail::find_key(section, key);
    if (!k) throw ConfigError("override: unknown key '" + path + "'");
    k->set(cfg, value);
    cfg.validate();
}

} // namespace pcsim

#endif
