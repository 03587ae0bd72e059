#include "berrysim/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace berrysim {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

const json& require_key(const json& j, const std::string& key) {
    if (!j.contains(key)) throw SchemaError(key, "missing required key '" + key + "'");
    return j.at(key);
}

double require_number(const json& j, const std::string& key) {
    const json& v = require_key(j, key);
    if (!v.is_number()) throw SchemaError(key, "key '" + key + "' must be a number");
    return v.get<double>();
}

double optional_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw SchemaError(key, "key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

int optional_int(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw SchemaError(key, "key '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

Integrator parse_integrator(const std::string& name, const std::string& key) {
    if (name == "midpoint_exponential") return Integrator::midpoint_exponential;
    if (name == "rk_adaptive") return Integrator::rk_adaptive;
    throw SchemaError(key, "key '" + key + "' must be 'midpoint_exponential' or 'rk_adaptive'");
}

EvolutionConfig parse_evolution(const json& root, double hbar) {
    EvolutionConfig cfg;
    cfg.hbar = hbar;
    if (!root.contains("evolution")) return cfg;
    const json& e = root.at("evolution");
    cfg.rel_tol = optional_number(e, "rel_tol", cfg.rel_tol);
    cfg.abs_tol = optional_number(e, "abs_tol", cfg.abs_tol);
    cfg.max_step = optional_number(e, "max_step", cfg.max_step);
    if (e.contains("integrator")) {
        if (!e.at("integrator").is_string()) {
            throw SchemaError("evolution.integrator", "key 'evolution.integrator' must be a string");
        }
        cfg.integrator = parse_integrator(e.at("integrator").get<std::string>(),
                                          "evolution.integrator");
    }
    if (cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0) {
        throw SchemaError("evolution.rel_tol", "tolerances must be positive");
    }
    return cfg;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("(document)", std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

ScenarioSpec parse_scenario_json(const std::string& text) {
    const json j = parse_text(text);
    ScenarioSpec spec;
    const double hbar = require_number(j, "hbar");
    if (hbar <= 0.0) throw SchemaError("hbar", "key 'hbar' must be positive");
    spec.evolution = parse_evolution(j, hbar);

    const json& kind = require_key(j, "kind");
    if (!kind.is_string()) throw SchemaError("kind", "key 'kind' must be a string");
    const std::string k = kind.get<std::string>();
    const json& m = require_key(j, "model");

    if (k == "field_sweep") {
        spec.kind = ScenarioKind::field_sweep;
        spec.field_sweep.B0 = require_number(m, "B0");
        spec.field_sweep.omega = require_number(m, "omega");
        spec.field_sweep.mu = require_number(m, "mu");
        spec.field_sweep.b1 = optional_number(m, "b1", 0.0);
        spec.field_sweep.Bz = optional_number(m, "Bz", 0.0);
        spec.field_sweep.periods = optional_int(m, "periods", 1);
    } else if (k == "no_crossing") {
        spec.kind = ScenarioKind::no_crossing;
        spec.no_crossing.delta_E = require_number(m, "delta_E");
        spec.no_crossing.g = require_number(m, "g");
        spec.no_crossing.B0 = require_number(m, "B0");
        spec.no_crossing.omega = require_number(m, "omega");
        spec.no_crossing.periods = optional_int(m, "periods", 1);
    } else if (k == "shrink_rotate_return") {
        spec.kind = ScenarioKind::shrink_rotate_return;
        spec.srr.theta = require_number(m, "theta");
        spec.srr.phi = optional_number(m, "phi", 0.0);
        spec.srr.r_start = require_number(m, "r_start");
        spec.srr.r_small = require_number(m, "r_small");
        spec.srr.g = require_number(m, "g");
        spec.srr.T = require_number(m, "T");
        if (m.contains("fractions")) {
            const json& f = m.at("fractions");
            if (!f.is_array() || f.size() != 3) {
                throw SchemaError("model.fractions", "key 'model.fractions' must be an array of 3 numbers");
            }
            for (int i = 0; i < 3; ++i) spec.srr.fractions[i] = f.at(i).get<double>();
        }
    } else if (k == "custom") {
        spec.kind = ScenarioKind::custom;
        spec.custom.r0 = require_number(m, "r0");
        spec.custom.theta0 = require_number(m, "theta0");
        spec.custom.T = require_number(m, "T");
        spec.custom.g = require_number(m, "g");
        spec.custom.r_amp = optional_number(m, "r_amp", 0.0);
        spec.custom.theta_amp = optional_number(m, "theta_amp", 0.0);
        spec.custom.phase = optional_number(m, "phase", 0.0);
        spec.custom.phi_winding = optional_int(m, "phi_winding", 1);
    } else {
        throw SchemaError("kind", "unknown scenario kind '" + k + "'");
    }
    return spec;
}

SweepSpec parse_sweep_json(const std::string& text) {
    const json j = parse_text(text);
    SweepSpec spec;
    const double hbar = require_number(j, "hbar");
    if (hbar <= 0.0) throw SchemaError("hbar", "key 'hbar' must be positive");
    spec.evolution = parse_evolution(j, hbar);

    const json& base = require_key(j, "base");
    spec.base.mu = require_number(base, "mu");
    spec.base.b1 = optional_number(base, "b1", 0.0);
    spec.base.Bz = optional_number(base, "Bz", 0.0);
    spec.base.periods = optional_int(base, "periods", 1);

    const json& grid = require_key(j, "grid");
    for (const char* axis : {"B0", "omega"}) {
        const json& arr = require_key(grid, axis);
        if (!arr.is_array() || arr.empty()) {
            throw SchemaError(std::string("grid.") + axis,
                              std::string("key 'grid.") + axis + "' must be a nonempty array");
        }
        auto& dst = std::string(axis) == "B0" ? spec.grid.B0_values : spec.grid.omega_values;
        for (const auto& v : arr) {
            if (!v.is_number()) {
                throw SchemaError(std::string("grid.") + axis,
                                  std::string("key 'grid.") + axis + "' must contain numbers");
            }
            dst.push_back(v.get<double>());
        }
    }
    return spec;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                     bool with_timestamp) {
    out << "# schema=1\n";
    if (with_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated=" << buf << "\n";
    }
    out << "B0,omega,adiabaticity_ratio,geometric_phase,cyclicity_fidelity,"
           "transition_probability,runtime_ms,status\n";
    for (const auto& r : records) {
        out << fmt(r.B0) << ',' << fmt(r.omega) << ',' << fmt(r.adiabaticity_ratio) << ','
            << fmt(r.geometric_phase) << ',' << fmt(r.cyclicity_fidelity) << ','
            << fmt(r.transition_probability) << ',' << fmt(with_timestamp ? r.runtime_ms : 0.0)
            << ',' << csv_quote(r.status) << '\n';
    }
}

namespace {

const char* kUsage =
    "usage: berrysim <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  simulate <scenario.json>        one run, prints the phase decomposition as JSON\n"
    "  sweep <sweep.json>              (B0, omega) grid scan, emits CSV\n"
    "  connection-check <scenario.json>  analytic vs numeric connection table (CSV)\n"
    "  scenario shrink-rotate-return   three-segment cycle from flags\n"
    "\n"
    "common options:\n"
    "  --tolerance X      relative tolerance (abs_tol = X/100)\n"
    "  --integrator NAME  midpoint_exponential | rk_adaptive\n"
    "  --trajectory PATH  dump the accepted-step trajectory as CSV\n"
    "  --no-timestamp     byte-deterministic output (no timestamp, runtime zeroed)\n"
    "  --threads N        sweep worker threads\n"
    "  --output PATH      write CSV to a file instead of stdout\n";

struct CliOptions {
    double tolerance = -1.0;
    std::string integrator;
    std::string trajectory;
    std::string output;
    bool no_timestamp = false;
    int threads = 1;
    int samples = 32;
    // shrink-rotate-return flags
    double theta = kPi / 2.0, phi = 0.0, r_start = 1.0, r_small = 1e-3, g = 1.0, T = 1.0,
           hbar = 1.0;
    std::array<double, 3> splits{0.25, 0.5, 0.25};
    std::vector<std::string> positional;
};

bool parse_flag(const std::vector<std::string>& args, size_t& i, const std::string& name,
                std::string& value) {
    if (args[i] != name) return false;
    if (i + 1 >= args.size()) throw SchemaError(name, "flag " + name + " needs a value");
    value = args[++i];
    return true;
}

CliOptions parse_options(const std::vector<std::string>& args, size_t start) {
    CliOptions o;
    std::string v;
    for (size_t i = start; i < args.size(); ++i) {
        if (args[i] == "--no-timestamp") {
            o.no_timestamp = true;
        } else if (parse_flag(args, i, "--tolerance", v)) {
            o.tolerance = std::stod(v);
        } else if (parse_flag(args, i, "--integrator", v)) {
            o.integrator = v;
        } else if (parse_flag(args, i, "--trajectory", v)) {
            o.trajectory = v;
        } else if (parse_flag(args, i, "--output", v)) {
            o.output = v;
        } else if (parse_flag(args, i, "--threads", v)) {
            o.threads = std::stoi(v);
        } else if (parse_flag(args, i, "--samples", v)) {
            o.samples = std::stoi(v);
        } else if (parse_flag(args, i, "--theta", v)) {
            o.theta = std::stod(v);
        } else if (parse_flag(args, i, "--phi", v)) {
            o.phi = std::stod(v);
        } else if (parse_flag(args, i, "--r-start", v)) {
            o.r_start = std::stod(v);
        } else if (parse_flag(args, i, "--r-small", v)) {
            o.r_small = std::stod(v);
        } else if (parse_flag(args, i, "--g", v)) {
            o.g = std::stod(v);
        } else if (parse_flag(args, i, "--period", v)) {
            o.T = std::stod(v);
        } else if (parse_flag(args, i, "--hbar", v)) {
            o.hbar = std::stod(v);
        } else if (parse_flag(args, i, "--splits", v)) {
            std::stringstream ss(v);
            std::string tok;
            for (int k = 0; k < 3; ++k) {
                if (!std::getline(ss, tok, ',')) {
                    throw SchemaError("--splits", "--splits needs three comma-separated fractions");
                }
                o.splits[k] = std::stod(tok);
            }
        } else if (args[i].rfind("--", 0) == 0) {
            throw SchemaError(args[i], "unknown option " + args[i]);
        } else {
            o.positional.push_back(args[i]);
        }
    }
    return o;
}

void apply_overrides(EvolutionConfig& cfg, const CliOptions& o) {
    if (o.tolerance > 0.0) {
        cfg.rel_tol = o.tolerance;
        cfg.abs_tol = o.tolerance / 100.0;
    }
    if (!o.integrator.empty()) {
        cfg.integrator = parse_integrator(o.integrator, "--integrator");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path, "cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_trajectory_csv(const std::string& path, const EvolutionResult& result) {
    std::ofstream out(path);
    if (!out) throw SchemaError(path, "cannot open trajectory file '" + path + "'");
    out << "t,re_upper,im_upper,re_lower,im_lower,norm,instantaneous_E_plus,"
           "instantaneous_E_minus\n";
    for (const auto& s : result.trajectory) {
        out << fmt(s.t) << ',' << fmt(s.psi.upper.real()) << ',' << fmt(s.psi.upper.imag()) << ','
            << fmt(s.psi.lower.real()) << ',' << fmt(s.psi.lower.imag()) << ','
            << fmt(s.psi.norm()) << ',' << fmt(s.e_plus) << ',' << fmt(s.e_minus) << '\n';
    }
}

json decomposition_json(const SimulationOutput& out) {
    return json{{"total_phase", out.decomposition.total_phase},
                {"dynamical_phase", out.decomposition.dynamical_phase},
                {"geometric_phase", out.decomposition.geometric_phase},
                {"cyclicity_fidelity", out.decomposition.cyclicity_fidelity},
                {"adiabaticity_ratio", out.decomposition.adiabaticity_ratio},
                {"low_fidelity", out.decomposition.low_fidelity},
                {"transition_probability", out.transition_probability},
                {"norm_drift", out.result.norm_drift},
                {"steps", out.result.steps},
                {"phase_branch", "(-pi, pi]"}};
}

int cmd_simulate(const CliOptions& o, std::ostream& out) {
    if (o.positional.size() != 1) {
        throw SchemaError("scenario", "simulate needs exactly one scenario file");
    }
    ScenarioSpec spec = parse_scenario_json(read_file(o.positional[0]));
    apply_overrides(spec.evolution, o);
    spec.evolution.record_trajectory = !o.trajectory.empty();
    const SimulationOutput result = run_scenario(spec);
    if (!o.trajectory.empty()) write_trajectory_csv(o.trajectory, result.result);
    out << decomposition_json(result).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const CliOptions& o, std::ostream& out) {
    if (o.positional.size() != 1) {
        throw SchemaError("sweep", "sweep needs exactly one sweep file");
    }
    SweepSpec spec = parse_sweep_json(read_file(o.positional[0]));
    apply_overrides(spec.evolution, o);
    const auto records = sweep_phase_map(spec.grid, spec.base, spec.evolution, o.threads);
    if (!o.output.empty()) {
        std::ofstream f(o.output);
        if (!f) throw SchemaError(o.output, "cannot open output file '" + o.output + "'");
        write_sweep_csv(f, records, !o.no_timestamp);
    } else {
        write_sweep_csv(out, records, !o.no_timestamp);
    }
    return 0;
}

int cmd_connection_check(const CliOptions& o, std::ostream& out) {
    if (o.positional.size() != 1) {
        throw SchemaError("scenario", "connection-check needs exactly one scenario file");
    }
    ScenarioSpec spec = parse_scenario_json(read_file(o.positional[0]));
    apply_overrides(spec.evolution, o);
    const ParameterPath path = build_path(spec);
    const double dt = path.period_T * 1e-5;
    out << "t,entry,analytic_re,analytic_im,numeric_re,numeric_im,abs_err\n";
    const int n = std::max(o.samples, 1);
    for (int i = 0; i < n; ++i) {
        const double t = path.period_T * (i + 0.5) / n;
        const AngularRates a = angular_rates(path, t);
        const ConnectionMatrix ana = connection_analytic(a.theta, a.theta_dot, a.phi_dot);
        const ConnectionMatrix num = connection_numeric(path, t, dt);
        const std::pair<const char*, std::pair<Complex, Complex>> rows[] = {
            {"pp", {ana.pp, num.pp}},
            {"pm", {ana.pm, num.pm}},
            {"mp", {ana.mp, num.mp}},
            {"mm", {ana.mm, num.mm}}};
        for (const auto& [name, pair] : rows) {
            out << fmt(t) << ',' << name << ',' << fmt(pair.first.real()) << ','
                << fmt(pair.first.imag()) << ',' << fmt(pair.second.real()) << ','
                << fmt(pair.second.imag()) << ',' << fmt(std::abs(pair.first - pair.second))
                << '\n';
        }
    }
    return 0;
}

int cmd_scenario(const CliOptions& o, std::ostream& out) {
    if (o.positional.size() != 1 || o.positional[0] != "shrink-rotate-return") {
        throw SchemaError("scenario", "scenario subcommand: expected 'shrink-rotate-return'");
    }
    ScenarioSpec spec;
    spec.kind = ScenarioKind::shrink_rotate_return;
    spec.srr = {o.theta, o.phi, o.r_start, o.r_small, o.g, o.T, o.splits};
    spec.evolution.hbar = o.hbar;
    apply_overrides(spec.evolution, o);
    const SimulationOutput result = run_scenario(spec);
    out << decomposition_json(result).dump(2) << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        (args.empty() ? err : out) << kUsage;
        return args.empty() ? 2 : 0;
    }
    const std::string& cmd = args[0];
    try {
        const CliOptions o = parse_options(args, 1);
        if (cmd == "simulate") return cmd_simulate(o, out);
        if (cmd == "sweep") return cmd_sweep(o, out);
        if (cmd == "connection-check") return cmd_connection_check(o, out);
        if (cmd == "scenario") return cmd_scenario(o, out);
        err << "unknown subcommand '" << cmd << "'\n" << kUsage;
        return 2;
    } catch (const SchemaError& e) {
        err << "config error at '" << e.key << "': " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "config error: bad numeric argument (" << e.what() << ")\n";
        return 2;
    }
}

}  // namespace berrysim
