#include "berrysim/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace berrysim {

ParameterPath build_field_path(const FieldSweepModel& m) {
    if (m.omega == 0.0) {
        throw ContractError("build_field_path: omega = 0 gives an open (static) path");
    }
    if (m.periods < 1) throw ContractError("build_field_path: periods must be >= 1");
    ParameterPath p;
    p.period_T = m.period();
    p.closed = true;
    p.coupling_g = m.mu;
    const double B0 = m.B0, b1 = m.b1, Bz = m.Bz, w = m.omega;
    p.sampler = [B0, b1, Bz, w](double t) {
        return std::array<double, 4>{0.0, B0 * (b1 + std::cos(w * t)), B0 * std::sin(w * t), Bz};
    };
    p.derivative = [B0, w](double t) {
        return std::array<double, 4>{0.0, -B0 * w * std::sin(w * t), B0 * w * std::cos(w * t), 0.0};
    };
    return p;
}

ParameterPath build_no_crossing_path(const NoCrossingModel& m) {
    if (m.delta_E <= 0.0) throw ContractError("build_no_crossing_path: delta_E must be positive");
    FieldSweepModel eq;
    eq.B0 = m.B0;
    eq.b1 = 0.0;
    eq.Bz = m.delta_E / (2.0 * m.g);
    eq.omega = m.omega;
    eq.mu = m.g;
    eq.periods = m.periods;
    return build_field_path(eq);
}

ParameterPath build_shrink_rotate_return_path(const ShrinkRotateReturnModel& m) {
    if (m.r_small < kDefaultRMin) {
        throw DegeneracyError(m.r_small, "shrink_rotate_return: r_small below degeneracy threshold");
    }
    const double fsum = m.fractions[0] + m.fractions[1] + m.fractions[2];
    const double t1 = m.T * m.fractions[0] / fsum;
    const double t2 = m.T * (m.fractions[0] + m.fractions[1]) / fsum;
    const double T = m.T;
    const double theta = m.theta, phi0 = m.phi, r0 = m.r_start, r1 = m.r_small;

    auto polar_at = [=](double t) -> std::array<double, 2> {  // (r, phi)
        if (t <= t1) {
            const double s = t1 > 0.0 ? t / t1 : 1.0;
            return {r0 + (r1 - r0) * s, phi0};
        }
        if (t <= t2) {
            const double s = (t - t1) / (t2 - t1);
            return {r1, phi0 + kTwoPi * s};
        }
        const double s = (T - t) > 0.0 ? (T - t) / (T - t2) : 0.0;
        return {r0 + (r1 - r0) * s, phi0 + kTwoPi};
    };
    auto polar_rate = [=](double t) -> std::array<double, 2> {  // (rdot, phidot)
        if (t < t1) return {(r1 - r0) / t1, 0.0};
        if (t < t2) return {0.0, kTwoPi / (t2 - t1)};
        return {(r0 - r1) / (T - t2), 0.0};
    };

    ParameterPath p;
    p.period_T = T;
    p.closed = true;
    p.coupling_g = m.g;
    p.breakpoints = {t1, t2};
    p.sampler = [=](double t) {
        const auto [r, phi] = polar_at(t);
        const double st = std::sin(theta);
        return std::array<double, 4>{0.0, r * st * std::cos(phi), r * st * std::sin(phi),
                                     r * std::cos(theta)};
    };
    p.derivative = [=](double t) {
        const auto [r, phi] = polar_at(t);
        const auto [rd, phid] = polar_rate(t);
        const double st = std::sin(theta), ct = std::cos(theta);
        const double cp = std::cos(phi), sp = std::sin(phi);
        return std::array<double, 4>{0.0, rd * st * cp - r * st * sp * phid,
                                     rd * st * sp + r * st * cp * phid, rd * ct};
    };
    return p;
}

ParameterPath build_custom_path(const CustomPolarModel& m) {
    if (m.r0 - std::abs(m.r_amp) < kDefaultRMin) {
        throw DegeneracyError(m.r0 - std::abs(m.r_amp), "custom path dips below r_min");
    }
    ParameterPath p;
    p.period_T = m.T;
    p.closed = true;
    p.coupling_g = m.g;
    const double w = kTwoPi / m.T;
    p.sampler = [m, w](double t) {
        const double r = m.r0 + m.r_amp * std::sin(w * t);
        const double th = m.theta0 + m.theta_amp * std::sin(w * t + m.phase);
        const double ph = kTwoPi * m.phi_winding * t / m.T;
        const double st = std::sin(th);
        return std::array<double, 4>{0.0, r * st * std::cos(ph), r * st * std::sin(ph),
                                     r * std::cos(th)};
    };
    p.derivative = [m, w](double t) {
        const double r = m.r0 + m.r_amp * std::sin(w * t);
        const double rd = m.r_amp * w * std::cos(w * t);
        const double th = m.theta0 + m.theta_amp * std::sin(w * t + m.phase);
        const double thd = m.theta_amp * w * std::cos(w * t + m.phase);
        const double ph = kTwoPi * m.phi_winding * t / m.T;
        const double phd = kTwoPi * m.phi_winding / m.T;
        const double st = std::sin(th), ct = std::cos(th);
        const double cp = std::cos(ph), sp = std::sin(ph);
        return std::array<double, 4>{
            0.0, rd * st * cp + r * ct * thd * cp - r * st * sp * phd,
            rd * st * sp + r * ct * thd * sp + r * st * cp * phd, rd * ct - r * st * thd};
    };
    return p;
}

ParameterPath build_path(const ScenarioSpec& spec) {
    switch (spec.kind) {
        case ScenarioKind::field_sweep: return build_field_path(spec.field_sweep);
        case ScenarioKind::no_crossing: return build_no_crossing_path(spec.no_crossing);
        case ScenarioKind::shrink_rotate_return: return build_shrink_rotate_return_path(spec.srr);
        case ScenarioKind::custom: return build_custom_path(spec.custom);
    }
    throw ContractError("build_path: unknown scenario kind");
}

SimulationOutput run_scenario(const ScenarioSpec& spec) {
    const ParameterPath path = build_path(spec);
    const EigenSystem es0 = eigensystem(
        TwoLevelHamiltonian{path.e0 + path.sample(0.0)[0], path.coupling_g, path.field_at(0.0)});
    SimulationOutput out;
    out.result = evolve_exact(path, es0.v_minus, spec.evolution);
    out.decomposition = decompose_phase(out.result, es0.v_minus);
    out.transition_probability = transition_probability(out.result, path);
    return out;
}

PhaseDecomposition scenario_shrink_rotate_return(const ShrinkRotateReturnModel& model,
                                                 const EvolutionConfig& cfg) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::shrink_rotate_return;
    spec.srr = model;
    spec.evolution = cfg;
    return run_scenario(spec).decomposition;
}

std::vector<SweepRecord> sweep_phase_map(const SweepGrid& grid, const FieldSweepModel& base,
                                         const EvolutionConfig& cfg, int threads) {
    if (grid.B0_values.empty() || grid.omega_values.empty()) {
        throw ContractError("sweep_phase_map: empty grid");
    }
    const size_t nb = grid.B0_values.size();
    const size_t nw = grid.omega_values.size();
    std::vector<SweepRecord> records(nb * nw);

    auto run_point = [&](size_t idx) {
        const size_t ib = idx / nw;
        const size_t iw = idx % nw;
        SweepRecord& rec = records[idx];
        rec.B0 = grid.B0_values[ib];
        rec.omega = grid.omega_values[iw];
        const auto start = std::chrono::steady_clock::now();
        try {
            ScenarioSpec spec;
            spec.kind = ScenarioKind::field_sweep;
            spec.field_sweep = base;
            spec.field_sweep.B0 = rec.B0;
            spec.field_sweep.omega = rec.omega;
            spec.evolution = cfg;
            const SimulationOutput out = run_scenario(spec);
            rec.adiabaticity_ratio = out.decomposition.adiabaticity_ratio;
            rec.geometric_phase = out.decomposition.geometric_phase;
            rec.cyclicity_fidelity = out.decomposition.cyclicity_fidelity;
            rec.transition_probability = out.transition_probability;
        } catch (const SimulationError& e) {
            rec.status = std::string("error: ") + e.what();
        }
        rec.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
    };

    const size_t total = nb * nw;
    if (threads <= 1) {
        for (size_t i = 0; i < total; ++i) run_point(i);
    } else {
        std::vector<std::thread> pool;
        const size_t nthreads = std::min<size_t>(threads, total);
        for (size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                for (size_t i = t; i < total; i += nthreads) run_point(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return records;
}

}  // namespace berrysim
