#pragma once

#include <string>
#include <vector>

#include "berrysim/phases.hpp"

namespace berrysim {

/// Rotating-field drive (y1, y2, y3) = (B0 (b1 + cos wt), B0 sin wt, Bz), g = mu.
struct FieldSweepModel {
    double B0 = 1.0;
    double b1 = 0.0;
    double Bz = 0.0;
    double omega = 1.0;
    double mu = 1.0;
    int periods = 1;

    double period() const { return kTwoPi * periods / omega; }
};

/// Level-spacing-floor model: y3 pinned at delta_E / (2 g), transverse circle
/// of radius B0.
struct NoCrossingModel {
    double delta_E = 1.0;
    double g = 1.0;
    double B0 = 1.0;
    double omega = 1.0;
    int periods = 1;
};

/// Three-segment cycle: shrink r at fixed angles, rotate phi by 2pi at
/// r_small, return to the original radius.  Segment durations are fractions
/// of the total period.
struct ShrinkRotateReturnModel {
    double theta = kPi / 2.0;
    double phi = 0.0;
    double r_start = 1.0;
    double r_small = 1e-3;
    double g = 1.0;
    double T = 1.0;
    std::array<double, 3> fractions{0.25, 0.5, 0.25};
};

/// Smooth closed loop given directly in polar coordinates.
struct CustomPolarModel {
    double r0 = 1.0;
    double r_amp = 0.0;
    double theta0 = kPi / 2.0;
    double theta_amp = 0.0;
    double phase = 0.0;
    double T = 1.0;
    double g = 1.0;
    int phi_winding = 1;
};

enum class ScenarioKind { field_sweep, no_crossing, shrink_rotate_return, custom };

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::field_sweep;
    FieldSweepModel field_sweep{};
    NoCrossingModel no_crossing{};
    ShrinkRotateReturnModel srr{};
    CustomPolarModel custom{};
    EvolutionConfig evolution{};
};

ParameterPath build_field_path(const FieldSweepModel& model);
ParameterPath build_no_crossing_path(const NoCrossingModel& model);
ParameterPath build_shrink_rotate_return_path(const ShrinkRotateReturnModel& model);
ParameterPath build_custom_path(const CustomPolarModel& model);
ParameterPath build_path(const ScenarioSpec& spec);

struct SimulationOutput {
    PhaseDecomposition decomposition;
    EvolutionResult result;
    double transition_probability = 0.0;
};

/// Evolve v_minus(y(0)) around the scenario's path and decompose the phase.
SimulationOutput run_scenario(const ScenarioSpec& spec);

/// Build, evolve exactly, decompose.  Convenience wrapper over the three-
/// segment path.
PhaseDecomposition scenario_shrink_rotate_return(const ShrinkRotateReturnModel& model,
                                                 const EvolutionConfig& cfg);

struct SweepRecord {
    double B0 = 0.0;
    double omega = 0.0;
    double adiabaticity_ratio = 0.0;
    double geometric_phase = 0.0;
    double cyclicity_fidelity = 0.0;
    double transition_probability = 0.0;
    double runtime_ms = 0.0;
    std::string status = "ok";
};

struct SweepGrid {
    std::vector<double> B0_values;
    std::vector<double> omega_values;
};

/// One record per grid point, ordered by (B0 index, omega index) regardless
/// of execution order.  Point failures land in the status column; the sweep
/// never aborts.
std::vector<SweepRecord> sweep_phase_map(const SweepGrid& grid, const FieldSweepModel& base,
                                         const EvolutionConfig& cfg, int threads = 1);

}  // namespace berrysim
