#pragma once

#include <utility>
#include <vector>

#include "berrysim/connection.hpp"
#include "berrysim/core_model.hpp"

namespace berrysim {

enum class Integrator { midpoint_exponential, rk_adaptive };
enum class Basis { original, b, c };
enum class Level { plus, minus };

struct EvolutionConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 -> period_T/64; clamped to period_T/16
    Integrator integrator = Integrator::midpoint_exponential;
    double hbar = 1.0;
    bool adaptive = true;   // false: uniform steps of max_step (order measurements)
    bool record_trajectory = false;
};

struct TrajectorySample {
    double t;
    Spinor psi;
    double e_plus, e_minus;
};

struct EvolutionResult {
    Spinor final_state;               // amplitudes in `basis`
    double dynamical_integral = 0.0;  // (1/hbar) int <psi|H_basis|psi> dt
    double norm_drift = 0.0;
    long steps = 0;
    Basis basis = Basis::original;
    bool path_closed = true;
    double period_T = 0.0;
    double coupling_g = 0.0;
    double min_field_radius = 0.0;
    double hbar = 1.0;
    std::vector<TrajectorySample> trajectory;
};

struct BBasisOptions {
    bool include_offdiagonal = true;  // false: conventional adiabatic truncation
};

struct CBasisOptions {
    // near-crossing truncations: first drops the -g r sin(theta) coupling,
    // second additionally drops the +- g r cos(theta) diagonal terms
    bool drop_transverse_coupling = false;
    bool drop_all_coupling = false;
};

/// Integrate i hbar dpsi/dt = h(t) psi in the fixed original basis.
EvolutionResult evolve_exact(const ParameterPath& path, const Spinor& psi0,
                             const EvolutionConfig& cfg);

/// Integrate the instantaneous-eigenframe equation with diagonal energies
/// E+- and the full connection term (off-diagonals included by default).
EvolutionResult evolve_effective_b(const ParameterPath& path, const Spinor& coeffs0,
                                   const EvolutionConfig& cfg, const BBasisOptions& opts = {});

/// Integrate the theta-rotated frame in which the geometric term is diagonal:
/// diagonal s +- g r cos(theta), off-diagonal -g r sin(theta), and
/// -hbar phidot on the (+,+) entry only.
EvolutionResult evolve_effective_c(const ParameterPath& path, const Spinor& coeffs0,
                                   const EvolutionConfig& cfg, const CBasisOptions& opts = {});

/// Adiabatic phases for one level by quadrature:
/// total = -(1/hbar) int (e0 + y0 -+ g r) dt + int A_ll dt, geometric = int A_ll dt.
std::pair<double, double> evolve_adiabatic(const ParameterPath& path, Level level,
                                           const EvolutionConfig& cfg, int quadrature_n = 4096);

// Basis maps at a single path time (the eigenvector gauge is 2pi-periodic in
// phi, so no branch tracking is needed here).
Spinor b_to_original(const Spinor& b, const ParameterPath& path, double t);
Spinor original_to_b(const Spinor& psi, const ParameterPath& path, double t);
Spinor c_to_b(const Spinor& c, const ParameterPath& path, double t);
Spinor b_to_c(const Spinor& b, const ParameterPath& path, double t);
Spinor c_to_original(const Spinor& c, const ParameterPath& path, double t);
Spinor original_to_c(const Spinor& psi, const ParameterPath& path, double t);

/// H = a I + b . sigma in energy units; the common currency of the steppers.
struct HamiltonianCoeffs {
    double a = 0.0;
    Field3 b{0.0, 0.0, 0.0};
};

/// Closed-form step psi -> exp(-i (a I + b.sigma) dt / hbar) psi.
Spinor apply_pauli_exponential(const HamiltonianCoeffs& h, double dt_over_hbar, const Spinor& s);

}  // namespace berrysim
