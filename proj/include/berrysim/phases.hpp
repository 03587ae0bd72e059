#pragma once

#include "berrysim/evolution.hpp"

namespace berrysim {

/// Cyclic split of the final-state phase:
///   total = arg<psi(0)|psi(T)>,  geometric = total + dynamical (mod 2pi).
/// geometric is meaningful when cyclicity_fidelity is near 1; below the
/// floor the decomposition is returned but flagged.
struct PhaseDecomposition {
    double total_phase = 0.0;       // (-pi, pi]
    double dynamical_phase = 0.0;   // accumulated, unbounded
    double geometric_phase = 0.0;   // (-pi, pi]
    double cyclicity_fidelity = 0.0;
    double adiabaticity_ratio = 0.0;  // T g min r / (hbar pi)
    bool low_fidelity = false;
};

constexpr double kDefaultFidelityFloor = 0.98;

/// Decompose a closed-path run.  Throws ContractError for open paths.
PhaseDecomposition decompose_phase(const EvolutionResult& result, const Spinor& psi0,
                                   double fidelity_floor = kDefaultFidelityFloor);

/// |<v_plus(y(T))|psi(T)>|^2 for a run started in v_minus(y(0)).
double transition_probability(const EvolutionResult& result, const ParameterPath& path);

/// <v_level(y(T))|psi(T)>.
Complex projected_amplitude(const EvolutionResult& result, const ParameterPath& path, Level level);

}  // namespace berrysim
