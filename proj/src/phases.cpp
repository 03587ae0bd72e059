#include "berrysim/phases.hpp"

#include <cmath>

namespace berrysim {

PhaseDecomposition decompose_phase(const EvolutionResult& result, const Spinor& psi0,
                                   double fidelity_floor) {
    if (!result.path_closed) {
        throw ContractError("decompose_phase: result must come from a closed path");
    }
    PhaseDecomposition d;
    const Complex overlap = inner(psi0, result.final_state);
    d.cyclicity_fidelity = std::abs(overlap);
    d.total_phase = std::arg(overlap);
    d.dynamical_phase = result.dynamical_integral;
    d.geometric_phase = wrap_to_pi(d.total_phase + d.dynamical_phase);
    d.adiabaticity_ratio =
        result.period_T * result.coupling_g * result.min_field_radius / (result.hbar * kPi);
    d.low_fidelity = d.cyclicity_fidelity < fidelity_floor;
    return d;
}

double transition_probability(const EvolutionResult& result, const ParameterPath& path) {
    const auto amp = projected_amplitude(result, path, Level::plus);
    return std::norm(amp);
}

Complex projected_amplitude(const EvolutionResult& result, const ParameterPath& path, Level level) {
    const TwoLevelHamiltonian h{path.e0 + path.sample(path.period_T)[0], path.coupling_g,
                                path.field_at(path.period_T)};
    const EigenSystem es = eigensystem(h);  // throws DegeneracyError at r ~ 0
    const Spinor& v = level == Level::plus ? es.v_plus : es.v_minus;
    Spinor psi = result.final_state;
    if (result.basis == Basis::b) psi = b_to_original(psi, path, path.period_T);
    if (result.basis == Basis::c) psi = c_to_original(psi, path, path.period_T);
    return inner(v, psi);
}

}  // namespace berrysim
