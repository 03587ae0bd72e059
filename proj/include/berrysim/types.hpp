#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace berrysim {

using Complex = std::complex<double>;
using Field3 = std::array<double, 3>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// Two-component complex amplitude (upper, lower).
struct Spinor {
    Complex upper{0.0, 0.0};
    Complex lower{0.0, 0.0};

    double norm_sq() const { return std::norm(upper) + std::norm(lower); }
    double norm() const { return std::sqrt(norm_sq()); }

    Spinor normalized() const {
        const double n = norm();
        return {upper / n, lower / n};
    }
};

/// ⟨a|b⟩, conjugate-linear in the first argument.
inline Complex inner(const Spinor& a, const Spinor& b) {
    return std::conj(a.upper) * b.upper + std::conj(a.lower) * b.lower;
}

inline Spinor operator+(const Spinor& a, const Spinor& b) {
    return {a.upper + b.upper, a.lower + b.lower};
}
inline Spinor operator-(const Spinor& a, const Spinor& b) {
    return {a.upper - b.upper, a.lower - b.lower};
}
inline Spinor operator*(const Complex& c, const Spinor& s) {
    return {c * s.upper, c * s.lower};
}

/// Max componentwise distance; the metric used by the cross-basis checks.
inline double max_component_distance(const Spinor& a, const Spinor& b) {
    return std::max(std::abs(a.upper - b.upper), std::abs(a.lower - b.lower));
}

/// Dense 2x2 complex matrix, row major.
struct Mat2 {
    Complex m00{}, m01{}, m10{}, m11{};

    Spinor apply(const Spinor& s) const {
        return {m00 * s.upper + m01 * s.lower, m10 * s.upper + m11 * s.lower};
    }
    Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
};

/// Wrap an angle into (-pi, pi].
inline double wrap_to_pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    if (a > kPi) a -= kTwoPi;
    return a;
}

// ---------------------------------------------------------------------------
// Error taxonomy.  Callers distinguish contract violations (bad input),
// degeneracy/singularity (r below threshold, no eigenframe), and numerical
// failure (step-size underflow).
// ---------------------------------------------------------------------------

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (e.g. t outside [0, T]).
struct DomainError : SimulationError {
    using SimulationError::SimulationError;
};

/// Field radius at or below the degeneracy threshold; no preferred eigenframe.
struct DegeneracyError : SimulationError {
    double radius;
    explicit DegeneracyError(double r, const std::string& msg = "field radius below degeneracy threshold")
        : SimulationError(msg), radius(r) {}
};

/// A finite-difference stencil straddles a pole or degeneracy.
struct StencilError : SimulationError {
    using SimulationError::SimulationError;
};

/// Eigenframe singular somewhere along a path; carries the location.
struct SingularityError : SimulationError {
    double where;
    explicit SingularityError(double t, const std::string& msg = "eigenframe singular on path")
        : SimulationError(msg), where(t) {}
};

/// Precondition on the path/result contract violated (e.g. open path where closed required).
struct ContractError : SimulationError {
    using SimulationError::SimulationError;
};

/// Integrator could not meet tolerances; carries the time reached.
struct IntegrationError : SimulationError {
    double t_reached;
    explicit IntegrationError(double t, const std::string& msg = "step-size underflow")
        : SimulationError(msg), t_reached(t) {}
};

/// Config file failed validation; carries the offending key.
struct SchemaError : SimulationError {
    std::string key;
    SchemaError(std::string k, const std::string& msg)
        : SimulationError(msg), key(std::move(k)) {}
};

}  // namespace berrysim
