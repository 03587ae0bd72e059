#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "berrysim/types.hpp"

namespace berrysim {

/// Default degeneracy threshold on the field radius (field units).
constexpr double kDefaultRMin = 1e-14;

/// H = scalar_shift * I + coupling_g * (field . sigma).  Hermitian by construction.
struct TwoLevelHamiltonian {
    double scalar_shift = 0.0;  // E(0) + y0(t)
    double coupling_g = 1.0;    // positive
    Field3 field{0.0, 0.0, 0.0};

    Mat2 matrix() const {
        const double x = coupling_g * field[0];
        const double y = coupling_g * field[1];
        const double z = coupling_g * field[2];
        return {Complex(scalar_shift + z, 0.0), Complex(x, -y),
                Complex(x, y), Complex(scalar_shift - z, 0.0)};
    }
    double radius() const {
        return std::sqrt(field[0] * field[0] + field[1] * field[1] + field[2] * field[2]);
    }
};

/// Spherical coordinates of the field vector.  phi is kept on a continuous
/// branch (unwrapped) when a previous sample is supplied.
struct PolarField {
    double r = 0.0;
    double theta = 0.0;          // [0, pi]
    double phi = 0.0;            // unwrapped, unbounded
    int winding = 0;             // net phi turns over a closed path (set by trace helpers)
    bool gauge_fixed_at_pole = false;
};

/// Drive path t in [0, T] -> (y0, y1, y2, y3).  Samplers are closed-form;
/// derivatives are analytic when supplied, else central differences with
/// step T*1e-6.  Carries the Hamiltonian constants so hamiltonian_at is a
/// pure function of (path, t).
struct ParameterPath {
    double period_T = 1.0;
    std::function<std::array<double, 4>(double)> sampler;
    std::function<std::array<double, 4>(double)> derivative;  // optional analytic d/dt
    bool closed = true;
    double coupling_g = 1.0;
    double e0 = 0.0;
    std::vector<double> breakpoints;  // interior times where smoothness drops to C0

    /// Sample the drive; closed paths wrap t periodically so stencils may
    /// reach slightly outside [0, T].
    std::array<double, 4> sample(double t) const;
    std::array<double, 4> sample_derivative(double t) const;
    Field3 field_at(double t) const;
};

struct EigenSystem {
    double e_plus = 0.0;
    double e_minus = 0.0;
    Spinor v_plus;
    Spinor v_minus;
    PolarField polar;
};

/// H(t) on the path.  Throws DomainError for t outside [0, T].
TwoLevelHamiltonian hamiltonian_at(const ParameterPath& path, double t);

/// Spherical conversion with branch continuity against `previous`.
/// Throws DegeneracyError below r_min; poles get the declared gauge
/// (previous phi if available, else 0) and the gauge_fixed_at_pole flag.
PolarField to_polar(const Field3& field, const std::optional<PolarField>& previous = std::nullopt,
                    double r_min = kDefaultRMin);

/// Inverse of to_polar.
Field3 from_polar(const PolarField& p);

/// Exact eigensystem in the reference gauge:
///   v+ = (cos(theta/2) e^{-i phi}, sin(theta/2)),
///   v- = (sin(theta/2) e^{-i phi}, -cos(theta/2)),
///   E+- = scalar_shift +- g r.
/// `previous` keeps phi on a continuous branch along a path.
EigenSystem eigensystem(const TwoLevelHamiltonian& h,
                        const std::optional<PolarField>& previous = std::nullopt,
                        double r_min = kDefaultRMin);

/// Eigenvectors for given polar angles (same gauge as eigensystem).
Spinor eigenvector_plus(double theta, double phi);
Spinor eigenvector_minus(double theta, double phi);

/// Sample the path's polar coordinates on n+1 uniform nodes with phi
/// unwrapping; the final element carries the net winding.
std::vector<PolarField> trace_polar(const ParameterPath& path, int n, double r_min = kDefaultRMin);

}  // namespace berrysim
