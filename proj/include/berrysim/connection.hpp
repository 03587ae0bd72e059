#pragma once

#include "berrysim/core_model.hpp"

namespace berrysim {

/// Instantaneous geometric-connection matrix ⟨v_m| i d/dt |v_n⟩, indexed
/// (+,+), (+,-), (-,+), (-,-).  Units rad/time.  Hermitian.
struct ConnectionMatrix {
    Complex pp{}, pm{}, mp{}, mm{};

    Mat2 matrix() const { return {pp, pm, mp, mm}; }
    double max_abs_difference(const ConnectionMatrix& o) const {
        return std::max(std::max(std::abs(pp - o.pp), std::abs(pm - o.pm)),
                        std::max(std::abs(mp - o.mp), std::abs(mm - o.mm)));
    }
};

/// Loop integrals of the diagonal connection and the solid angle subtended
/// by the loop of field directions.
struct LoopIntegral {
    double gamma_plus = 0.0;   // rad
    double gamma_minus = 0.0;  // rad
    double solid_angle = 0.0;  // sr
    int samples = 0;
};

/// Spherical angles and their time derivatives at a point on a path.
struct AngularRates {
    double r = 0.0, theta = 0.0;
    double r_dot = 0.0, theta_dot = 0.0, phi_dot = 0.0;
};

/// Rates from the field and its (analytic or central-difference) derivative.
/// Branch-free: phi itself is not needed.  Throws SingularityError at poles
/// and DegeneracyError below r_min.
AngularRates angular_rates(const ParameterPath& path, double t, double r_min = kDefaultRMin);

/// Closed-form connection:
///   A++ = (1+cos th)/2 phidot,  A-- = (1-cos th)/2 phidot,
///   A+- = (sin th / 2) phidot + (i/2) thdot,  A-+ = conj(A+-).
ConnectionMatrix connection_analytic(double theta, double theta_dot, double phi_dot);

/// Central-difference connection from gauge-tracked eigenvectors:
///   entry(m,n) = ⟨v_m(t)| i (v_n(t+dt) - v_n(t-dt)) / (2 dt)⟩.
/// Converges to connection_analytic at O(dt^2).
ConnectionMatrix connection_numeric(const ParameterPath& path, double t, double dt,
                                    double r_min = kDefaultRMin);

/// Composite-Simpson loop integrals of the diagonal connection over one
/// closed traversal, plus the spherical-polygon solid angle (Richardson
/// extrapolated).  Default node count 4096.
LoopIntegral berry_loop_integral(const ParameterPath& path, int quadrature_n = 4096);

/// Loop integrals of the original path and of the path scaled y -> eps*y.
/// The geometric terms depend only on angles, so the two agree.
std::pair<LoopIntegral, LoopIntegral> scaling_check(const ParameterPath& path, double epsilon,
                                                    int quadrature_n = 4096);

/// Uniformly scale the field components (y1, y2, y3) of a path by eps.
ParameterPath scale_path(const ParameterPath& path, double epsilon);

}  // namespace berrysim
