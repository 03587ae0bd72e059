#include "berrysim/core_model.hpp"

#include <cmath>

namespace berrysim {

std::array<double, 4> ParameterPath::sample(double t) const {
    if (closed && (t < 0.0 || t > period_T)) {
        // wrap into [0, T] so difference stencils near the endpoints work;
        // leave t in [0, T] untouched (sampler(T) need not equal sampler(0)
        // exactly in the last bit, and reparametrized derivatives differ)
        t = std::fmod(t, period_T);
        if (t < 0.0) t += period_T;
    }
    return sampler(t);
}

std::array<double, 4> ParameterPath::sample_derivative(double t) const {
    if (derivative) {
        if (closed && (t < 0.0 || t > period_T)) {
            t = std::fmod(t, period_T);
            if (t < 0.0) t += period_T;
        }
        return derivative(t);
    }
    const double h = period_T * 1e-6;
    const auto a = sample(t - h);
    const auto b = sample(t + h);
    return {(b[0] - a[0]) / (2.0 * h), (b[1] - a[1]) / (2.0 * h),
            (b[2] - a[2]) / (2.0 * h), (b[3] - a[3]) / (2.0 * h)};
}

Field3 ParameterPath::field_at(double t) const {
    const auto y = sample(t);
    return {y[1], y[2], y[3]};
}

TwoLevelHamiltonian hamiltonian_at(const ParameterPath& path, double t) {
    if (t < 0.0 || t > path.period_T) {
        throw DomainError("hamiltonian_at: t outside [0, period_T]");
    }
    const auto y = path.sampler(t);
    return {path.e0 + y[0], path.coupling_g, {y[1], y[2], y[3]}};
}

PolarField to_polar(const Field3& f, const std::optional<PolarField>& previous, double r_min) {
    PolarField p;
    const double rho_sq = f[0] * f[0] + f[1] * f[1];
    p.r = std::sqrt(rho_sq + f[2] * f[2]);
    if (p.r < r_min) {
        throw DegeneracyError(p.r, "to_polar: field radius below degeneracy threshold");
    }
    const double rho = std::sqrt(rho_sq);
    p.theta = std::atan2(rho, f[2]);
    if (rho == 0.0) {
        // pole: phi undefined, carry the previous branch if we have one
        p.phi = previous ? previous->phi : 0.0;
        p.gauge_fixed_at_pole = true;
        if (previous) p.winding = previous->winding;
        return p;
    }
    double phi = std::atan2(f[1], f[0]);  // (-pi, pi]
    if (phi == -kPi) phi = kPi;
    if (previous) {
        phi += kTwoPi * std::round((previous->phi - phi) / kTwoPi);
        p.winding = previous->winding;
    }
    p.phi = phi;
    return p;
}

Field3 from_polar(const PolarField& p) {
    const double st = std::sin(p.theta);
    return {p.r * st * std::cos(p.phi), p.r * st * std::sin(p.phi), p.r * std::cos(p.theta)};
}

Spinor eigenvector_plus(double theta, double phi) {
    const Complex e = std::exp(Complex(0.0, -phi));
    return {std::cos(theta / 2.0) * e, Complex(std::sin(theta / 2.0), 0.0)};
}

Spinor eigenvector_minus(double theta, double phi) {
    const Complex e = std::exp(Complex(0.0, -phi));
    return {std::sin(theta / 2.0) * e, Complex(-std::cos(theta / 2.0), 0.0)};
}

EigenSystem eigensystem(const TwoLevelHamiltonian& h, const std::optional<PolarField>& previous,
                        double r_min) {
    EigenSystem es;
    es.polar = to_polar(h.field, previous, r_min);
    es.e_plus = h.scalar_shift + h.coupling_g * es.polar.r;
    es.e_minus = h.scalar_shift - h.coupling_g * es.polar.r;
    es.v_plus = eigenvector_plus(es.polar.theta, es.polar.phi);
    es.v_minus = eigenvector_minus(es.polar.theta, es.polar.phi);
    return es;
}

std::vector<PolarField> trace_polar(const ParameterPath& path, int n, double r_min) {
    std::vector<PolarField> out;
    out.reserve(n + 1);
    std::optional<PolarField> prev;
    for (int i = 0; i <= n; ++i) {
        const double t = path.period_T * static_cast<double>(i) / n;
        PolarField p = to_polar(path.field_at(t), prev, r_min);
        prev = p;
        out.push_back(p);
    }
    if (!out.empty()) {
        out.back().winding =
            static_cast<int>(std::lround((out.back().phi - out.front().phi) / kTwoPi));
    }
    return out;
}

}  // namespace berrysim
