#include "berrysim/connection.hpp"

#include <cmath>
#include <vector>

namespace berrysim {

AngularRates angular_rates(const ParameterPath& path, double t, double r_min) {
    const auto y = path.sample(t);
    const auto yd = path.sample_derivative(t);
    AngularRates a;
    const double rho_sq = y[1] * y[1] + y[2] * y[2];
    const double rho = std::sqrt(rho_sq);
    a.r = std::sqrt(rho_sq + y[3] * y[3]);
    if (a.r < r_min) throw DegeneracyError(a.r, "angular_rates: degenerate point on path");
    if (rho == 0.0) throw SingularityError(t, "angular_rates: pole on path, phi rate undefined");
    a.theta = std::atan2(rho, y[3]);
    const double rho_dot = (y[1] * yd[1] + y[2] * yd[2]) / rho;
    a.r_dot = (y[1] * yd[1] + y[2] * yd[2] + y[3] * yd[3]) / a.r;
    a.theta_dot = (y[3] * rho_dot - yd[3] * rho) / (a.r * a.r);
    a.phi_dot = (y[1] * yd[2] - y[2] * yd[1]) / rho_sq;
    return a;
}

ConnectionMatrix connection_analytic(double theta, double theta_dot, double phi_dot) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    ConnectionMatrix m;
    m.pp = Complex(0.5 * (1.0 + c) * phi_dot, 0.0);
    m.mm = Complex(0.5 * (1.0 - c) * phi_dot, 0.0);
    m.pm = Complex(0.5 * s * phi_dot, 0.5 * theta_dot);
    m.mp = std::conj(m.pm);
    return m;
}

ConnectionMatrix connection_numeric(const ParameterPath& path, double t, double dt, double r_min) {
    if (!path.closed && (t - dt < 0.0 || t + dt > path.period_T)) {
        throw StencilError("connection_numeric: stencil leaves the path domain");
    }
    PolarField pm1, p0, pp1;
    try {
        pm1 = to_polar(path.field_at(t - dt), std::nullopt, r_min);
        p0 = to_polar(path.field_at(t), pm1, r_min);
        pp1 = to_polar(path.field_at(t + dt), p0, r_min);
    } catch (const DegeneracyError&) {
        throw StencilError("connection_numeric: degeneracy inside stencil");
    }
    if (pm1.gauge_fixed_at_pole || p0.gauge_fixed_at_pole || pp1.gauge_fixed_at_pole) {
        throw StencilError("connection_numeric: pole inside stencil");
    }

    const Spinor vp0 = eigenvector_plus(p0.theta, p0.phi);
    const Spinor vm0 = eigenvector_minus(p0.theta, p0.phi);
    const Spinor vp_a = eigenvector_plus(pm1.theta, pm1.phi);
    const Spinor vm_a = eigenvector_minus(pm1.theta, pm1.phi);
    const Spinor vp_b = eigenvector_plus(pp1.theta, pp1.phi);
    const Spinor vm_b = eigenvector_minus(pp1.theta, pp1.phi);

    const Complex ih(0.0, 1.0 / (2.0 * dt));
    const Spinor dvp = vp_b - vp_a;
    const Spinor dvm = vm_b - vm_a;
    ConnectionMatrix m;
    m.pp = ih * inner(vp0, dvp);
    m.pm = ih * inner(vp0, dvm);
    m.mp = ih * inner(vm0, dvp);
    m.mm = ih * inner(vm0, dvm);
    return m;
}

namespace {

struct Vec3 {
    double x, y, z;
};

Vec3 direction(const Field3& f) {
    const double r = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
    return {f[0] / r, f[1] / r, f[2] / r};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double triple(const Vec3& a, const Vec3& b, const Vec3& c) {
    return a.x * (b.y * c.z - b.z * c.y) + a.y * (b.z * c.x - b.x * c.z) +
           a.z * (b.x * c.y - b.y * c.x);
}

// Signed spherical-polygon area as a fan of triangle excesses from `ref`
// (van Oosterom-Strackee per triangle).
double polygon_solid_angle(const std::vector<Vec3>& pts, const Vec3& ref) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const Vec3& b = pts[i];
        const Vec3& c = pts[i + 1];
        const double num = triple(ref, b, c);
        const double den = 1.0 + dot(ref, b) + dot(b, c) + dot(c, ref);
        total += 2.0 * std::atan2(num, den);
    }
    return total;
}

Vec3 pick_reference(const std::vector<Vec3>& pts) {
    Vec3 mean{0.0, 0.0, 0.0};
    for (const auto& p : pts) {
        mean.x += p.x;
        mean.y += p.y;
        mean.z += p.z;
    }
    const double n = std::sqrt(dot(mean, mean));
    std::vector<Vec3> candidates;
    candidates.push_back({0.0, 0.0, 1.0});
    candidates.push_back({0.0, 0.0, -1.0});
    if (n > 0.1 * pts.size()) {
        candidates.insert(candidates.begin(), {mean.x / n, mean.y / n, mean.z / n});
    }
    candidates.push_back({1.0, 0.0, 0.0});
    candidates.push_back({0.0, 1.0, 0.0});
    for (const auto& cand : candidates) {
        double min_sep = kPi;
        for (const auto& p : pts) {
            min_sep = std::min(min_sep, std::acos(std::clamp(dot(cand, p), -1.0, 1.0)));
        }
        if (min_sep > 0.15) return cand;
    }
    return candidates.front();
}

double solid_angle_of_loop(const ParameterPath& path, int n) {
    std::vector<Vec3> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = path.period_T * static_cast<double>(i) / n;
        pts.push_back(direction(path.field_at(t)));
    }
    const Vec3 ref = pick_reference(pts);
    const double fine = polygon_solid_angle(pts, ref);
    std::vector<Vec3> coarse;
    coarse.reserve(n / 2 + 1);
    for (int i = 0; i <= n; i += 2) coarse.push_back(pts[i]);
    const double half = polygon_solid_angle(coarse, ref);
    // leading O(n^-2) polygon error removed by Richardson extrapolation
    double omega = (4.0 * fine - half) / 3.0;
    // the fan construction yields the area of whichever region contains the
    // reference point, i.e. the enclosed area only mod 4 pi; report the
    // representative in [0, 4 pi), the area of the region to the left of the
    // traversal direction
    const double four_pi = 2.0 * kTwoPi;
    omega = std::fmod(omega, four_pi);
    if (omega < -1e-9) omega += four_pi;
    return omega;
}

}  // namespace

LoopIntegral berry_loop_integral(const ParameterPath& path, int quadrature_n) {
    if (!path.closed) throw ContractError("berry_loop_integral: path must be closed");
    int n = quadrature_n;
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;

    const double h = path.period_T / n;
    double sum_p = 0.0, sum_m = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        AngularRates a;
        try {
            a = angular_rates(path, t);
        } catch (const DegeneracyError& e) {
            throw SingularityError(t, "berry_loop_integral: degeneracy on loop");
        }
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum_p += w * 0.5 * (1.0 + std::cos(a.theta)) * a.phi_dot;
        sum_m += w * 0.5 * (1.0 - std::cos(a.theta)) * a.phi_dot;
    }
    LoopIntegral li;
    li.gamma_plus = sum_p * h / 3.0;
    li.gamma_minus = sum_m * h / 3.0;
    li.samples = n + 1;
    li.solid_angle = solid_angle_of_loop(path, std::max(n, 4096));
    return li;
}

ParameterPath scale_path(const ParameterPath& path, double epsilon) {
    ParameterPath scaled = path;
    auto inner_sampler = path.sampler;
    scaled.sampler = [inner_sampler, epsilon](double t) {
        auto y = inner_sampler(t);
        return std::array<double, 4>{y[0], epsilon * y[1], epsilon * y[2], epsilon * y[3]};
    };
    if (path.derivative) {
        auto inner_deriv = path.derivative;
        scaled.derivative = [inner_deriv, epsilon](double t) {
            auto y = inner_deriv(t);
            return std::array<double, 4>{y[0], epsilon * y[1], epsilon * y[2], epsilon * y[3]};
        };
    }
    return scaled;
}

std::pair<LoopIntegral, LoopIntegral> scaling_check(const ParameterPath& path, double epsilon,
                                                    int quadrature_n) {
    if (epsilon <= 0.0) throw DomainError("scaling_check: epsilon must be positive");
    const LoopIntegral before = berry_loop_integral(path, quadrature_n);
    const LoopIntegral after = berry_loop_integral(scale_path(path, epsilon), quadrature_n);
    return {before, after};
}

}  // namespace berrysim
