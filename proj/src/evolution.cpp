#include "berrysim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace berrysim {

namespace {

using HamFn = std::function<HamiltonianCoeffs(double)>;

double expectation_energy(const HamiltonianCoeffs& h, const Spinor& s) {
    const Complex cross = std::conj(s.upper) * s.lower;
    const double sx = 2.0 * cross.real();
    const double sy = 2.0 * cross.imag();
    const double sz = std::norm(s.upper) - std::norm(s.lower);
    return h.a * s.norm_sq() + h.b[0] * sx + h.b[1] * sy + h.b[2] * sz;
}

struct IntegrationOutput {
    Spinor psi;
    double dyn = 0.0;  // (1/hbar) int <psi|H|psi> dt
    long steps = 0;
    std::vector<std::pair<double, Spinor>> trajectory;
};

// Adaptive midpoint-exponential stepper with step-doubling error control.
// Each substep is exactly unitary; the doubled half-steps are the accepted
// solution and the full step supplies the error estimate.
IntegrationOutput integrate_midpoint(const HamFn& H, Spinor psi, double T,
                                     const EvolutionConfig& cfg,
                                     const std::vector<double>& breakpoints) {
    IntegrationOutput out;
    double max_step = cfg.max_step > 0.0 ? std::min(cfg.max_step, T / 16.0) : T / 64.0;
    const double min_step = T * 1e-12;

    std::vector<double> stops;
    for (double b : breakpoints) {
        if (b > 0.0 && b < T) stops.push_back(b);
    }
    stops.push_back(T);
    std::sort(stops.begin(), stops.end());

    auto step = [&](double t0, double dt, const Spinor& s) {
        return apply_pauli_exponential(H(t0 + 0.5 * dt), dt / cfg.hbar, s);
    };

    double t = 0.0;
    double dt = cfg.adaptive ? std::min(max_step, T / 256.0) : max_step;
    size_t stop_idx = 0;
    if (cfg.record_trajectory) out.trajectory.push_back({0.0, psi});

    while (t < T) {
        while (stop_idx < stops.size() && stops[stop_idx] <= t + min_step) ++stop_idx;
        const double stop = stop_idx < stops.size() ? stops[stop_idx] : T;
        double h = std::min(dt, stop - t);
        if (!cfg.adaptive) {
            const Spinor mid = step(t, 0.5 * h, psi);
            const Spinor next = step(t + 0.5 * h, 0.5 * h, mid);
            const double e0 = expectation_energy(H(t), psi);
            const double em = expectation_energy(H(t + 0.5 * h), mid);
            const double e1 = expectation_energy(H(t + h), next);
            out.dyn += h / 6.0 * (e0 + 4.0 * em + e1) / cfg.hbar;
            psi = next;
            t += h;
            ++out.steps;
            if (cfg.record_trajectory) out.trajectory.push_back({t, psi});
            continue;
        }
        const Spinor full = step(t, h, psi);
        const Spinor mid = step(t, 0.5 * h, psi);
        const Spinor next = step(t + 0.5 * h, 0.5 * h, mid);
        const double err = max_component_distance(full, next) / 3.0;
        // error-per-unit-step, floored at a few ulps so that slivers clipped
        // against a stop time are not rejected on roundoff noise
        const double tol = std::max((cfg.abs_tol + cfg.rel_tol * psi.norm()) * (h / T),
                                    8.0 * std::numeric_limits<double>::epsilon());
        if (err <= tol) {
            const double e0 = expectation_energy(H(t), psi);
            const double em = expectation_energy(H(t + 0.5 * h), mid);
            const double e1 = expectation_energy(H(t + h), next);
            out.dyn += h / 6.0 * (e0 + 4.0 * em + e1) / cfg.hbar;
            psi = next;
            t += h;
            ++out.steps;
            if (cfg.record_trajectory) out.trajectory.push_back({t, psi});
        }
        const double factor =
            err > 0.0 ? 0.9 * std::cbrt(tol / err) : 2.0;
        // a step clipped against a stop time says nothing about the error at
        // full size; only shrink the proposal from such a step on rejection
        if (h >= dt || err > tol) {
            dt = h * std::clamp(factor, 0.2, 2.0);
        }
        dt = std::min(dt, max_step);
        if (dt < min_step) throw IntegrationError(t);
    }
    out.psi = psi;
    return out;
}

// Dormand-Prince 5(4) on the augmented state (psi, dynamical integral).
struct RkState {
    Spinor psi;
    double z;
};

RkState axpy(const RkState& y, double h, const RkState& d) {
    return {{y.psi.upper + h * d.psi.upper, y.psi.lower + h * d.psi.lower}, y.z + h * d.z};
}

IntegrationOutput integrate_rk(const HamFn& H, Spinor psi0, double T, const EvolutionConfig& cfg,
                               const std::vector<double>& breakpoints) {
    static const double A[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double E[7] = {71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

    auto deriv = [&](double t, const RkState& y) -> RkState {
        const HamiltonianCoeffs h = H(t);
        const Mat2 m = TwoLevelHamiltonian{h.a, 1.0, h.b}.matrix();
        const Complex f(0.0, -1.0 / cfg.hbar);
        const Spinor hp = m.apply(y.psi);
        return {{f * hp.upper, f * hp.lower}, expectation_energy(h, y.psi) / cfg.hbar};
    };

    IntegrationOutput out;
    double max_step = cfg.max_step > 0.0 ? std::min(cfg.max_step, T / 16.0) : T / 64.0;
    const double min_step = T * 1e-12;

    std::vector<double> stops;
    for (double b : breakpoints) {
        if (b > 0.0 && b < T) stops.push_back(b);
    }
    stops.push_back(T);
    std::sort(stops.begin(), stops.end());

    RkState y{psi0, 0.0};
    double t = 0.0;
    double dt = cfg.adaptive ? std::min(max_step, T / 256.0) : max_step;
    size_t stop_idx = 0;
    if (cfg.record_trajectory) out.trajectory.push_back({0.0, y.psi});

    RkState k[7];
    bool have_first = false;
    while (t < T) {
        while (stop_idx < stops.size() && stops[stop_idx] <= t + min_step) ++stop_idx;
        const double stop = stop_idx < stops.size() ? stops[stop_idx] : T;
        const double h = std::min(dt, stop - t);
        if (!have_first) {
            k[0] = deriv(t, y);
            have_first = true;
        }
        for (int i = 1; i < 7; ++i) {
            RkState yi = y;
            for (int j = 0; j < i; ++j) {
                if (A[i][j] != 0.0) yi = axpy(yi, h * A[i][j], k[j]);
            }
            k[i] = deriv(t + C[i] * h, yi);
        }
        RkState y5 = y;
        for (int j = 0; j < 6; ++j) {
            if (A[6][j] != 0.0) y5 = axpy(y5, h * A[6][j], k[j]);
        }
        Spinor errv{0.0, 0.0};
        for (int j = 0; j < 7; ++j) {
            errv.upper += h * E[j] * k[j].psi.upper;
            errv.lower += h * E[j] * k[j].psi.lower;
        }
        const double err = std::max(std::abs(errv.upper), std::abs(errv.lower));
        const double tol = std::max((cfg.abs_tol + cfg.rel_tol * y.psi.norm()) * (h / T),
                                    8.0 * std::numeric_limits<double>::epsilon());
        if (!cfg.adaptive || err <= tol) {
            y = y5;
            // FSAL: the 7th stage is the derivative at the accepted point
            k[0] = k[6];
            t += h;
            ++out.steps;
            if (cfg.record_trajectory) out.trajectory.push_back({t, y.psi});
        }
        if (cfg.adaptive) {
            const double factor = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 2.0;
            if (h >= dt || err > tol) {
                dt = h * std::clamp(factor, 0.2, 5.0);
            }
            dt = std::min(dt, max_step);
            if (dt < min_step) throw IntegrationError(t);
        }
    }
    out.psi = y.psi;
    out.dyn = y.z;
    return out;
}

IntegrationOutput integrate(const HamFn& H, const Spinor& psi0, double T,
                            const EvolutionConfig& cfg, const std::vector<double>& breakpoints) {
    if (cfg.integrator == Integrator::rk_adaptive) {
        return integrate_rk(H, psi0, T, cfg, breakpoints);
    }
    IntegrationOutput out = integrate_midpoint(H, psi0, T, cfg, breakpoints);
    return out;
}

EvolutionResult finish(const ParameterPath& path, const EvolutionConfig& cfg, Basis basis,
                       IntegrationOutput&& io, double min_r) {
    EvolutionResult res;
    res.final_state = io.psi;
    res.dynamical_integral = io.dyn;
    res.norm_drift = std::abs(io.psi.norm() - 1.0);
    res.steps = io.steps;
    res.basis = basis;
    res.path_closed = path.closed;
    res.period_T = path.period_T;
    res.coupling_g = path.coupling_g;
    res.min_field_radius = min_r;
    res.hbar = cfg.hbar;
    if (cfg.record_trajectory) {
        res.trajectory.reserve(io.trajectory.size());
        for (const auto& [t, psi] : io.trajectory) {
            const TwoLevelHamiltonian h{path.e0 + path.sample(t)[0], path.coupling_g,
                                        path.field_at(t)};
            const double r = h.radius();
            res.trajectory.push_back(
                {t, psi, h.scalar_shift + h.coupling_g * r, h.scalar_shift - h.coupling_g * r});
        }
    }
    return res;
}

void require_normalized(const Spinor& s, const char* who) {
    if (std::abs(s.norm() - 1.0) > 1e-9) {
        throw ContractError(std::string(who) + ": initial state not normalized");
    }
}

}  // namespace

Spinor apply_pauli_exponential(const HamiltonianCoeffs& h, double dt_over_hbar, const Spinor& s) {
    const double bnorm =
        std::sqrt(h.b[0] * h.b[0] + h.b[1] * h.b[1] + h.b[2] * h.b[2]);
    const Complex phase = std::exp(Complex(0.0, -h.a * dt_over_hbar));
    if (bnorm == 0.0) return phase * s;
    const double beta = bnorm * dt_over_hbar;
    const double cb = std::cos(beta);
    const Complex msb(0.0, -std::sin(beta) / bnorm);  // -i sin(beta) / |b|
    const Complex od = Complex(h.b[0], -h.b[1]);      // (b.sigma)_{01}
    Spinor out;
    out.upper = phase * (cb * s.upper + msb * (h.b[2] * s.upper + od * s.lower));
    out.lower = phase * (cb * s.lower + msb * (std::conj(od) * s.upper - h.b[2] * s.lower));
    return out;
}

EvolutionResult evolve_exact(const ParameterPath& path, const Spinor& psi0,
                             const EvolutionConfig& cfg) {
    require_normalized(psi0, "evolve_exact");
    double min_r = std::numeric_limits<double>::infinity();
    auto H = [&path, &min_r](double t) -> HamiltonianCoeffs {
        const auto y = path.sample(t);
        const double r = std::sqrt(y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
        min_r = std::min(min_r, r);
        return {path.e0 + y[0],
                {path.coupling_g * y[1], path.coupling_g * y[2], path.coupling_g * y[3]}};
    };
    auto io = integrate(H, psi0, path.period_T, cfg, path.breakpoints);
    return finish(path, cfg, Basis::original, std::move(io), min_r);
}

EvolutionResult evolve_effective_b(const ParameterPath& path, const Spinor& coeffs0,
                                   const EvolutionConfig& cfg, const BBasisOptions& opts) {
    require_normalized(coeffs0, "evolve_effective_b");
    double min_r = std::numeric_limits<double>::infinity();
    auto H = [&path, &min_r, opts, hbar = cfg.hbar](double t) -> HamiltonianCoeffs {
        AngularRates a;
        try {
            a = angular_rates(path, t);
        } catch (const DegeneracyError&) {
            throw SingularityError(t, "evolve_effective_b: degeneracy on path");
        }
        min_r = std::min(min_r, a.r);
        const double y0 = path.sample(t)[0];
        const double shift = path.e0 + y0;
        const double gr = path.coupling_g * a.r;
        const ConnectionMatrix A = connection_analytic(a.theta, a.theta_dot, a.phi_dot);
        // H_b = diag(E+, E-) - hbar A
        const double h00 = shift + gr - hbar * A.pp.real();
        const double h11 = shift - gr - hbar * A.mm.real();
        Complex h01 = opts.include_offdiagonal ? Complex(-hbar) * A.pm : Complex(0.0);
        return {0.5 * (h00 + h11), {h01.real(), -h01.imag(), 0.5 * (h00 - h11)}};
    };
    auto io = integrate(H, coeffs0, path.period_T, cfg, path.breakpoints);
    return finish(path, cfg, Basis::b, std::move(io), min_r);
}

EvolutionResult evolve_effective_c(const ParameterPath& path, const Spinor& coeffs0,
                                   const EvolutionConfig& cfg, const CBasisOptions& opts) {
    require_normalized(coeffs0, "evolve_effective_c");
    double min_r = std::numeric_limits<double>::infinity();
    auto H = [&path, &min_r, opts, hbar = cfg.hbar](double t) -> HamiltonianCoeffs {
        AngularRates a;
        try {
            a = angular_rates(path, t);
        } catch (const DegeneracyError&) {
            throw SingularityError(t, "evolve_effective_c: degeneracy on path");
        }
        min_r = std::min(min_r, a.r);
        const double y0 = path.sample(t)[0];
        const double shift = path.e0 + y0;
        const double gr = path.coupling_g * a.r;
        const bool keep_diag = !opts.drop_all_coupling;
        const bool keep_offdiag = !(opts.drop_transverse_coupling || opts.drop_all_coupling);
        const double h00 =
            shift + (keep_diag ? gr * std::cos(a.theta) : 0.0) - hbar * a.phi_dot;
        const double h11 = shift - (keep_diag ? gr * std::cos(a.theta) : 0.0);
        const double h01 = keep_offdiag ? -gr * std::sin(a.theta) : 0.0;
        return {0.5 * (h00 + h11), {h01, 0.0, 0.5 * (h00 - h11)}};
    };
    auto io = integrate(H, coeffs0, path.period_T, cfg, path.breakpoints);
    return finish(path, cfg, Basis::c, std::move(io), min_r);
}

std::pair<double, double> evolve_adiabatic(const ParameterPath& path, Level level,
                                           const EvolutionConfig& cfg, int quadrature_n) {
    if (!path.closed) throw ContractError("evolve_adiabatic: path must be closed");
    int n = quadrature_n;
    if (n % 2 != 0) ++n;
    const double h = path.period_T / n;
    const double sign = level == Level::plus ? +1.0 : -1.0;
    double dyn = 0.0, geo = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        AngularRates a;
        try {
            a = angular_rates(path, t);
        } catch (const DegeneracyError&) {
            throw SingularityError(t, "evolve_adiabatic: degeneracy on loop");
        }
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double y0 = path.sample(t)[0];
        dyn += w * (path.e0 + y0 + sign * path.coupling_g * a.r);
        geo += w * 0.5 * (1.0 + sign * std::cos(a.theta)) * a.phi_dot;
    }
    dyn *= h / 3.0 / cfg.hbar;
    geo *= h / 3.0;
    return {-dyn + geo, geo};
}

namespace {

Mat2 frame_matrix(const ParameterPath& path, double t) {
    const PolarField p = to_polar(path.field_at(t));
    const Spinor vp = eigenvector_plus(p.theta, p.phi);
    const Spinor vm = eigenvector_minus(p.theta, p.phi);
    return {vp.upper, vm.upper, vp.lower, vm.lower};
}

Mat2 theta_rotation(const ParameterPath& path, double t) {
    const PolarField p = to_polar(path.field_at(t));
    const double c = std::cos(p.theta / 2.0), s = std::sin(p.theta / 2.0);
    return {Complex(c), Complex(-s), Complex(s), Complex(c)};
}

}  // namespace

Spinor b_to_original(const Spinor& b, const ParameterPath& path, double t) {
    return frame_matrix(path, t).apply(b);
}
Spinor original_to_b(const Spinor& psi, const ParameterPath& path, double t) {
    return frame_matrix(path, t).adjoint().apply(psi);
}
Spinor c_to_b(const Spinor& c, const ParameterPath& path, double t) {
    return theta_rotation(path, t).apply(c);
}
Spinor b_to_c(const Spinor& b, const ParameterPath& path, double t) {
    return theta_rotation(path, t).adjoint().apply(b);
}
Spinor c_to_original(const Spinor& c, const ParameterPath& path, double t) {
    return b_to_original(c_to_b(c, path, t), path, t);
}
Spinor original_to_c(const Spinor& psi, const ParameterPath& path, double t) {
    return b_to_c(original_to_b(psi, path, t), path, t);
}

}  // namespace berrysim
