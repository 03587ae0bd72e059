#include "berrysim/core_model.hpp"

#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace berrysim;

namespace {

ParameterPath circle_path(double B0, double b1, double Bz, double omega, double g = 1.0) {
    ParameterPath p;
    p.period_T = kTwoPi / omega;
    p.closed = true;
    p.coupling_g = g;
    p.sampler = [=](double t) {
        return std::array<double, 4>{0.0, B0 * (b1 + std::cos(omega * t)), B0 * std::sin(omega * t),
                                     Bz};
    };
    return p;
}

double eigen_residual(const TwoLevelHamiltonian& h, double e, const Spinor& v) {
    const Spinor hv = h.matrix().apply(v);
    const Spinor ev{e * v.upper, e * v.lower};
    return max_component_distance(hv, ev);
}

}  // namespace

TEST_CASE("hamiltonian_at samples the drive") {
    SUBCASE("constant zero path gives the zero matrix") {
        ParameterPath p;
        p.period_T = 1.0;
        p.closed = true;
        p.sampler = [](double) { return std::array<double, 4>{0.0, 0.0, 0.0, 0.0}; };
        const auto h = hamiltonian_at(p, 0.5);
        CHECK(h.scalar_shift == 0.0);
        CHECK(h.radius() == 0.0);
        const Mat2 m = h.matrix();
        CHECK(std::abs(m.m00) == 0.0);
        CHECK(std::abs(m.m01) == 0.0);
        CHECK(std::abs(m.m11) == 0.0);
    }
    SUBCASE("rotating-field parametrization at t=0") {
        const auto p = circle_path(1.0, 0.0, 0.0, 1.0);
        const auto h = hamiltonian_at(p, 0.0);
        CHECK(h.field[0] == doctest::Approx(1.0));
        CHECK(h.field[1] == doctest::Approx(0.0));
        CHECK(h.field[2] == doctest::Approx(0.0));
    }
    SUBCASE("rotating-field parametrization at quarter period") {
        const auto p = circle_path(1.0, 0.5, 0.2, 1.0);
        const auto h = hamiltonian_at(p, kPi / 2.0);
        CHECK(h.field[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(h.field[1] == doctest::Approx(1.0));
        CHECK(h.field[2] == doctest::Approx(0.2));
    }
    SUBCASE("t outside the period is a domain error") {
        const auto p = circle_path(1.0, 0.0, 0.0, 1.0);
        CHECK_THROWS_AS(hamiltonian_at(p, -0.1), DomainError);
        CHECK_THROWS_AS(hamiltonian_at(p, p.period_T + 0.1), DomainError);
    }
}

TEST_CASE("eigensystem gauge and spectrum") {
    SUBCASE("north pole with declared gauge") {
        const TwoLevelHamiltonian h{0.0, 1.0, {0.0, 0.0, 1.0}};
        const auto es = eigensystem(h);
        CHECK(es.e_plus == doctest::Approx(1.0));
        CHECK(es.e_minus == doctest::Approx(-1.0));
        CHECK(es.polar.gauge_fixed_at_pole);
        CHECK(std::abs(es.v_plus.upper - Complex(1.0)) < 1e-15);
        CHECK(std::abs(es.v_plus.lower) < 1e-15);
        CHECK(std::abs(es.v_minus.lower - Complex(-1.0)) < 1e-15);
    }
    SUBCASE("equatorial field") {
        const TwoLevelHamiltonian h{0.0, 2.0, {1.0, 0.0, 0.0}};
        const auto es = eigensystem(h);
        CHECK(es.e_plus == doctest::Approx(2.0));
        CHECK(es.e_minus == doctest::Approx(-2.0));
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        CHECK(std::abs(es.v_plus.upper - Complex(inv_sqrt2)) < 1e-15);
        CHECK(std::abs(es.v_plus.lower - Complex(inv_sqrt2)) < 1e-15);
    }
    SUBCASE("random fields: residual, gap and orthonormality") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const TwoLevelHamiltonian h{uni(rng), 0.1 + std::abs(uni(rng)) * 3.0,
                                        {uni(rng), uni(rng), uni(rng)}};
            if (h.radius() < 1e-3) continue;
            const auto es = eigensystem(h);
            const double scale = std::abs(es.e_plus) + h.coupling_g * h.radius();
            CHECK(eigen_residual(h, es.e_plus, es.v_plus) < 1e-12 * scale);
            CHECK(eigen_residual(h, es.e_minus, es.v_minus) < 1e-12 * scale);
            CHECK(es.e_plus - es.e_minus ==
                  doctest::Approx(2.0 * h.coupling_g * h.radius()).epsilon(1e-13));
            CHECK(std::abs(inner(es.v_plus, es.v_minus)) < 1e-12);
            CHECK(es.v_plus.norm() == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    SUBCASE("degeneracy is a typed error carrying the radius") {
        const TwoLevelHamiltonian h{0.0, 1.0, {0.0, 0.0, 0.0}};
        CHECK_THROWS_AS(eigensystem(h), DegeneracyError);
        try {
            eigensystem(h);
        } catch (const DegeneracyError& e) {
            CHECK(e.radius == 0.0);
        }
    }
}

TEST_CASE("to_polar conversion and unwrapping") {
    SUBCASE("pole flagged with gauge phi = 0") {
        const auto p = to_polar({0.0, 0.0, 2.0});
        CHECK(p.r == doctest::Approx(2.0));
        CHECK(p.theta == doctest::Approx(0.0));
        CHECK(p.phi == 0.0);
        CHECK(p.gauge_fixed_at_pole);
    }
    SUBCASE("diagonal in the equatorial plane") {
        const auto p = to_polar({1.0, 1.0, 0.0});
        CHECK(p.r == doctest::Approx(std::sqrt(2.0)));
        CHECK(p.theta == doctest::Approx(kPi / 2.0));
        CHECK(p.phi == doctest::Approx(kPi / 4.0));
    }
    SUBCASE("one circle turn winds once") {
        const auto path = circle_path(1.0, 0.0, 0.0, 1.0);
        const auto trace = trace_polar(path, 256);
        CHECK(trace.back().winding == 1);
        CHECK(trace.back().phi - trace.front().phi == doctest::Approx(kTwoPi).epsilon(1e-10));
    }
    SUBCASE("winding is invariant under grid refinement") {
        testutil::PolarLoopParams params;
        params.theta0 = 1.0;
        params.theta_amp = 0.4;
        params.phi_amp = 0.4;
        params.r_amp = 0.2;
        const auto path = testutil::make_polar_loop(params);
        const int w1 = trace_polar(path, 512).back().winding;
        const int w2 = trace_polar(path, 1024).back().winding;
        CHECK(w1 == 1);
        CHECK(w1 == w2);
    }
    SUBCASE("round trip is the identity") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        for (int i = 0; i < 500; ++i) {
            const Field3 f{uni(rng), uni(rng), uni(rng)};
            const double r =
                std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
            if (r < 1e-6) continue;
            const Field3 back = from_polar(to_polar(f));
            for (int k = 0; k < 3; ++k) CHECK(std::abs(back[k] - f[k]) < 1e-12 * (1.0 + r));
        }
    }
    SUBCASE("degenerate vector refuses angles") {
        CHECK_THROWS_AS(to_polar({0.0, 0.0, 0.0}), DegeneracyError);
    }
}

TEST_CASE("gauge single-valuedness on closed loops away from poles") {
    std::mt19937 rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto path = testutil::make_polar_loop(testutil::random_loop_params(rng));
        const TwoLevelHamiltonian h0{0.0, path.coupling_g, path.field_at(0.0)};
        const TwoLevelHamiltonian hT{0.0, path.coupling_g, path.field_at(path.period_T)};
        const auto e0 = eigensystem(h0);
        const auto eT = eigensystem(hT);
        CHECK(max_component_distance(e0.v_plus, eT.v_plus) < 1e-12);
        CHECK(max_component_distance(e0.v_minus, eT.v_minus) < 1e-12);
    }
}
