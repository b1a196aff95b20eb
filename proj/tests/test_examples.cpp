#include "avgbound/errors.hpp"
#include "avgbound/examples.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace avgbound;
using namespace avgbound::examples;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

Vector v1(double x) { return Vector::Constant(1, x); }
Vector v2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("example ids round-trip through their names") {
    for (auto id : {ExampleId::vdp, ExampleId::action_freq, ExampleId::resonant, ExampleId::euler_top})
        CHECK(parse_example_id(to_string(id)) == id);
    CHECK(to_string(ExampleId::action_freq) == "action-freq");
    CHECK_THROWS_AS(parse_example_id("pendulum"), ConfigError);
}

TEST_CASE("van der Pol table values") {
    const auto ex = make_vdp();
    CHECK(ex.d == 1);
    const auto spec = ex.make_spec(v1(0.5), 0.0, 1e-2);
    CHECK(spec.omega(v1(3)) == -1.0);
    CHECK_FALSE(spec.in_domain(v1(0)));
    CHECK(spec.in_domain(v1(1e-9)));
    CHECK(ex.aux.s(v1(1), pi / 4)(0) == Approx(0.5).epsilon(1e-14));
    CHECK(ex.aux.fbar(v1(4))(0) == -4.0);
    for (double I : {0.3, 1.0, 7.0}) {
        CHECK(ex.aux.pbar(v1(I))(0) == 0.0);
        CHECK(ex.aux.g_script(v1(I), v1(0.2))(0, 0) == 0.0);
        CHECK(ex.aux.h_script(v1(I), v1(0.2))(0, 0, 0) == -1.0);
    }
}

TEST_CASE("action-dependent frequency table values") {
    for (double kappa : {1.0, -1.0}) {
        const auto ex = make_action_freq(kappa);
        for (double I : {0.5, 1.0, 3.0}) {
            CHECK(ex.aux.fbar(v1(I))(0) == Approx(kappa * I * I));
            CHECK(ex.aux.pbar(v1(I))(0) == Approx(-0.5 * I * I * I));
        }
        const auto spec = ex.make_spec(v1(1), 0, 1e-2);
        CHECK(spec.omega(v1(2.5)) == 2.5);
    }
    CHECK_THROWS_AS(make_action_freq(0.5), ConfigError);
    CHECK_THROWS_AS(make_action_freq(0.0), ConfigError);

    // K <= 0 along the kappa = 1 solution while it exists
    const auto cf = make_action_freq(1).closed_forms(v1(1));
    for (double tau = 0; tau < 0.99; tau += 0.01) CHECK(cf.K(tau)(0) <= 0.0);
    CHECK(cf.K(0.5)(0) == Approx(std::log(0.5) / (2 * 0.25)).epsilon(1e-14));
    CHECK(cf.K(0.5)(0) == Approx(-1.386294).epsilon(1e-6));
}

TEST_CASE("resonant table values") {
    const auto ex = make_resonant();
    CHECK(ex.aux.s(v1(2), pi / 2)(0) == Approx(-0.5));
    for (double I : {0.5, 2.0, 9.0})
        for (double th : {0.1, 1.3, 4.0}) {
            CHECK(ex.aux.w(v1(I), th)(0) == Approx(ex.aux.q(v1(I), th)(0) / 4));
            CHECK(ex.aux.m_script(v1(I))(0, 0) == 0.0);
            CHECK(ex.aux.g_script(v1(I), v1(0.1))(0, 0) == 0.0);
            CHECK(ex.aux.h_script(v1(I), v1(0.1))(0, 0, 0) == 0.0);
        }
    const auto cf = ex.closed_forms(v1(2));
    CHECK(cf.J(3.0)(0) == 5.0);
    CHECK(cf.R(3.0)(0, 0) == 1.0);
    CHECK(cf.K(3.0)(0) == 0.0);
    const auto spec = ex.make_spec(v1(2), 0, 1e-2);
    CHECK(spec.omega(v1(2)) == 2.0);
}

TEST_CASE("resonant analytic partials match finite differences") {
    const auto& b = make_resonant().bounds;
    const Vector J = v1(2.3);
    const Matrix R = Matrix::Identity(1, 1);
    const Vector K = v1(0);
    const double r = 0.7, h = 1e-6;
    CHECK(b.a_hat_dr(J, R, K, r) == Approx((b.a_hat(J, R, K, r + h) - b.a_hat(J, R, K, r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(b.b_hat_dr(J, r) == Approx((b.b_hat(J, r + h) - b.b_hat(J, r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(b.a_hat_grad(J, R, K, r).dJ(0) ==
          Approx((b.a_hat(v1(2.3 + h), R, K, r) - b.a_hat(v1(2.3 - h), R, K, r)) / (2 * h)).epsilon(1e-7));
    CHECK(b.b_hat_dJ(J, r)(0) == Approx((b.b_hat(v1(2.3 + h), r) - b.b_hat(v1(2.3 - h), r)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("Euler top table values and parameter constraints") {
    const auto ex = make_euler_top(1, 2, -1);
    CHECK(ex.d == 2);
    const Vector I = v2(3, 0.5);
    CHECK((ex.aux.fbar(I) - v2(-2 * 3, 0.5)).norm() < 1e-15);
    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = -4;
    M(1, 1) = -1;
    CHECK((ex.aux.m_script(I) - M).norm() == 0.0);
    CHECK(ex.bounds.rho_hat(I) == 0.5);
    const auto spec = ex.make_spec(v2(4, 4), 0, 1e-2);
    CHECK(spec.omega(I) == 1.5);
    CHECK_FALSE(spec.in_domain(v2(1, -1)));

    CHECK_THROWS_AS(make_euler_top(3, 2, -1), ConfigError);
    CHECK_THROWS_AS(make_euler_top(-2, 2, -1), ConfigError);
    CHECK_THROWS_AS(make_euler_top(0, 0, 1), ConfigError);
    CHECK_THROWS_AS(make_euler_top(1, 2, -2), ConfigError);
    CHECK_NOTHROW(make_euler_top(1, 1.1, -1));

    const auto cf = ex.closed_forms(v2(4, 4));
    CHECK(cf.J(1.0)(0) == Approx(4 * std::exp(-2.0)).epsilon(1e-15));
    CHECK(cf.J(1.0)(0) == Approx(0.541341).epsilon(1e-6));
    CHECK(cf.R(1.0)(0, 0) == Approx(std::exp(-2.0)));
    CHECK(cf.R(1.0)(1, 1) == Approx(std::exp(1.0)));
    CHECK(cf.R(1.0)(0, 1) == 0.0);
    CHECK(cf.K(1.0).norm() == 0.0);
}

TEST_CASE("closed forms satisfy their slow equations") {
    // J' = fbar(J), R' = dfbar(J) R, K' = dfbar(J) K + pbar(J) by central differences.
    struct Case {
        ExampleDefinition ex;
        Vector i0;
        double span;
    };
    std::vector<Case> cases{{make_vdp(), v1(0.5), 10},
                            {make_vdp(), v1(4), 10},
                            {make_action_freq(1), v1(1), 0.9},
                            {make_action_freq(-1), v1(1), 20},
                            {make_resonant(), v1(2), 10},
                            {make_euler_top(1, 2, -1), v2(4, 1), 1}};
    for (const auto& c : cases) {
        const auto cf = c.ex.closed_forms(c.i0);
        CHECK((cf.J(0) - c.i0).norm() == 0.0);
        CHECK((cf.R(0) - Matrix::Identity(c.ex.d, c.ex.d)).norm() < 1e-15);
        CHECK(cf.K(0).norm() == 0.0);
        for (int k = 1; k < 10; ++k) {
            const double tau = c.span * k / 10, h = 1e-5;
            const Vector J = cf.J(tau);
            const Vector dJ = (cf.J(tau + h) - cf.J(tau - h)) / (2 * h);
            const Matrix dR = (cf.R(tau + h) - cf.R(tau - h)) / (2 * h);
            const Vector dK = (cf.K(tau + h) - cf.K(tau - h)) / (2 * h);
            const Matrix Df = c.ex.aux.dfbar(J);
            const double scale = 1 + J.norm() + Df.norm() * (1 + cf.R(tau).norm() + cf.K(tau).norm());
            CHECK((dJ - c.ex.aux.fbar(J)).norm() < 1e-6 * scale);
            CHECK((dR - Df * cf.R(tau)).norm() < 1e-6 * scale);
            CHECK((dK - Df * cf.K(tau) - c.ex.aux.pbar(J)).norm() < 1e-6 * scale * (1 + cf.K(tau).norm()));
        }
    }
}

TEST_CASE("presets carry their parameters") {
    CHECK(all_presets().size() == 18);
    const auto& p1a = find_preset("1a");
    CHECK(p1a.example == ExampleId::vdp);
    CHECK(p1a.i0(0) == 0.5);
    CHECK(p1a.epsilon == 1e-2);
    CHECK(p1a.U == 10);
    CHECK(find_preset("1c").U == 200);

    const auto& p2d = find_preset("2d");
    CHECK(p2d.params.kappa == -1);
    CHECK(p2d.i0(0) == 1);
    CHECK(p2d.epsilon == 1e-2);
    CHECK(p2d.U == 200);
    CHECK(find_preset("2a").params.kappa == 1);
    CHECK(find_preset("2a").U == 0.9);

    CHECK(find_preset("3c").epsilon == 1e-3);
    CHECK(find_preset("3e").i0(0) == 2);
    CHECK(find_preset("3f").U == 200);

    const auto& p4a = find_preset("4a");
    CHECK(p4a.params.mu == 1);
    CHECK(p4a.params.lambda1 == 2);
    CHECK(p4a.params.lambda2 == -1);
    CHECK((p4a.i0 - v2(4, 4)).norm() == 0);
    CHECK(p4a.epsilon == 1e-2);
    CHECK(p4a.U == 1);
    CHECK(find_preset("4d").epsilon == 1e-3);

    CHECK_THROWS_AS(find_preset("5a"), ConfigError);
    for (const auto& p : all_presets()) {
        const auto ex = make_example(p.example, p.params);
        CHECK(static_cast<std::size_t>(p.i0.size()) == ex.d);
        CHECK(p.epsilon > 0);
        CHECK(p.U > 0);
        CHECK(ex.make_spec(p.i0, p.theta0, p.epsilon).in_domain(p.i0));
    }
}

TEST_CASE("physical coordinate maps") {
    const Vector x = angle_to_physical(ExampleId::vdp, v1(2), 0.0);
    CHECK(x(0) == Approx(2.0));
    CHECK(std::abs(x(1)) < 1e-15);
    const Vector y = angle_to_physical(ExampleId::vdp, v1(2), pi / 2);
    CHECK(std::abs(y(0)) < 1e-15);
    CHECK(y(1) == Approx(2.0));
    const Vector pqr = angle_to_physical(ExampleId::euler_top, v2(1, 1), 0.0);
    CHECK((pqr - Vector::Map(std::vector<double>{1, 0, 1}.data(), 3)).norm() < 1e-15);
    CHECK_THROWS_AS(angle_to_physical(ExampleId::resonant, v1(1), 0.0), ConfigError);
}
