#include "avgbound/errors.hpp"
#include "avgbound/examples.hpp"
#include "avgbound/n_operation.hpp"
#include "avgbound/validation.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace avgbound;
using Catch::Approx;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

struct Run {
    examples::ExampleDefinition ex;
    SystemSpec spec;
    EstimatorTrajectory est;
};

Run run_preset(const std::string& figure, double U = 0.0) {
    const auto& p = examples::find_preset(figure);
    Run r{examples::make_example(p.example, p.params), {}, {}};
    r.spec = r.ex.make_spec(p.i0, p.theta0, p.epsilon);
    r.est = run_n_operation(r.spec, r.ex.aux, r.ex.bounds, U > 0 ? U : p.U);
    return r;
}

}  // namespace

TEST_CASE("packed layout round-trips") {
    const PackedLayout layout{2};
    CHECK(layout.size() == 10);
    Vector J(2), K(2);
    J << 1, 2;
    K << 7, 8;
    Matrix R(2, 2);
    R << 3, 4, 5, 6;
    const Vector y = layout.pack(J, R, K, 9, 10);
    CHECK(y(2) == 3);
    CHECK(y(3) == 4);
    CHECK(y(4) == 5);
    CHECK(layout.J(y) == J);
    CHECK(layout.R(y) == R);
    CHECK(layout.K(y) == K);
    CHECK(layout.m(y) == 9);
    CHECK(layout.n(y) == 10);
}

TEST_CASE("resonant fixed point matches the scalar iteration") {
    const auto ex = examples::make_resonant();
    const auto spec = ex.make_spec(v1(2), 0, 1e-2);
    const ContractionWindow window{0.5, 0.4, 0.3};
    CHECK_NOTHROW(check_window(spec, ex.bounds, window));
    const auto fp = find_fixed_point(spec, ex.bounds, window, 1e-12);
    const double expected = oracle::resonant_fixed_point(2.0, 1e-2);
    CHECK(std::abs(fp.ell0 - expected) < 1e-9);
    CHECK(std::abs(fp.ell0 - 0.503779) < 5e-6);
    CHECK(fp.residual <= 1e-12);
    CHECK(fp.a_posteriori <= 1e-12);
    CHECK(std::abs(alpha(ex.bounds, v1(2), Matrix::Identity(1, 1), v1(0), 1e-2 * fp.ell0, 1e-2) - fp.ell0) <= 1e-12);
}

TEST_CASE("van der Pol fixed point matches a bracketing root") {
    const auto ex = examples::make_vdp();
    const double eps = 1e-2;
    const auto spec = ex.make_spec(v1(4), 0, eps);
    const auto window = auto_window(spec, ex.bounds);
    const auto fp = find_fixed_point(spec, ex.bounds, window, 1e-13);
    const Matrix R = Matrix::Identity(1, 1);
    const double root = oracle::bisect(
        [&](double l) { return l - alpha(ex.bounds, v1(4), R, v1(0), eps * l, eps); }, 0.0, 0.999 * 4 / eps);
    CHECK(std::abs(fp.ell0 - root) < 1e-10);
}

TEST_CASE("vanishing eps makes the fixed point alpha(0, 0)") {
    const auto ex = examples::make_resonant();
    const auto spec = ex.make_spec(v1(2), 0, 1e-15);
    const auto fp = find_fixed_point(spec, ex.bounds, auto_window(spec, ex.bounds));
    CHECK(fp.ell0 == Approx(0.5).epsilon(1e-13));
    CHECK(fp.iterations <= 3);
}

TEST_CASE("contraction window preconditions are enforced") {
    const auto ex = examples::make_resonant();
    const auto spec = ex.make_spec(v1(2), 0, 1e-2);
    // M below the sampled slope
    CHECK_THROWS_AS(check_window(spec, ex.bounds, {0.5, 0.4, 0.1}), ContractionViolation);
    CHECK_THROWS_AS(find_fixed_point(spec, ex.bounds, {0.5, 0.4, 0.1}), ContractionViolation);
    // self-map condition fails: window far from the fixed point
    CHECK_THROWS_AS(check_window(spec, ex.bounds, {5.0, 0.4, 0.3}), ContractionViolation);
    // window leaves (0, rho/eps)
    CHECK_THROWS_AS(check_window(spec, ex.bounds, {0.3, 0.4, 0.3}), ContractionViolation);
    CHECK_THROWS_AS(check_window(spec, ex.bounds, {150.0, 60.0, 1.0}), ContractionViolation);
    // M >= 1/eps
    CHECK_THROWS_AS(check_window(spec, ex.bounds, {0.5, 0.4, 100.0}), ContractionViolation);
    CHECK_THROWS_AS(find_fixed_point(spec, ex.bounds, {0.5, 0.4, 0.3}, 1e-300, 2), NoConvergence);
}

TEST_CASE("automatic windows pass their own check for every preset") {
    for (const auto& p : examples::all_presets()) {
        const auto ex = examples::make_example(p.example, p.params);
        const auto spec = ex.make_spec(p.i0, p.theta0, p.epsilon);
        const auto w = auto_window(spec, ex.bounds);
        CHECK_NOTHROW(check_window(spec, ex.bounds, w));
        CHECK(w.M * p.epsilon < 1.0);
    }
}

TEST_CASE("finite-difference alpha partials agree with analytic ones") {
    auto ex = examples::make_resonant();
    const Vector J = v1(2.5);
    const Matrix R = Matrix::Identity(1, 1);
    const Vector K = v1(0);
    const double analytic = alpha_dr(ex.bounds, J, R, K, 0.3, 1e-2);
    const auto grad = alpha_gradient(ex.bounds, J, R, K, 0.3, 1e-2);
    ex.bounds.a_hat_dr = nullptr;
    ex.bounds.b_hat_dr = nullptr;
    ex.bounds.a_hat_grad = nullptr;
    ex.bounds.b_hat_dJ = nullptr;
    CHECK(alpha_dr(ex.bounds, J, R, K, 0.3, 1e-2) == Approx(analytic).epsilon(1e-8));
    CHECK(alpha_gradient(ex.bounds, J, R, K, 0.3, 1e-2).dJ(0) == Approx(grad.dJ(0)).epsilon(1e-8));
    // one-sided stencil at r = 0
    CHECK(alpha_dr(ex.bounds, J, R, K, 0.0, 1e-2) == Approx(1 / 6.25 + 1e-2 * 6 / std::pow(2.5, 4)).epsilon(1e-7));
}

TEST_CASE("slow right-hand side: resonant example in closed form") {
    const auto ex = examples::make_resonant();
    const double eps = 1e-2;
    const auto spec = ex.make_spec(v1(2), 0, eps);
    const auto rhs = assemble_slow_rhs(spec, ex.aux, ex.bounds);
    const PackedLayout layout{1};
    for (double J : {2.0, 3.5, 7.0})
        for (double n : {0.5, 3.0, 40.0}) {
            const Vector d = rhs(0.0, layout.pack(v1(J), Matrix::Identity(1, 1), v1(0), 0.2, n));
            const double x = J - eps * n;
            const double da_dJ = -1 / (x * x) - 6 * eps / std::pow(x, 4);
            const double da_dr = -da_dJ;
            const double gamma = 12 / std::pow(x, 4);
            CHECK(layout.J(d)(0) == 1.0);
            CHECK(layout.R(d)(0, 0) == 0.0);
            CHECK(layout.K(d)(0) == 0.0);
            CHECK(layout.m(d) == Approx(gamma).epsilon(1e-12));
            CHECK(layout.n(d) == Approx((da_dJ + eps * gamma) / (1 - eps * da_dr)).epsilon(1e-9));
        }
}

TEST_CASE("slow right-hand side: van der Pol drift and scalar norms") {
    const auto ex = examples::make_vdp();
    const double eps = 1e-2;
    const auto spec = ex.make_spec(v1(4), 0, eps);
    const auto rhs = assemble_slow_rhs(spec, ex.aux, ex.bounds);
    const PackedLayout layout{1};
    const Vector y0 = layout.pack(v1(4), Matrix::Identity(1, 1), v1(0), 0.0, 1.0);
    const Vector d = rhs(0.0, y0);
    CHECK(layout.J(d)(0) == -4.0);
    CHECK(layout.R(d)(0, 0) == -3.0);

    // With R > 0, |R|^-1 (R . R') = R' and the n equation reduces to (1 - eps a_r)^-1 (a_tau + eps gamma + eps R' m).
    const double R = 0.7, m = 2.0, n = 1.5, J = 3.0;
    const Vector y = layout.pack(v1(J), Matrix::Constant(1, 1, R), v1(0), m, n);
    const Vector dy = rhs(0.0, y);
    const double r = eps * n;
    const double dR = (1 - J) * R;
    const auto grad = alpha_gradient(ex.bounds, v1(J), Matrix::Constant(1, 1, R), v1(0), r, eps);
    const double a_tau = grad.dJ(0) * J * (1 - J / 2) + grad.dR(0, 0) * dR;
    const double g = gamma(ex.bounds, v1(J), r, n);
    const double a_r = alpha_dr(ex.bounds, v1(J), Matrix::Constant(1, 1, R), v1(0), r, eps);
    CHECK(layout.m(dy) == Approx(g / R).epsilon(1e-12));
    CHECK(layout.n(dy) == Approx((a_tau + eps * g + eps * dR * m) / (1 - eps * a_r)).epsilon(1e-10));

    CHECK_THROWS_AS(rhs(0.0, layout.pack(v1(J), Matrix::Constant(1, 1, R), v1(0), m, -1.0)), DomainError);
    CHECK_THROWS_AS(rhs(0.0, layout.pack(v1(J), Matrix::Constant(1, 1, R), v1(0), m, J / eps)), DomainError);
    CHECK_THROWS_AS(rhs(0.0, layout.pack(v1(J), Matrix::Constant(1, 1, 0.0), v1(0), m, n)), SingularMatrixError);
}

TEST_CASE("estimator invariants hold on every preset") {
    for (const auto& p : examples::all_presets()) {
        const auto run = run_preset(p.figure);
        const auto& est = run.est;
        INFO("preset " << p.figure);
        REQUIRE(est.tau.size() >= 2);
        CHECK(est.tau.front() == 0.0);
        CHECK((est.R.front() - Matrix::Identity(est.d, est.d)).norm() == 0.0);
        CHECK(est.K.front().norm() == 0.0);
        CHECK(est.m.front() == 0.0);
        CHECK(est.n.front() == est.ell0);
        CHECK(est.window_auto);
        for (std::size_t k = 0; k < est.tau.size(); ++k) {
            if (k > 0) {
                CHECK(est.tau[k] > est.tau[k - 1]);
                CHECK(est.m[k] >= est.m[k - 1]);
            }
            CHECK(std::abs(est.R[k].determinant()) > 0.0);
            CHECK(est.n[k] > 0.0);
            CHECK(est.epsilon * est.n[k] < run.ex.bounds.rho_hat(est.J[k]));
            CHECK(est.epsilon * alpha_dr(run.ex.bounds, est.J[k], est.R[k], est.K[k], est.epsilon * est.n[k],
                                         est.epsilon) <
                  1.0);
        }
        CHECK(est.status == EstimatorStatus::completed);
        CHECK(est.end_tau() == p.U);
        CHECK(std::abs(alpha(run.ex.bounds, run.spec.i0, Matrix::Identity(est.d, est.d),
                             Vector::Zero(static_cast<Eigen::Index>(est.d)), est.epsilon * est.ell0, est.epsilon) -
                       est.ell0) <= 1e-12);
    }
}

TEST_CASE("van der Pol estimator approaches a plateau") {
    const auto run = run_preset("1c");
    REQUIRE(run.est.status == EstimatorStatus::completed);
    const double n150 = PackedLayout{1}.n(run.est.state_at(150.0));
    const double n200 = run.est.n.back();
    CHECK(std::abs(n200 - n150) < 1e-6 * n200);
}

TEST_CASE("action-frequency blow-up: completes to 0.9, stops before 1") {
    const auto ok = run_preset("2a");
    CHECK(ok.est.status == EstimatorStatus::completed);
    for (std::size_t k = 0; k < ok.est.tau.size(); ++k)
        CHECK(std::abs(ok.est.J[k](0) - 1 / (1 - ok.est.tau[k])) <= 1e-8 * ok.est.J[k](0));

    const auto blow = run_preset("2a", 1.0);
    CHECK(blow.est.status != EstimatorStatus::completed);
    CHECK(blow.est.end_tau() < 1.0);
    CHECK(blow.est.end_tau() > 0.9);
    REQUIRE(blow.est.violation_kind);
    CHECK(*blow.est.violation_kind == ViolationKind::n_exceeds_rho_over_eps);
}

TEST_CASE("Wronskian identity and K representation along trajectories") {
    for (const char* figure : {"1b", "2a", "2d", "4b", "4d"}) {
        INFO("preset " << figure);
        const auto run = run_preset(figure);
        const auto& est = run.est;
        const PackedLayout layout{est.d};
        const auto& aux = run.ex.aux;
        const auto trace = oracle::cumulative_simpson(est.raw, [&](double, const Vector& y) {
            return Vector::Constant(1, aux.dfbar(layout.J(y)).trace());
        });
        const auto integral = oracle::cumulative_simpson(est.raw, [&](double, const Vector& y) {
            return Vector(layout.R(y).inverse() * aux.pbar(layout.J(y)));
        });
        double wronskian = 0.0, krep = 0.0;
        for (std::size_t k = 0; k < est.tau.size(); ++k) {
            const double det = est.R[k].determinant();
            wronskian = std::max(wronskian, std::abs(det - std::exp(trace[k](0))) / std::abs(det));
            const Vector K = est.R[k] * integral[k];
            krep = std::max(krep, (est.K[k] - K).norm() / std::max(1.0, K.norm()));
            if (est.d == 1) {
                CHECK(est.R[k](0, 0) > 0.0);
            }
        }
        CHECK(wronskian < 1e-6);
        CHECK(krep < 1e-6);
    }
}

TEST_CASE("closed-form crosscheck on every preset grid") {
    for (const auto& p : examples::all_presets()) {
        INFO("preset " << p.figure);
        const auto run = run_preset(p.figure);
        const auto suite = analytic_crosscheck(run.ex, p.i0, run.est, 1e-8);
        for (const auto& r : suite.reports) {
            INFO(r.check << " " << r.max_residual);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("explicit windows are honoured") {
    const auto ex = examples::make_resonant();
    const auto spec = ex.make_spec(v1(2), 0, 1e-2);
    EstimatorOptions o;
    o.window = ContractionWindow{0.5, 0.4, 0.3};
    const auto est = run_n_operation(spec, ex.aux, ex.bounds, 10.0, o);
    CHECK_FALSE(est.window_auto);
    CHECK(est.window.M == 0.3);
    CHECK(std::abs(est.ell0 - oracle::resonant_fixed_point(2.0, 1e-2)) < 1e-9);
    o.window = ContractionWindow{0.5, 0.4, 0.1};
    CHECK_THROWS_AS(run_n_operation(spec, ex.aux, ex.bounds, 10.0, o), ContractionViolation);
    CHECK_THROWS_AS(run_n_operation(spec, ex.aux, ex.bounds, 0.0), ConfigError);
}
