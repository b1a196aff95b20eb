#include "avgbound/validation.hpp"

#include "avgbound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avgbound {

using nlohmann::json;

void ValidationReport::finalize() {
    pass = counts_violations ? violations == 0 : (std::isfinite(max_residual) && max_residual <= tolerance);
}

json ValidationReport::to_json() const {
    json j;
    j["check"] = check;
    j["samples"] = samples;
    if (counts_violations) {
        j["violations"] = violations;
    } else {
        j["max_residual"] = max_residual;
        j["tolerance"] = tolerance;
    }
    j["pass"] = pass;
    j["details"] = details;
    return j;
}

bool ValidationSuite::pass() const {
    return std::all_of(reports.begin(), reports.end(), [](const ValidationReport& r) { return r.pass; });
}

const ValidationReport& ValidationSuite::find(const std::string& check) const {
    for (const auto& r : reports)
        if (r.check == check) return r;
    throw std::out_of_range("no validation report named '" + check + "'");
}

json ValidationSuite::to_json() const {
    json j;
    j["suite"] = name;
    j["pass"] = pass();
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(r.to_json());
    return j;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFdStep = 1e-6;
constexpr int kAverageNodes = 256;

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

double step_for(double x) { return kFdStep * std::max(1.0, std::abs(x)); }

// Fourth-order central difference of a vector-valued function of one real.
template <class F>
Vector d_dx(const F& fn, double x) {
    const double h = step_for(x);
    return (-fn(x + 2 * h) + 8.0 * fn(x + h) - 8.0 * fn(x - h) + fn(x - 2 * h)) / (12.0 * h);
}

Vector d_dtheta(const AngleVectorField& field, const Vector& I, double th) {
    return d_dx([&](double t) { return field(I, t); }, th);
}

// Jacobian in the actions, column k = derivative along e_k.
template <class F>
Matrix jacobian(const F& fn, const Vector& I) {
    const auto d = I.size();
    Matrix jac(fn(I).size(), d);
    for (Eigen::Index k = 0; k < d; ++k) {
        auto along = [&](double x) {
            Vector J = I;
            J(k) = x;
            return fn(J);
        };
        jac.col(k) = d_dx(along, I(k));
    }
    return jac;
}

Matrix dI(const AngleVectorField& field, const Vector& I, double th) {
    return jacobian([&](const Vector& J) { return field(J, th); }, I);
}

template <class F>
Vector angle_average(const F& fn) {
    Vector sum = fn(0.0);
    sum.setZero();
    for (int k = 0; k < kAverageNodes; ++k) sum += fn(kTwoPi * k / kAverageNodes);
    return sum / static_cast<double>(kAverageNodes);
}

// Running max of a scaled residual with its location.
struct Tracker {
    ValidationReport report;

    Tracker(std::string name, double tol) {
        report.check = std::move(name);
        report.tolerance = tol;
    }

    void add(double residual, const json& where) {
        ++report.samples;
        if (report.samples == 1 || !(residual <= report.max_residual)) {
            report.max_residual = std::isfinite(residual) ? residual : INFINITY;
            report.details = where;
        }
    }

    ValidationReport done() {
        report.finalize();
        return report;
    }
};

double scaled(const Vector& diff, std::initializer_list<double> sizes) {
    double scale = 1.0;
    for (double s : sizes) scale = std::max(scale, s);
    return diff.norm() / scale;
}

double scaled(const Matrix& diff, std::initializer_list<double> sizes) {
    double scale = 1.0;
    for (double s : sizes) scale = std::max(scale, s);
    return diff.norm() / scale;
}

std::vector<Vector> action_grid(const examples::SamplingBox& box, int per_axis) {
    std::vector<Vector> out;
    const auto d = box.lo.size();
    auto coord = [&](Eigen::Index axis, int k) {
        return box.lo(axis) + (box.hi(axis) - box.lo(axis)) * k / std::max(1, per_axis - 1);
    };
    if (d == 1) {
        for (int k = 0; k < per_axis; ++k) {
            Vector I(1);
            I(0) = coord(0, k);
            out.push_back(I);
        }
    } else if (d == 2) {
        for (int a = 0; a < per_axis; ++a)
            for (int b = 0; b < per_axis; ++b) {
                Vector I(2);
                I << coord(0, a), coord(1, b);
                out.push_back(I);
            }
    } else {
        throw ConfigError("identity grid supports d = 1 or 2");
    }
    return out;
}

std::vector<Vector> taylor_increments(const Vector& I) {
    std::vector<Vector> out;
    if (I.size() == 1) {
        for (double c : {-0.5, -0.2, 0.3, 1.0}) out.push_back(c * I);
    } else {
        const double pairs[4][2] = {{-0.5, 0.3}, {0.4, -0.2}, {1.0, 1.0}, {-0.3, -0.6}};
        for (const auto& p : pairs) {
            Vector dI = I;
            for (Eigen::Index i = 0; i < I.size(); ++i) dI(i) *= p[i % 2];
            out.push_back(dI);
        }
    }
    return out;
}

// Size of the chain-rule terms (dX/dI) f + (dX/dtheta) g.
double chain_size(const Matrix& dX, const Vector& f, const Vector& dX_th, double g) {
    return dX.norm() * f.norm() + dX_th.norm() * std::abs(g);
}

bool violates(double lhs, double bound) { return lhs > bound * (1.0 + 1e-10) + 1e-14; }

}  // namespace

ValidationSuite verify_identities(const SystemSpec& spec, const AuxiliaryBundle& aux, const IdentityGrid& grid) {
    const double tol = grid.tolerance;
    Tracker s_mean("s_mean_zero", tol), fbar_mean("fbar_is_mean_of_f", tol), pbar_mean("pbar_is_mean_of_p", tol);
    Tracker f_dec("f_decomposition", tol), p_def("p_definition", tol), s_v("s_from_v", tol);
    Tracker v0("v_vanishes_at_theta0", tol), q_def("q_definition", tol), p_dec("p_decomposition", tol);
    Tracker w0("w_vanishes_at_theta0", tol), u_def("u_definition", tol), m_def("m_script_definition", tol);
    Tracker jac("dfbar_is_jacobian", tol), h_sym("h_script_symmetric", 0.0);
    Tracker t0("taylor_pbar", tol), t1("taylor_fbar", tol);

    const double th0 = spec.theta0;
    for (const Vector& I : action_grid(grid.box, grid.actions_per_axis)) {
        if (!spec.in_domain(I)) throw DomainError("identity grid point outside the action domain");
        const json at_I = {{"I", to_json(I)}};
        const double om = spec.omega(I);
        const Vector fb = aux.fbar(I);
        const Matrix Df = aux.dfbar(I);
        const Vector pb = aux.pbar(I);

        double s_size = 0, v_size = 0, w_size = 0;
        for (int k = 0; k < kAverageNodes; k += 8) {
            const double th = kTwoPi * k / kAverageNodes;
            s_size = std::max(s_size, aux.s(I, th).norm());
            v_size = std::max(v_size, aux.v(I, th).norm());
            w_size = std::max(w_size, aux.w(I, th).norm());
        }
        s_mean.add(scaled(angle_average([&](double t) { return aux.s(I, t); }), {s_size}), at_I);
        const Vector fmean = angle_average([&](double t) { return spec.f(I, t); });
        fbar_mean.add(scaled(Vector(fb - fmean), {fb.norm(), fmean.norm()}), at_I);
        const Vector pmean = angle_average([&](double t) { return aux.p(I, t); });
        pbar_mean.add(scaled(Vector(pb - pmean), {pb.norm(), pmean.norm()}), at_I);
        v0.add(scaled(aux.v(I, th0), {v_size}), at_I);
        w0.add(scaled(aux.w(I, th0), {w_size}), at_I);

        const Matrix Df_fd = jacobian(aux.fbar, I);
        jac.add(scaled(Matrix(Df - Df_fd), {Df.norm()}), at_I);

        // d(dfbar)/dI contracted with fbar: directional derivative along fbar.
        const Matrix hess_fbar = [&] {
            const double h = kFdStep * std::max(1.0, I.norm()) / std::max(1.0, fb.norm());
            auto at = [&](double x) { return aux.dfbar(I + x * fb); };
            return Matrix((-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h));
        }();
        const Matrix M_expected = hess_fbar - Df * Df;
        const Matrix M = aux.m_script(I);
        m_def.add(scaled(Matrix(M - M_expected), {M.norm(), hess_fbar.norm(), (Df * Df).norm()}), at_I);

        for (int a = 0; a < grid.angles; ++a) {
            const double th = kTwoPi * (a + 0.37) / grid.angles;
            const json where = {{"I", to_json(I)}, {"theta", th}};
            const Vector f = spec.f(I, th);
            const double g = spec.g(I, th);

            const Vector s_th = d_dtheta(aux.s, I, th);
            f_dec.add(scaled(Vector(f - fb - om * s_th), {f.norm(), fb.norm(), std::abs(om) * s_th.norm()}), where);

            const Vector p = aux.p(I, th);
            const Vector p_expected = dI(aux.s, I, th) * f + s_th * g;
            p_def.add(scaled(Vector(p - p_expected), {p.norm(), chain_size(dI(aux.s, I, th), f, s_th, g)}), where);

            const Vector s = aux.s(I, th);
            const Vector v_th = d_dtheta(aux.v, I, th);
            s_v.add(scaled(Vector(s - om * v_th), {s.norm(), std::abs(om) * v_th.norm()}), where);

            const Vector q = aux.q(I, th);
            const Vector q_expected = dI(aux.v, I, th) * f + v_th * g;
            q_def.add(scaled(Vector(q - q_expected), {q.norm(), chain_size(dI(aux.v, I, th), f, v_th, g)}), where);

            const Vector w_th = d_dtheta(aux.w, I, th);
            p_dec.add(scaled(Vector(p - pb - om * w_th), {p.norm(), pb.norm(), std::abs(om) * w_th.norm()}), where);

            const Vector u = aux.u(I, th);
            const Vector u_expected = dI(aux.w, I, th) * f + w_th * g;
            u_def.add(scaled(Vector(u - u_expected), {u.norm(), chain_size(dI(aux.w, I, th), f, w_th, g)}), where);
        }

        for (const Vector& dI_ : taylor_increments(I)) {
            if (!in_lambda_dagger(spec, {I, dI_})) throw DomainError("Taylor increment leaves the action domain");
            const json where = {{"I", to_json(I)}, {"dI", to_json(dI_)}};
            const Tensor3 H = aux.h_script(I, dI_);
            double asym = 0.0;
            for (std::size_t i = 0; i < H.dim(); ++i)
                for (std::size_t j = 0; j < H.dim(); ++j)
                    for (std::size_t k = 0; k < H.dim(); ++k) asym = std::max(asym, std::abs(H(i, j, k) - H(i, k, j)));
            h_sym.add(asym, where);

            const Vector pb1 = aux.pbar(I + dI_);
            const Vector Gd = aux.g_script(I, dI_) * dI_;
            t0.add(scaled(Vector(pb1 - pb - Gd), {pb1.norm(), pb.norm(), Gd.norm()}), where);

            const Vector fb1 = aux.fbar(I + dI_);
            const Vector lin = Df * dI_;
            const Vector quad = 0.5 * H.contract(dI_, dI_);
            t1.add(scaled(Vector(fb1 - fb - lin - quad), {fb1.norm(), fb.norm(), lin.norm(), quad.norm()}), where);
        }
    }

    ValidationSuite suite;
    suite.name = "identities";
    for (Tracker* t : {&s_mean, &fbar_mean, &pbar_mean, &f_dec, &p_def, &s_v, &v0, &q_def, &p_dec, &w0, &u_def,
                       &m_def, &jac, &h_sym, &t0, &t1})
        suite.reports.push_back(t->done());
    return suite;
}

ValidationSuite verify_bound_domination(const SystemSpec& spec, const AuxiliaryBundle& aux, const BoundBundle& bounds,
                                        const EstimatorTrajectory& est, const DominationOptions& options) {
    if (est.tau.empty()) throw std::invalid_argument("empty estimator trajectory");
    const std::size_t d = spec.d;
    const PackedLayout layout{d};

    std::vector<Vector> directions;
    if (d == 1) {
        directions = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    } else {
        for (int k = 0; k < 16; ++k) {
            Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
            e(0) = std::cos(kTwoPi * k / 16);
            e(1) = std::sin(kTwoPi * k / 16);
            directions.push_back(e);
        }
    }
    const std::size_t per_tau = directions.size() * static_cast<std::size_t>(options.radii * options.angles);
    const std::size_t n_tau = std::max<std::size_t>(2, (options.min_samples + per_tau - 1) / per_tau);

    const double t_end = est.end_tau();
    const Vector s0 = aux.s(spec.i0, spec.theta0);

    ValidationReport fa{"domination_a"}, fb{"domination_b"}, fc{"domination_c"}, fd{"domination_d"},
        fe{"domination_e"}, mono{"monotone_cde"};
    for (ValidationReport* r : {&fa, &fb, &fc, &fd, &fe, &mono}) r->counts_violations = true;
    double worst_ratio[5] = {0, 0, 0, 0, 0};

    auto record = [&](ValidationReport& rep, int idx, double lhs, double bound, const json& where) {
        ++rep.samples;
        const double ratio = bound > 0 ? lhs / bound : (lhs > 0 ? INFINITY : 0.0);
        if (ratio > worst_ratio[idx] || rep.samples == 1) {
            worst_ratio[idx] = std::max(worst_ratio[idx], ratio);
            rep.details = where;
            rep.details["lhs"] = lhs;
            rep.details["bound"] = bound;
        }
        if (violates(lhs, bound)) ++rep.violations;
    };

    for (std::size_t it = 0; it < n_tau; ++it) {
        // Stratified: one tau per equal-width stratum, at its midpoint.
        const double tau = t_end * (static_cast<double>(it) + 0.5) / static_cast<double>(n_tau);
        const Vector y = est.state_at(tau);
        const Vector J = layout.J(y);
        const Matrix R = layout.R(y);
        const Vector K = layout.K(y);
        const double rho = bounds.rho_hat(J);
        const Matrix Df = aux.dfbar(J);
        const Matrix M = aux.m_script(J);
        const Vector Rs0 = R * s0;

        double prev_c = -INFINITY, prev_d = -INFINITY, prev_e = -INFINITY;
        for (int ir = 0; ir < options.radii; ++ir) {
            const double r = rho * options.max_radius_fraction * ir / std::max(1, options.radii - 1);
            const double a = bounds.a_hat(J, R, K, r);
            const double b = bounds.b_hat(J, r);
            const double c = bounds.c_hat(J, r);
            const double dd = bounds.d_hat(J, r);
            const double e = bounds.e_hat(J, r);

            const json mono_at = {{"tau", tau}, {"r", r}};
            for (auto [val, prev] : {std::pair{c, &prev_c}, std::pair{dd, &prev_d}, std::pair{e, &prev_e}}) {
                ++mono.samples;
                if (val < *prev - 1e-12 * std::abs(*prev)) {
                    ++mono.violations;
                    mono.details = mono_at;
                }
                *prev = val;
            }
            if (a < 0 || b < 0 || c < 0 || dd < 0 || e < 0) {
                ++mono.violations;
                mono.details = mono_at;
                mono.details["negative_bound"] = true;
            }

            for (const Vector& dir : directions) {
                const Vector dJ = r * dir;
                const Vector I = J + dJ;
                if (!spec.in_domain(I)) throw DomainError("domination sample outside the action domain");
                const json where = {{"tau", tau}, {"r", r}, {"I", to_json(I)}};
                record(fd, 3, frobenius_norm(aux.g_script(J, dJ)), dd, where);
                record(fe, 4, frobenius_norm(aux.h_script(J, dJ)), e, where);
                for (int ia = 0; ia < options.angles; ++ia) {
                    const double th = kTwoPi * ia / options.angles;
                    json at = where;
                    at["theta"] = th;
                    const Vector v = aux.v(I, th);
                    const Vector w = aux.w(I, th);
                    record(fa, 0, (aux.s(I, th) - Rs0 - K).norm(), a, at);
                    record(fb, 1, (w - Df * v).norm(), b, at);
                    record(fc, 2, (aux.u(I, th) - Df * (w + aux.q(I, th)) - M * v).norm(), c, at);
                }
            }
        }
    }

    ValidationSuite suite;
    suite.name = "bound_domination";
    int idx = 0;
    for (ValidationReport* r : {&fa, &fb, &fc, &fd, &fe}) {
        r->details["worst_ratio"] = worst_ratio[idx++];
        r->finalize();
        suite.reports.push_back(*r);
    }
    mono.finalize();
    suite.reports.push_back(mono);
    return suite;
}

IntegralIdentityResult verify_integral_identity(const SystemSpec& spec, const AuxiliaryBundle& aux,
                                                const EstimatorTrajectory& est, const DirectTrajectory& dir,
                                                double tolerance) {
    if (dir.t.size() < 2) throw std::invalid_argument("direct trajectory too short");
    const double eps = spec.epsilon;
    const auto dd = static_cast<Eigen::Index>(spec.d);
    const PackedLayout layout{spec.d};
    if (dir.L.size() != dir.t.size() || dir.theta.size() != dir.t.size())
        throw std::invalid_argument("grid mismatch: fast trajectory columns differ in length");
    if (eps * dir.t.back() > est.end_tau() * (1 + 1e-12) + 1e-15)
        throw std::invalid_argument("grid mismatch: fast trajectory extends beyond the slow trajectory");
    const Vector s0 = aux.s(spec.i0, spec.theta0);

    struct Point {
        Vector G;
        Vector rest;  // L - [s - R s0 - K - eps (w - Df v)]
        Matrix R;
        Vector L;
    };
    auto evaluate = [&](double t, const Vector& L, double theta) {
        const double tau = std::min(eps * t, est.end_tau());
        const Vector y = est.state_at(tau);
        const Vector J = layout.J(y);
        const Matrix R = layout.R(y);
        const Vector K = layout.K(y);
        const Vector I = J + eps * L;
        const Matrix Df = aux.dfbar(J);
        const Vector v = aux.v(I, theta);
        const Vector w = aux.w(I, theta);
        const Vector integrand = aux.u(I, theta) - Df * (w + aux.q(I, theta)) - aux.m_script(J) * v -
                                 aux.g_script(J, eps * L) * L + 0.5 * aux.h_script(J, eps * L).contract(L, L);
        Point p;
        p.G = checked_inverse(R) * integrand;
        p.rest = L - (aux.s(I, theta) - R * s0 - K - eps * (w - Df * v));
        p.R = R;
        p.L = L;
        return p;
    };

    std::vector<Point> pts;
    pts.reserve(dir.t.size());
    for (std::size_t k = 0; k < dir.t.size(); ++k) pts.push_back(evaluate(dir.t[k], dir.L[k], dir.theta[k]));

    // Residual vectors at every grid point, trapezoid (coarse) or with the
    // dense-output midpoint of each step (refined).
    auto residuals = [&](bool refine) {
        std::vector<Vector> out;
        out.reserve(pts.size());
        Vector Q = Vector::Zero(dd);
        out.push_back(pts[0].rest);
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double h = dir.t[k + 1] - dir.t[k];
            if (refine) {
                const double tm = dir.t[k] + 0.5 * h;
                const Vector ym = ode::sample(dir.raw, tm);
                const Point mid = evaluate(tm, ym.head(dd), ym(dd));
                Q += 0.25 * h * (pts[k].G + 2.0 * mid.G + pts[k + 1].G);
            } else {
                Q += 0.5 * h * (pts[k].G + pts[k + 1].G);
            }
            out.push_back(pts[k + 1].rest - eps * eps * pts[k + 1].R * Q);
        }
        return out;
    };
    auto report = [&](const std::string& name, const std::vector<Vector>& res) {
        ValidationReport rep;
        rep.check = name;
        rep.tolerance = tolerance;
        for (std::size_t k = 0; k < res.size(); ++k) {
            const double r = res[k].norm();
            ++rep.samples;
            if (k == 0 || !(r <= rep.max_residual)) {
                rep.max_residual = std::isfinite(r) ? r : INFINITY;
                rep.details = {{"t", dir.t[k]}, {"tau", eps * dir.t[k]}};
            }
        }
        rep.finalize();
        return rep;
    };

    const auto coarse = residuals(false);
    const auto refined = residuals(true);
    std::vector<Vector> extrapolated(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k) extrapolated[k] = (4.0 * refined[k] - coarse[k]) / 3.0;

    IntegralIdentityResult out;
    out.coarse = report("integral_identity", coarse);
    out.refined = report("integral_identity_refined", refined);
    out.extrapolated = report("integral_identity_extrapolated", extrapolated);
    out.refinement_ratio = out.refined.max_residual > 0 ? out.coarse.max_residual / out.refined.max_residual : INFINITY;
    out.coarse.details["refinement_ratio"] = out.refinement_ratio;
    out.extrapolated.details["coarse"] = out.coarse.max_residual;
    out.extrapolated.details["refined"] = out.refined.max_residual;
    out.extrapolated.details["refinement_ratio"] = out.refinement_ratio;
    return out;
}

HeadlineResult verify_headline_bound(const EstimatorTrajectory& est, const DirectTrajectory& dir,
                                     double envelope_window) {
    HeadlineResult out;
    ValidationReport& rep = out.report;
    rep.check = "headline_bound";
    rep.counts_violations = true;
    const PackedLayout layout{est.d};
    const double eps = dir.epsilon;
    const double end = est.end_tau();
    auto n_at = [&](double tau) { return layout.n(est.state_at(std::min(tau, end))); };

    if (eps * dir.t.back() > end * (1 + 1e-12) + 1e-15)
        throw std::invalid_argument("fast trajectory extends beyond the estimator");

    double worst = 0.0;
    for (std::size_t k = 0; k < dir.t.size(); ++k) {
        const double tau = eps * dir.t[k];
        const double n = n_at(tau);
        const double absL = dir.L[k].norm();
        ++rep.samples;
        if (absL > n + 1e-12 * n) ++rep.violations;
        const double ratio = absL / n;
        if (ratio > worst) {
            worst = ratio;
            rep.details["worst_tau"] = tau;
            rep.details["worst_absL"] = absL;
            rep.details["worst_n"] = n;
        }
    }
    rep.details["worst_ratio"] = worst;

    out.envelope = envelope(dir, envelope_window);
    for (const auto& e : out.envelope) {
        const double n = n_at(e.tau_peak);
        out.envelope_n.push_back(n);
        out.tightness_max = std::max(out.tightness_max, e.peak / n);
    }
    out.tightness_final = out.envelope.back().peak / out.envelope_n.back();
    rep.details["tightness_max"] = out.tightness_max;
    rep.details["tightness_final"] = out.tightness_final;
    rep.finalize();
    return out;
}

ValidationSuite analytic_crosscheck(const examples::ExampleDefinition& ex, const Vector& i0,
                                    const EstimatorTrajectory& est, double tolerance) {
    if (!ex.closed_forms) throw ConfigError("example has no closed forms");
    const examples::ClosedForms cf = ex.closed_forms(i0);
    Tracker tj("analytic_J", tolerance), tr("analytic_R", tolerance), tk("analytic_K", tolerance);
    for (std::size_t i = 0; i < est.tau.size(); ++i) {
        const double tau = est.tau[i];
        const json where = {{"tau", tau}};
        const Vector J = cf.J(tau);
        const Matrix R = cf.R(tau);
        const Vector K = cf.K(tau);
        tj.add((est.J[i] - J).norm() / std::max(1.0, J.norm()), where);
        tr.add((est.R[i] - R).norm() / std::max(1.0, R.norm()), where);
        tk.add((est.K[i] - K).norm() / std::max(1.0, K.norm()), where);
    }
    ValidationSuite suite;
    suite.name = "analytic_crosscheck";
    suite.reports = {tj.done(), tr.done(), tk.done()};
    return suite;
}

}  // namespace avgbound
