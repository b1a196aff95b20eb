#include "avgbound/examples.hpp"

#include "avgbound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace avgbound::examples {

namespace {

using std::cos;
using std::sin;
using std::sqrt;

Vector vec1(double x) {
    Vector v(1);
    v(0) = x;
    return v;
}

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

Matrix mat1(double x) {
    Matrix m(1, 1);
    m(0, 0) = x;
    return m;
}

Tensor3 tensor1(double x) { return Tensor3(1, x); }

// Lifts a scalar (I, theta) -> double map to the vector-valued d = 1 interface.
template <class F>
AngleVectorField scalar_angle_field(F fn) {
    return [fn](const Vector& I, double th) { return vec1(fn(I(0), th)); };
}

bool positive_orthant(const Vector& I) { return (I.array() > 0.0).all(); }

SystemSpec base_spec(std::size_t d, const Vector& i0, double theta0, double epsilon) {
    SystemSpec spec;
    spec.d = d;
    spec.i0 = i0;
    spec.theta0 = theta0;
    spec.epsilon = epsilon;
    spec.in_domain = positive_orthant;
    return spec;
}

Vector scalar_i0(const Vector& i0) {
    if (i0.size() != 1) throw ConfigError("this example takes one initial action");
    return i0;
}

FigurePreset preset(std::string fig, ExampleId id, Vector i0, double eps, double U, ExampleParams params = {},
                    std::optional<std::pair<double, double>> view = std::nullopt) {
    FigurePreset p;
    p.figure = std::move(fig);
    p.example = id;
    p.i0 = std::move(i0);
    p.epsilon = eps;
    p.U = U;
    p.params = params;
    p.view = view;
    return p;
}

ExampleParams euler_params(double mu, double l1, double l2) {
    ExampleParams p;
    p.mu = mu;
    p.lambda1 = l1;
    p.lambda2 = l2;
    return p;
}

ExampleParams kappa_params(double kappa) {
    ExampleParams p;
    p.kappa = kappa;
    return p;
}

std::vector<FigurePreset> presets_for(ExampleId id) {
    std::vector<FigurePreset> out;
    for (const auto& p : all_presets())
        if (p.example == id) out.push_back(p);
    return out;
}

}  // namespace

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::vdp: return "vdp";
        case ExampleId::action_freq: return "action-freq";
        case ExampleId::resonant: return "resonant";
        case ExampleId::euler_top: return "euler-top";
    }
    return "unknown";
}

ExampleId parse_example_id(const std::string& name) {
    if (name == "vdp") return ExampleId::vdp;
    if (name == "action-freq") return ExampleId::action_freq;
    if (name == "resonant") return ExampleId::resonant;
    if (name == "euler-top") return ExampleId::euler_top;
    throw ConfigError("unknown example '" + name + "' (expected vdp, action-freq, resonant, euler-top)");
}

const std::vector<FigurePreset>& all_presets() {
    static const std::vector<FigurePreset> presets = [] {
        const ExampleParams k_pos = kappa_params(1.0);
        const ExampleParams k_neg = kappa_params(-1.0);
        const ExampleParams top_a = euler_params(1.0, 2.0, -1.0);
        const ExampleParams top_d = euler_params(1.0, 1.1, -1.0);
        using P = std::pair<double, double>;
        return std::vector<FigurePreset>{
            preset("1a", ExampleId::vdp, vec1(0.5), 1e-2, 10),
            preset("1b", ExampleId::vdp, vec1(4.0), 1e-2, 10),
            preset("1c", ExampleId::vdp, vec1(4.0), 1e-2, 200),
            preset("2a", ExampleId::action_freq, vec1(1.0), 1e-2, 0.9, k_pos),
            preset("2b", ExampleId::action_freq, vec1(1.0), 1e-2, 0.9, k_pos, P{0.0, 0.5}),
            preset("2c", ExampleId::action_freq, vec1(1.0), 1e-2, 0.9, k_pos, P{0.75, 0.9}),
            preset("2d", ExampleId::action_freq, vec1(1.0), 1e-2, 200, k_neg, P{0.0, 10.0}),
            preset("2e", ExampleId::action_freq, vec1(1.0), 1e-2, 200, k_neg, P{100.0, 200.0}),
            preset("3a", ExampleId::resonant, vec1(0.5), 1e-2, 10),
            preset("3b", ExampleId::resonant, vec1(0.5), 1e-2, 10, {}, P{0.0, 1.0}),
            preset("3c", ExampleId::resonant, vec1(0.5), 1e-3, 10),
            preset("3d", ExampleId::resonant, vec1(0.5), 1e-3, 10, {}, P{0.0, 1.0}),
            preset("3e", ExampleId::resonant, vec1(2.0), 1e-2, 10),
            preset("3f", ExampleId::resonant, vec1(2.0), 1e-2, 200),
            preset("4a", ExampleId::euler_top, vec2(4.0, 4.0), 1e-2, 1, top_a),
            preset("4b", ExampleId::euler_top, vec2(4.0, 1.0), 1e-2, 1, top_a),
            preset("4c", ExampleId::euler_top, vec2(4.0, 1.0), 1e-3, 1, top_a),
            preset("4d", ExampleId::euler_top, vec2(4.0, 4.0), 1e-3, 3, top_d),
        };
    }();
    return presets;
}

const FigurePreset& find_preset(const std::string& figure) {
    for (const auto& p : all_presets())
        if (p.figure == figure) return p;
    throw ConfigError("unknown figure preset '" + figure + "'");
}

ExampleDefinition make_vdp() {
    ExampleDefinition ex;
    ex.id = ExampleId::vdp;
    ex.d = 1;
    ex.make_spec = [](const Vector& i0, double theta0, double eps) {
        SystemSpec spec = base_spec(1, scalar_i0(i0), theta0, eps);
        spec.omega = [](const Vector&) { return -1.0; };
        spec.f = scalar_angle_field(
            [](double I, double t) { return I * (1 - I / 2) - I * cos(2 * t) + I * I / 2 * cos(4 * t); });
        spec.g = [](const Vector& Iv, double t) {
            const double I = Iv(0);
            return (1 - I) / 2 * sin(2 * t) - I / 4 * sin(4 * t);
        };
        return spec;
    };

    AuxiliaryBundle& aux = ex.aux;
    aux.fbar = [](const Vector& I) { return vec1(I(0) * (1 - I(0) / 2)); };
    aux.dfbar = [](const Vector& I) { return mat1(1 - I(0)); };
    aux.s = scalar_angle_field([](double I, double t) { return I / 8 * (4 * sin(2 * t) - I * sin(4 * t)); });
    aux.v = scalar_angle_field(
        [](double I, double t) { return -I / 32 * (8 - I - 8 * cos(2 * t) + I * cos(4 * t)); });
    aux.p = scalar_angle_field([](double I, double t) {
        return I / 8 * ((4 - 2 * I - I * I) * sin(2 * t) + I * (I - 4) * sin(4 * t) + I * I * sin(6 * t));
    });
    aux.pbar = [](const Vector&) { return vec1(0.0); };
    aux.q = scalar_angle_field([](double I, double t) {
        return -I / 32 *
               (16 - 10 * I + 2 * I * I - (16 - I * I) * cos(2 * t) + I * (10 - 2 * I) * cos(4 * t) -
                I * I * cos(6 * t));
    });
    aux.w = scalar_angle_field([](double I, double t) {
        return -I / 96 *
               (24 - 24 * I - I * I - 6 * (4 - 2 * I - I * I) * cos(2 * t) + 3 * I * (4 - I) * cos(4 * t) -
                2 * I * I * cos(6 * t));
    });
    aux.u = scalar_angle_field([](double I, double t) {
        const double I2 = I * I, I3 = I2 * I;
        return -I / 128 *
               (64 - 120 * I + 36 * I2 + I3 + (-64 + 64 * I + 50 * I2 - 12 * I3) * cos(2 * t) +
                4 * I * (14 - 17 * I - I2) * cos(4 * t) + 6 * I2 * (-3 + 2 * I) * cos(6 * t) +
                3 * I3 * cos(8 * t));
    });
    aux.m_script = [](const Vector& I) { return mat1(-1 + I(0) - I(0) * I(0) / 2); };
    aux.g_script = [](const Vector&, const Vector&) { return mat1(0.0); };
    aux.h_script = [](const Vector&, const Vector&) { return tensor1(-1.0); };

    BoundBundle& b = ex.bounds;
    b.rho_hat = [](const Vector& J) { return J(0); };
    b.a_hat = [](const Vector& J, const Matrix&, const Vector&, double r) {
        const double x = J(0) + r, x2 = x * x;
        return sqrt(-2 + 10 * x2 + x2 * x2 + 2 * std::pow(1 + 2 * x2, 1.5)) / 8;
    };
    b.b_hat = [](const Vector& Jv, double r) {
        const double J = Jv(0);
        const double J2 = J * J, J3 = J2 * J, J4 = J3 * J, J5 = J4 * J, J6 = J5 * J;
        const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
        return sqrt(120 * J6 + 12 * J5 * (23 + 56 * r) + 3 * J4 * (192 + 474 * r + 517 * r2) +
                    12 * J3 * r * (72 + 180 * r + 157 * r2) + 6 * J2 * r2 * (372 + 530 * r + 231 * r2) +
                    12 * J * r3 * (216 + 213 * r + 46 * r2) + r4 * (1404 + 690 * r + 91 * r2)) /
               96;
    };
    b.c_hat = [](const Vector& Jv, double r) {
        const double J = Jv(0);
        const double J2 = J * J, J3 = J2 * J, J4 = J3 * J, J5 = J4 * J, J6 = J5 * J, J7 = J6 * J, J8 = J7 * J;
        const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
        return sqrt(6512 * J8 + 24 * J7 * (671 + 2096 * r) + 24 * J6 * (1693 + 5484 * r + 6956 * r2) +
                    8 * J5 * (1812 + 31188 * r + 39375 * r2 + 38726 * r3) +
                    12 * J4 * (768 + 4436 * r + 61358 * r2 + 37966 * r3 + 29997 * r4) +
                    8 * J3 * r * (4680 + 39948 * r + 125584 * r2 + 62193 * r3 + 35046 * r4) +
                    12 * J2 * r2 * (1824 + 52152 * r + 61180 * r2 + 37311 * r3 + 12021 * r4) +
                    J * r3 * (119808 + 445536 * r + 425592 * r2 + 210995 * r3 + 41976 * r4) +
                    4 * r4 * (21600 + 33024 * r + 30127 * r2 + 10383 * r3 + 1377 * r4)) /
               384;
    };
    b.d_hat = [](const Vector&, double) { return 0.0; };
    b.e_hat = [](const Vector&, double) { return 1.0; };

    ex.closed_forms = [](const Vector& i0v) {
        const double i0 = i0v(0);
        ClosedForms cf;
        cf.J = [i0](double tau) { return vec1(2 * i0 / (i0 + (2 - i0) * std::exp(-tau))); };
        cf.R = [i0](double tau) {
            const double den = i0 + (2 - i0) * std::exp(-tau);
            return mat1(4 * std::exp(-tau) / (den * den));
        };
        cf.K = [](double) { return vec1(0.0); };
        return cf;
    };
    ex.presets = presets_for(ExampleId::vdp);
    ex.box = {vec1(0.25), vec1(5.0)};
    return ex;
}

ExampleDefinition make_action_freq(double kappa) {
    if (kappa != 1.0 && kappa != -1.0) throw ConfigError("kappa must be +1 or -1");
    const double k = kappa;
    ExampleDefinition ex;
    ex.id = ExampleId::action_freq;
    ex.params.kappa = k;
    ex.d = 1;
    ex.make_spec = [k](const Vector& i0, double theta0, double eps) {
        SystemSpec spec = base_spec(1, scalar_i0(i0), theta0, eps);
        spec.omega = [](const Vector& I) { return I(0); };
        spec.f = scalar_angle_field([k](double I, double t) { return k * I * I * (1 - cos(2 * t)); });
        spec.g = [k](const Vector& I, double t) { return k * I(0) * I(0) * (1 + cos(2 * t)); };
        return spec;
    };

    AuxiliaryBundle& aux = ex.aux;
    aux.fbar = [k](const Vector& I) { return vec1(k * I(0) * I(0)); };
    aux.dfbar = [k](const Vector& I) { return mat1(2 * k * I(0)); };
    aux.s = scalar_angle_field([k](double I, double t) { return -k / 2 * I * sin(2 * t); });
    aux.v = scalar_angle_field([k](double, double t) { return -k / 4 * (1 - cos(2 * t)); });
    aux.p = scalar_angle_field([](double I, double t) {
        return -I * I / 4 * (2 * I + 4 * I * cos(2 * t) + 2 * sin(2 * t) + 2 * I * cos(4 * t) - sin(4 * t));
    });
    aux.pbar = [](const Vector& I) { return vec1(-0.5 * I(0) * I(0) * I(0)); };
    aux.q = scalar_angle_field([](double I, double t) { return -I * I / 4 * (2 * sin(2 * t) + sin(4 * t)); });
    aux.w = scalar_angle_field([](double I, double t) {
        return -I / 16 * (3 - 4 * cos(2 * t) + 8 * I * sin(2 * t) + cos(4 * t) + 2 * I * sin(4 * t));
    });
    aux.u = scalar_angle_field([k](double I, double t) {
        const double I2 = I * I;
        return -k / 32 * I2 *
               (16 * I2 + 10 + (40 * I2 - 15) * cos(2 * t) + 40 * I * sin(2 * t) + (32 * I2 + 6) * cos(4 * t) -
                8 * I * sin(4 * t) + (8 * I2 - 1) * cos(6 * t) - 8 * I * sin(6 * t));
    });
    aux.m_script = [](const Vector& I) { return mat1(-2 * I(0) * I(0)); };
    aux.g_script = [](const Vector& I, const Vector& dI) {
        const double x = I(0), d = dI(0);
        return mat1(-0.5 * (3 * x * x + 3 * x * d + d * d));
    };
    aux.h_script = [k](const Vector&, const Vector&) { return tensor1(2 * k); };

    BoundBundle& b = ex.bounds;
    b.rho_hat = [](const Vector& J) { return J(0); };
    b.a_hat = [](const Vector& J, const Matrix&, const Vector& K, double r) { return 0.5 * (J(0) + r) - K(0); };
    b.b_hat = [](const Vector& Jv, double r) {
        const double J = Jv(0), J2 = J * J, J3 = J2 * J, J4 = J3 * J, r2 = r * r;
        return sqrt(50 * J4 + (55 + 200 * r) * J3 + (38 + 85 * r + 300 * r2) * J2 + (65 + 33 * r + 200 * r2) * J * r +
                    (32 + 27 * r + 50 * r2) * r2) /
               (8 * std::numbers::sqrt2);
    };
    b.c_hat = [](const Vector& Jv, double r) {
        const double J = Jv(0);
        const double J2 = J * J, J3 = J2 * J, J4 = J3 * J, J5 = J4 * J, J6 = J5 * J, J7 = J6 * J, J8 = J7 * J;
        const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
        return sqrt(4608 * J8 + (3904 + 36864 * r) * J7 + (1520 + 23296 * r + 129024 * r2) * J6 +
                    (1856 + 5696 * r + 57792 * r2 + 258048 * r3) * J5 +
                    (4853 + 5352 * r + 10032 * r2 + 76160 * r3 + 322560 * r4) * J4 +
                    (3086 + 7824 * r + 11008 * r2 + 56000 * r3 + 258048 * r4) * J3 * r +
                    (1862 + 2976 * r + 9808 * r2 + 21504 * r3 + 129024 * r4) * J2 * r2 +
                    (1024 + 2312 * r + 5440 * r2 + 7168 * r3 + 36864 * r4) * J * r3 +
                    (512 + 752 * r + 1296 * r2 + 1280 * r3 + 4608 * r4) * r4) /
               (16 * std::numbers::sqrt2);
    };
    b.d_hat = [](const Vector& J, double r) { return 0.5 * (3 * J(0) * J(0) + 3 * J(0) * r + r * r); };
    b.e_hat = [](const Vector&, double) { return 2.0; };

    ex.closed_forms = [k](const Vector& i0v) {
        const double i0 = i0v(0);
        ClosedForms cf;
        cf.J = [=](double tau) { return vec1(i0 / (1 - k * tau * i0)); };
        cf.R = [=](double tau) {
            const double x = 1 - k * i0 * tau;
            return mat1(1 / (x * x));
        };
        cf.K = [=](double tau) {
            const double x = 1 - k * i0 * tau;
            return vec1(k * i0 * i0 * std::log(x) / (2 * x * x));
        };
        return cf;
    };
    for (const auto& p : presets_for(ExampleId::action_freq))
        if (p.params.kappa == k) ex.presets.push_back(p);
    ex.box = {vec1(0.1), vec1(10.0)};
    return ex;
}

ExampleDefinition make_resonant() {
    ExampleDefinition ex;
    ex.id = ExampleId::resonant;
    ex.d = 1;
    ex.make_spec = [](const Vector& i0, double theta0, double eps) {
        SystemSpec spec = base_spec(1, scalar_i0(i0), theta0, eps);
        spec.omega = [](const Vector& I) { return I(0); };
        spec.f = scalar_angle_field([](double, double t) { return 1 - cos(t); });
        spec.g = [](const Vector&, double) { return 0.0; };
        return spec;
    };

    AuxiliaryBundle& aux = ex.aux;
    aux.fbar = [](const Vector&) { return vec1(1.0); };
    aux.dfbar = [](const Vector&) { return mat1(0.0); };
    aux.s = scalar_angle_field([](double I, double t) { return -sin(t) / I; });
    aux.v = scalar_angle_field([](double I, double t) { return -(1 - cos(t)) / (I * I); });
    aux.p = scalar_angle_field([](double I, double t) { return (2 * sin(t) - sin(2 * t)) / (2 * I * I); });
    aux.pbar = [](const Vector&) { return vec1(0.0); };
    aux.q = scalar_angle_field([](double I, double t) { return (3 - 4 * cos(t) + cos(2 * t)) / (I * I * I); });
    aux.w = scalar_angle_field([](double I, double t) { return (3 - 4 * cos(t) + cos(2 * t)) / (4 * I * I * I); });
    aux.u = scalar_angle_field([](double I, double t) {
        return 3.0 / (8 * I * I * I * I) * (-10 + 15 * cos(t) - 6 * cos(2 * t) + cos(3 * t));
    });
    aux.m_script = [](const Vector&) { return mat1(0.0); };
    aux.g_script = [](const Vector&, const Vector&) { return mat1(0.0); };
    aux.h_script = [](const Vector&, const Vector&) { return tensor1(0.0); };

    BoundBundle& b = ex.bounds;
    b.rho_hat = [](const Vector& J) { return J(0); };
    b.a_hat = [](const Vector& J, const Matrix&, const Vector&, double r) { return 1 / (J(0) - r); };
    b.b_hat = [](const Vector& J, double r) { return 2 / std::pow(J(0) - r, 3); };
    b.c_hat = [](const Vector& J, double r) { return 12 / std::pow(J(0) - r, 4); };
    b.d_hat = [](const Vector&, double) { return 0.0; };
    b.e_hat = [](const Vector&, double) { return 0.0; };
    b.a_hat_dr = [](const Vector& J, const Matrix&, const Vector&, double r) {
        return 1 / ((J(0) - r) * (J(0) - r));
    };
    b.b_hat_dr = [](const Vector& J, double r) { return 6 / std::pow(J(0) - r, 4); };
    b.a_hat_grad = [](const Vector& J, const Matrix&, const Vector&, double r) {
        BoundGradient g;
        g.dJ = vec1(-1 / ((J(0) - r) * (J(0) - r)));
        g.dR = mat1(0.0);
        g.dK = vec1(0.0);
        return g;
    };
    b.b_hat_dJ = [](const Vector& J, double r) { return vec1(-6 / std::pow(J(0) - r, 4)); };

    ex.closed_forms = [](const Vector& i0v) {
        const double i0 = i0v(0);
        ClosedForms cf;
        cf.J = [i0](double tau) { return vec1(i0 + tau); };
        cf.R = [](double) { return mat1(1.0); };
        cf.K = [](double) { return vec1(0.0); };
        return cf;
    };
    ex.presets = presets_for(ExampleId::resonant);
    ex.box = {vec1(0.25), vec1(12.0)};
    return ex;
}

ExampleDefinition make_euler_top(double mu, double lambda1, double lambda2) {
    if (!(lambda1 > 0.0) || !(-lambda1 < mu && mu < lambda1) || !(lambda2 > -lambda1))
        throw ConfigError("euler-top parameters must satisfy lambda1 > 0, -lambda1 < mu < lambda1, "
                          "lambda2 > -lambda1");
    const double m = mu, L1 = lambda1, L2 = lambda2;
    ExampleDefinition ex;
    ex.id = ExampleId::euler_top;
    ex.params = euler_params(mu, lambda1, lambda2);
    ex.d = 2;
    ex.make_spec = [=](const Vector& i0, double theta0, double eps) {
        if (i0.size() != 2) throw ConfigError("euler-top takes two initial actions");
        SystemSpec spec = base_spec(2, i0, theta0, eps);
        spec.omega = [](const Vector& I) { return I(0) * I(1); };
        spec.f = [=](const Vector& I, double t) {
            const double c2 = cos(2 * t);
            return vec2(-I(0) * (L1 + m * c2), -I(1) * (L2 - m * c2));
        };
        spec.g = [=](const Vector&, double t) { return m * sin(2 * t); };
        return spec;
    };

    AuxiliaryBundle& aux = ex.aux;
    aux.fbar = [=](const Vector& I) { return vec2(-L1 * I(0), -L2 * I(1)); };
    aux.dfbar = [=](const Vector&) {
        Matrix d = Matrix::Zero(2, 2);
        d(0, 0) = -L1;
        d(1, 1) = -L2;
        return d;
    };
    aux.s = [=](const Vector& I, double t) {
        const double k = m / 2 * sin(2 * t);
        return vec2(-k / I(1), k / I(0));
    };
    aux.v = [=](const Vector& I, double t) {
        const double st = sin(t);
        const double k = m / (2 * I(0) * I(1)) * st * st;
        return vec2(-k / I(1), k / I(0));
    };
    aux.p = [=](const Vector& I, double t) {
        const double k = m * sin(2 * t) / 2, c2 = cos(2 * t);
        return vec2(-k * (L2 + m * c2) / I(1), k * (L1 + 3 * m * c2) / I(0));
    };
    aux.pbar = [](const Vector&) { return Vector::Zero(2).eval(); };
    aux.q = [=](const Vector& I, double t) {
        const double st = sin(t), c2 = cos(2 * t);
        const double k = m * st * st / (2 * I(0) * I(1));
        return vec2(-k * (2 * L2 + 2 * m + L1 + m * c2) / I(1), k * (L2 + 2 * m + 2 * L1 + 3 * m * c2) / I(0));
    };
    aux.w = [=](const Vector& I, double t) {
        const double st = sin(t), ct = cos(t);
        const double k = m * st * st / (2 * I(0) * I(1));
        return vec2(-k * (L2 + m * ct * ct) / I(1), k * (L1 + 3 * m * ct * ct) / I(0));
    };
    aux.u = [=](const Vector& I, double t) {
        const double st = sin(t), c2 = cos(2 * t);
        const double k = m * st * st / (4 * I(0) * I(1));
        const double first = 4 * L2 * L2 + 6 * L2 * m + 2 * L2 * L1 + m * L1 + m * (4 * L2 + 3 * m + L1) * c2 +
                             3 * m * m * c2 * c2;
        const double second = 3 * L2 * m + 2 * L2 * L1 + 10 * m * L1 + 4 * L1 * L1 +
                              3 * m * (L2 + 5 * m + 4 * L1) * c2 + 15 * m * m * c2 * c2;
        return vec2(-k * first / I(1), k * second / I(0));
    };
    aux.m_script = [=](const Vector&) {
        Matrix d = Matrix::Zero(2, 2);
        d(0, 0) = -L1 * L1;
        d(1, 1) = -L2 * L2;
        return d;
    };
    aux.g_script = [](const Vector&, const Vector&) { return Matrix::Zero(2, 2).eval(); };
    aux.h_script = [](const Vector&, const Vector&) { return Tensor3(2, 0.0); };

    const double am = std::abs(m), al2 = std::abs(L2);
    const double b11 = 16 * (L1 * L1 + L2 * L2) + L1 * (12 * L2 + 20 * al2) + 2 * (L1 + L2) * m +
                       4 * (L1 + al2) * am + m * m;
    const double b22 = 16 * (L1 * L1 + L2 * L2) + L1 * (12 * L2 + 20 * al2) + 6 * (L1 + L2) * m +
                       12 * (L1 + al2) * am + 9 * m * m;
    const double b1 = 32 * (L1 * L1 + L2 * L2) + 64 * L1 * al2 + 12 * (L1 + al2) * am + 2 * m * m;
    const double b2 = 32 * (L1 * L1 + L2 * L2) + 64 * L1 * al2 + 36 * (L1 + al2) * am + 18 * m * m;
    const double b0 = 16 * (L1 * L1 + L2 * L2) + L1 * (12 * L2 + 20 * al2) + 4 * (L1 + L2) * m +
                      14 * (L1 + al2) * am + 9 * m * m;

    const double L1_2 = L1 * L1, L2_2 = L2 * L2, L1_3 = L1_2 * L1, L2_3 = L2_2 * L2, al2_3 = al2 * al2 * al2;
    const double m2 = m * m, m3 = m2 * m, am3 = am * am * am, m4 = m2 * m2;
    const double quart = 1024 * (L1_2 * L1_2 + L2_2 * L2_2) + 6144 * L1_2 * L2_2;
    const double c11 = quart + 512 * (L1_2 + L2_2) * L1 * (3 * L2 + 5 * al2) + 640 * (L1_3 + L2_3) * m +
                       896 * (L1_3 + al2_3) * am + 1920 * (L1 + L2) * L1 * L2 * m +
                       2688 * (L1 + al2) * L1 * al2 * am + 704 * (L1_2 + L2_2) * m2 + 32 * L1 * (17 * L2 + 27 * al2) * m2 -
                       24 * (L1 + L2) * m3 + 264 * (L1 + al2) * am3 + 27 * m4;
    const double c22 = quart + 512 * (L1_2 + L2_2) * L1 * (3 * L2 + 5 * al2) + 384 * (L1_3 + L2_3) * m +
                       1408 * (L1_3 + al2_3) * am + 1152 * (L1 + L2) * L1 * L2 * m +
                       4224 * (L1 + al2) * L1 * al2 * am + 2816 * (L1_2 + L2_2) * m2 +
                       32 * L1 * (21 * L2 + 155 * al2) * m2 + 120 * (L1 + L2) * m3 + 1800 * (L1 + al2) * am3 +
                       675 * m4;
    const double quart2 = 2048 * (L1_2 * L1_2 + L2_2 * L2_2) + 12288 * L1_2 * L2_2 + 8192 * (L1_2 + L2_2) * L1 * al2;
    const double c1 = quart2 + 3072 * (L1_3 + al2_3) * am + 9216 * (L1 + al2) * L1 * al2 * am +
                      1408 * (L1_2 + L2_2) * m2 + 2816 * L1 * al2 * m2 + 576 * (L1 + al2) * am3 + 54 * m4;
    const double c2 = quart2 + 3584 * (L1_3 + al2_3) * am + 10752 * (L1 + al2) * L1 * al2 * am +
                      5632 * (L1_2 + L2_2) * m2 + 11264 * L1 * al2 * m2 + 3840 * (L1 + al2) * am3 + 1350 * m4;
    const double c0 = quart + 512 * (L1_2 + L2_2) * L1 * (3 * L2 + 5 * al2) + 512 * (L1_3 + L2_3) * m +
                      2048 * (L1_3 + al2_3) * am + 1536 * (L1 + L2) * L1 * L2 * m +
                      6144 * (L1 + al2) * L1 * al2 * am + 2816 * (L1_2 + L2_2) * m2 +
                      32 * L1 * (19 * L2 + 157 * al2) * m2 + 48 * (L1 + L2) * m3 + 1872 * (L1 + al2) * am3 +
                      675 * m4;

    BoundBundle& b = ex.bounds;
    b.rho_hat = [](const Vector& J) { return std::min(J(0), J(1)); };
    b.a_hat = [am](const Vector& J, const Matrix&, const Vector&, double r) {
        const double x = J(0) - r, y = J(1) - r;
        return am / 2 * sqrt(1 / (x * x) + 1 / (y * y));
    };
    b.b_hat = [=](const Vector& J, double r) {
        const double x = J(0) - r, y = J(1) - r;
        return am * sqrt(b11 * J(0) * J(0) + b22 * J(1) * J(1) + b1 * J(0) * r + b2 * J(1) * r + b0 * r * r) /
               (8 * x * x * y * y);
    };
    b.c_hat = [=](const Vector& J, double r) {
        const double x = J(0) - r, y = J(1) - r;
        return am * sqrt(c11 * J(0) * J(0) + c22 * J(1) * J(1) + c1 * J(0) * r + c2 * J(1) * r + c0 * r * r) /
               (32 * x * x * y * y);
    };
    b.d_hat = [](const Vector&, double) { return 0.0; };
    b.e_hat = [](const Vector&, double) { return 0.0; };

    ex.closed_forms = [=](const Vector& i0) {
        ClosedForms cf;
        cf.J = [=](double tau) { return vec2(i0(0) * std::exp(-L1 * tau), i0(1) * std::exp(-L2 * tau)); };
        cf.R = [=](double tau) {
            Matrix r = Matrix::Zero(2, 2);
            r(0, 0) = std::exp(-L1 * tau);
            r(1, 1) = std::exp(-L2 * tau);
            return r;
        };
        cf.K = [](double) { return Vector::Zero(2).eval(); };
        return cf;
    };
    for (const auto& p : presets_for(ExampleId::euler_top))
        if (p.params.mu == m && p.params.lambda1 == L1 && p.params.lambda2 == L2) ex.presets.push_back(p);
    ex.box = {vec2(0.25, 0.25), vec2(5.0, 5.0)};
    return ex;
}

ExampleDefinition make_example(ExampleId id, const ExampleParams& params) {
    switch (id) {
        case ExampleId::vdp: return make_vdp();
        case ExampleId::action_freq: return make_action_freq(params.kappa);
        case ExampleId::resonant: return make_resonant();
        case ExampleId::euler_top: return make_euler_top(params.mu, params.lambda1, params.lambda2);
    }
    throw ConfigError("unknown example id");
}

Vector angle_to_physical(ExampleId id, const Vector& I, double theta) {
    switch (id) {
        case ExampleId::vdp: {
            const double rad = sqrt(2 * I(0));
            return vec2(rad * cos(theta), rad * sin(theta));
        }
        case ExampleId::euler_top: {
            Vector out(3);
            out << I(0) * cos(theta), I(0) * sin(theta), I(0) * I(1);
            return out;
        }
        default: break;
    }
    throw ConfigError("no physical coordinate map for example '" + to_string(id) + "'");
}

}  // namespace avgbound::examples
