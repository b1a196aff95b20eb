#include "avgbound/linalg.hpp"

#include "avgbound/errors.hpp"

#include <cmath>
#include <string>

namespace avgbound {

Matrix Tensor3::contract(const Vector& x) const {
    Matrix out = Matrix::Zero(d_, d_);
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j)
            for (std::size_t k = 0; k < d_; ++k)
                out(i, k) += (*this)(i, j, k) * x(j);
    return out;
}

Vector Tensor3::contract(const Vector& x, const Vector& y) const {
    Vector out = Vector::Zero(d_);
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j)
            for (std::size_t k = 0; k < d_; ++k)
                out(i) += (*this)(i, j, k) * x(j) * y(k);
    return out;
}

double frobenius_norm(const Vector& v) { return v.norm(); }

double frobenius_norm(const Matrix& m) { return m.norm(); }

double frobenius_norm(const Tensor3& t) {
    double sum = 0.0;
    for (double x : t.data()) sum += x * x;
    return std::sqrt(sum);
}

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

Matrix identity(std::size_t d) { return Matrix::Identity(d, d); }

namespace {

double one_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

[[noreturn]] void throw_singular(double cond) {
    throw SingularMatrixError("matrix is singular to working precision (condition estimate " +
                              std::to_string(cond) + ")");
}

}  // namespace

Matrix checked_inverse(const Matrix& m, double max_condition) {
    const auto d = m.rows();
    Matrix inv(d, d);
    if (d == 1) {
        if (m(0, 0) == 0.0 || !std::isfinite(m(0, 0))) throw_singular(INFINITY);
        inv(0, 0) = 1.0 / m(0, 0);
        return inv;
    }
    if (d == 2) {
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        if (det == 0.0 || !std::isfinite(det)) throw_singular(INFINITY);
        inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
        inv /= det;
    } else {
        Eigen::PartialPivLU<Matrix> lu(m);
        inv = lu.inverse();
    }
    const double cond = one_norm(m) * one_norm(inv);
    if (!std::isfinite(cond) || cond > max_condition) throw_singular(cond);
    return inv;
}

}  // namespace avgbound
