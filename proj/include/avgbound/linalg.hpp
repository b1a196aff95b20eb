#pragma once

// Small dense linear-algebra vocabulary shared by every module: action
// vectors, (1,1)-tensors as matrices, and (1,2)-tensors with the contractions
// used by the Taylor remainder functions.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace avgbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A (1,2)-tensor C^i_{jk} over R^d, stored densely with i slowest.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(std::size_t d, double fill = 0.0) : d_(d), data_(d * d * d, fill) {}

    std::size_t dim() const { return d_; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * d_ + j) * d_ + k]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * d_ + j) * d_ + k]; }

    const std::vector<double>& data() const { return data_; }

    /// (C X)^i_k = C^i_{jk} X^j
    Matrix contract(const Vector& x) const;

    /// C X Y = C^i_{jk} X^j Y^k
    Vector contract(const Vector& x, const Vector& y) const;

private:
    std::size_t d_ = 0;
    std::vector<double> data_;
};

/// Euclidean norm on vectors, matrices and 3-tensors (square root of the sum
/// of squared entries).
double frobenius_norm(const Vector& v);
double frobenius_norm(const Matrix& m);
double frobenius_norm(const Tensor3& t);

/// Entrywise inner product A • B.
double inner(const Matrix& a, const Matrix& b);

/// Inverse through partial-pivot LU, closed form for d <= 2. Throws
/// SingularMatrixError when the 1-norm condition estimate exceeds max_condition.
Matrix checked_inverse(const Matrix& m, double max_condition = 1e12);

Matrix identity(std::size_t d);

}  // namespace avgbound
