#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "sysgeom/errors.hpp"

namespace sysgeom {

using Complex = std::complex<double>;

/// Real matrix polynomial in the delay variable z^-1:
///   P(z) = C_0 + C_1 z^-1 + ... + C_d z^-d.
/// Coefficients are real matrices of a common shape; evaluation is complex.
/// Immutable after construction; every operation returns a new value.
class PolynomialMatrix {
public:
    PolynomialMatrix() = default;

    /// Zero matrix of the given shape (degree 0).
    PolynomialMatrix(int rows, int cols);

    /// From an ordered coefficient list [C_0, ..., C_d]; trailing exactly-zero
    /// coefficients are trimmed so that degree() is tight.
    explicit PolynomialMatrix(std::vector<Eigen::MatrixXd> coeffs);

    /// Scalar polynomial c_0 + c_1 z^-1 + ... as a 1x1 matrix polynomial.
    static PolynomialMatrix scalar(const std::vector<double>& coeffs);

    static PolynomialMatrix identity(int n);
    static PolynomialMatrix constant(const Eigen::MatrixXd& c);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    /// Coefficient of z^-k; k beyond the degree yields a zero matrix.
    const Eigen::MatrixXd& coeff(int k) const;
    Eigen::MatrixXd coeff_or_zero(int k) const;
    const std::vector<Eigen::MatrixXd>& coefficients() const { return coeffs_; }

    /// Largest absolute entry over all coefficients.
    double max_coeff() const;

    /// P(z) = sum_k C_k z^-k. Exact for polynomials; z = 0 is a pole.
    Eigen::MatrixXcd evaluate(Complex z) const;

    PolynomialMatrix transposed() const;

    PolynomialMatrix operator+(const PolynomialMatrix& rhs) const;
    PolynomialMatrix operator-(const PolynomialMatrix& rhs) const;
    PolynomialMatrix operator*(const PolynomialMatrix& rhs) const;
    PolynomialMatrix operator*(double s) const;
    PolynomialMatrix operator*(const Eigen::MatrixXd& constant_rhs) const;

    /// Determinant as a 1x1 polynomial. Cofactor expansion up to 4x4,
    /// fraction-free elimination on coefficient convolutions above that.
    PolynomialMatrix determinant() const;

    /// Adjugate via cofactors, so that P * adjugate(P) = det(P) * I.
    PolynomialMatrix adjugate() const;

    /// True iff det P has degree 0 within tol and a nonzero constant term.
    /// tol < 0 selects the default 1e-9 * max_coeff().
    bool is_unimodular(double tol = -1.0) const;

    /// Inverse of a unimodular matrix: adjugate / (constant determinant).
    PolynomialMatrix unimodular_inverse(double tol = -1.0) const;

    bool same_shape(const PolynomialMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    void trim();

    int rows_ = 0;
    int cols_ = 0;
    std::vector<Eigen::MatrixXd> coeffs_;
};

PolynomialMatrix operator*(double s, const PolynomialMatrix& p);

/// Pseudo-derivative of a monic scalar polynomial given in descending powers
/// of z, f = z^m + a_1 z^{m-1} + ... + a_m as [1, a_1, ..., a_m]:
/// order k in 1..m drops the last k coefficients, leaving
/// z^{m-k} + a_1 z^{m-k-1} + ... + a_{m-k}.
std::vector<double> pseudo_derivative(const std::vector<double>& monic_descending, int order);

/// Same coefficient-drop rule without the monic requirement, for formal-degree
/// polynomials whose leading coefficients may vanish. order in 0..m.
std::vector<double> pseudo_derivative_formal(const std::vector<double>& descending, int order);

}  // namespace sysgeom
