#include "sysgeom/polymat.hpp"

#include <algorithm>
#include <cmath>

namespace sysgeom {

namespace {

// Scalar polynomial helpers on ascending z^-1 coefficient vectors,
// used by the determinant routines.
using Poly = std::vector<double>;

double pmax(const Poly& p) {
    double m = 0.0;
    for (double c : p) m = std::max(m, std::abs(c));
    return m;
}

Poly ptrim(Poly p, double rel_tol) {
    const double floor = rel_tol * pmax(p);
    while (p.size() > 1 && std::abs(p.back()) <= floor) p.pop_back();
    return p;
}

Poly padd(const Poly& a, const Poly& b, double sign) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) r[k] += sign * b[k];
    return r;
}

Poly pmul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// Long division by the top z^-k coefficient; the remainder is discarded
// (it vanishes in exact arithmetic inside fraction-free elimination).
Poly pdiv_exact(Poly num, const Poly& den) {
    if (den.size() == 1) {
        for (double& c : num) c /= den[0];
        return num;
    }
    if (num.size() < den.size()) return {0.0};
    const int dq = static_cast<int>(num.size() - den.size());
    Poly q(dq + 1, 0.0);
    const double lead = den.back();
    for (int k = dq; k >= 0; --k) {
        const double c = num[den.size() - 1 + k] / lead;
        q[k] = c;
        for (size_t j = 0; j < den.size(); ++j) num[j + k] -= c * den[j];
    }
    return q;
}

bool pzero(const Poly& p, double tol) {
    for (double c : p)
        if (std::abs(c) > tol) return false;
    return true;
}

// Entries of P as scalar polynomials.
std::vector<std::vector<Poly>> entry_polys(const PolynomialMatrix& P) {
    std::vector<std::vector<Poly>> e(P.rows(), std::vector<Poly>(P.cols()));
    for (int i = 0; i < P.rows(); ++i)
        for (int j = 0; j < P.cols(); ++j) {
            Poly p(P.degree() + 1);
            for (int k = 0; k <= P.degree(); ++k) p[k] = P.coeff(k)(i, j);
            e[i][j] = ptrim(std::move(p), 0.0);
        }
    return e;
}

Poly det_cofactor(const std::vector<std::vector<Poly>>& a) {
    const size_t n = a.size();
    if (n == 1) return a[0][0];
    Poly det{0.0};
    for (size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Poly>> minor(n - 1, std::vector<Poly>(n - 1));
        for (size_t r = 1; r < n; ++r) {
            size_t cc = 0;
            for (size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = a[r][c];
            }
        }
        Poly term = pmul(a[0][j], det_cofactor(minor));
        det = padd(det, term, (j % 2 == 0) ? 1.0 : -1.0);
    }
    return det;
}

// Bareiss fraction-free elimination with polynomial entries; divisions by the
// previous pivot are exact up to rounding.
Poly det_bareiss(std::vector<std::vector<Poly>> a) {
    const size_t n = a.size();
    double scale = 0.0;
    for (auto& row : a)
        for (auto& p : row) scale = std::max(scale, pmax(p));
    const double tiny = 1e-13 * std::max(scale, 1.0);

    Poly prev{1.0};
    double sign = 1.0;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (pzero(a[k][k], tiny)) {
            size_t swap_row = k + 1;
            while (swap_row < n && pzero(a[swap_row][k], tiny)) ++swap_row;
            if (swap_row == n) return {0.0};
            std::swap(a[k], a[swap_row]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                Poly num = padd(pmul(a[i][j], a[k][k]), pmul(a[i][k], a[k][j]), -1.0);
                a[i][j] = ptrim(pdiv_exact(std::move(num), prev), 1e-13);
            }
            a[i][k] = {0.0};
        }
        prev = a[k][k];
    }
    Poly det = a[n - 1][n - 1];
    if (sign < 0)
        for (double& c : det) c = -c;
    return det;
}

}  // namespace

PolynomialMatrix::PolynomialMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) throw DimensionError("polynomial matrix shape must be positive");
    coeffs_.push_back(Eigen::MatrixXd::Zero(rows, cols));
}

PolynomialMatrix::PolynomialMatrix(std::vector<Eigen::MatrixXd> coeffs) {
    if (coeffs.empty()) throw DimensionError("coefficient list must be nonempty");
    rows_ = static_cast<int>(coeffs[0].rows());
    cols_ = static_cast<int>(coeffs[0].cols());
    if (rows_ <= 0 || cols_ <= 0) throw DimensionError("polynomial matrix shape must be positive");
    for (const auto& c : coeffs)
        if (c.rows() != rows_ || c.cols() != cols_)
            throw DimensionError("coefficients must share one shape");
    coeffs_ = std::move(coeffs);
    trim();
}

PolynomialMatrix PolynomialMatrix::scalar(const std::vector<double>& coeffs) {
    std::vector<Eigen::MatrixXd> c;
    c.reserve(coeffs.size());
    for (double v : coeffs) c.push_back(Eigen::MatrixXd::Constant(1, 1, v));
    if (c.empty()) c.push_back(Eigen::MatrixXd::Zero(1, 1));
    return PolynomialMatrix(std::move(c));
}

PolynomialMatrix PolynomialMatrix::identity(int n) {
    return constant(Eigen::MatrixXd::Identity(n, n));
}

PolynomialMatrix PolynomialMatrix::constant(const Eigen::MatrixXd& c) {
    std::vector<Eigen::MatrixXd> v{c};
    return PolynomialMatrix(std::move(v));
}

void PolynomialMatrix::trim() {
    while (coeffs_.size() > 1 && coeffs_.back().isZero(0.0)) coeffs_.pop_back();
}

const Eigen::MatrixXd& PolynomialMatrix::coeff(int k) const {
    static const Eigen::MatrixXd empty;
    if (k < 0 || k > degree()) throw DomainError("coefficient index out of range");
    (void)empty;
    return coeffs_[static_cast<size_t>(k)];
}

Eigen::MatrixXd PolynomialMatrix::coeff_or_zero(int k) const {
    if (k < 0 || k > degree()) return Eigen::MatrixXd::Zero(rows_, cols_);
    return coeffs_[static_cast<size_t>(k)];
}

double PolynomialMatrix::max_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

Eigen::MatrixXcd PolynomialMatrix::evaluate(Complex z) const {
    if (z == Complex(0.0, 0.0)) throw DomainError("evaluation pole at origin");
    const Complex w = Complex(1.0, 0.0) / z;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rows_, cols_);
    // Horner in w = z^-1.
    for (int k = degree(); k >= 0; --k) acc = acc * w + coeffs_[static_cast<size_t>(k)];
    return acc;
}

PolynomialMatrix PolynomialMatrix::transposed() const {
    std::vector<Eigen::MatrixXd> c;
    c.reserve(coeffs_.size());
    for (const auto& m : coeffs_) c.push_back(m.transpose());
    return PolynomialMatrix(std::move(c));
}

PolynomialMatrix PolynomialMatrix::operator+(const PolynomialMatrix& rhs) const {
    if (!same_shape(rhs)) throw DimensionError("polynomial matrix sum: shape mismatch");
    std::vector<Eigen::MatrixXd> c(static_cast<size_t>(std::max(degree(), rhs.degree())) + 1,
                                   Eigen::MatrixXd::Zero(rows_, cols_));
    for (size_t k = 0; k < c.size(); ++k)
        c[k] = coeff_or_zero(static_cast<int>(k)) + rhs.coeff_or_zero(static_cast<int>(k));
    return PolynomialMatrix(std::move(c));
}

PolynomialMatrix PolynomialMatrix::operator-(const PolynomialMatrix& rhs) const {
    return *this + rhs * (-1.0);
}

PolynomialMatrix PolynomialMatrix::operator*(const PolynomialMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw DimensionError("polynomial matrix product: inner dimensions differ");
    std::vector<Eigen::MatrixXd> c(static_cast<size_t>(degree() + rhs.degree()) + 1,
                                   Eigen::MatrixXd::Zero(rows_, rhs.cols_));
    for (int i = 0; i <= degree(); ++i)
        for (int j = 0; j <= rhs.degree(); ++j)
            c[static_cast<size_t>(i + j)] += coeffs_[static_cast<size_t>(i)] * rhs.coeffs_[static_cast<size_t>(j)];
    return PolynomialMatrix(std::move(c));
}

PolynomialMatrix PolynomialMatrix::operator*(double s) const {
    std::vector<Eigen::MatrixXd> c;
    c.reserve(coeffs_.size());
    for (const auto& m : coeffs_) c.push_back(m * s);
    return PolynomialMatrix(std::move(c));
}

PolynomialMatrix PolynomialMatrix::operator*(const Eigen::MatrixXd& constant_rhs) const {
    if (cols_ != constant_rhs.rows()) throw DimensionError("polynomial * constant: inner dimensions differ");
    std::vector<Eigen::MatrixXd> c;
    c.reserve(coeffs_.size());
    for (const auto& m : coeffs_) c.push_back(m * constant_rhs);
    return PolynomialMatrix(std::move(c));
}

PolynomialMatrix operator*(double s, const PolynomialMatrix& p) { return p * s; }

PolynomialMatrix PolynomialMatrix::determinant() const {
    if (rows_ != cols_) throw DimensionError("determinant of a non-square polynomial matrix");
    auto entries = entry_polys(*this);
    Poly det = (rows_ <= 4) ? det_cofactor(entries) : det_bareiss(std::move(entries));
    det = ptrim(std::move(det), 0.0);
    return PolynomialMatrix::scalar(det);
}

PolynomialMatrix PolynomialMatrix::adjugate() const {
    if (rows_ != cols_) throw DimensionError("adjugate of a non-square polynomial matrix");
    const int n = rows_;
    if (n == 1) return identity(1);
    auto entries = entry_polys(*this);
    // adj(P)(i,j) = (-1)^{i+j} det(minor_{j,i})
    std::vector<std::vector<Poly>> adj(static_cast<size_t>(n), std::vector<Poly>(static_cast<size_t>(n)));
    int max_deg = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<std::vector<Poly>> minor(static_cast<size_t>(n - 1),
                                                 std::vector<Poly>(static_cast<size_t>(n - 1)));
            size_t rr = 0;
            for (int r = 0; r < n; ++r) {
                if (r == j) continue;
                size_t cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == i) continue;
                    minor[rr][cc++] = entries[static_cast<size_t>(r)][static_cast<size_t>(c)];
                }
                ++rr;
            }
            Poly d = det_cofactor(minor);
            if ((i + j) % 2 != 0)
                for (double& v : d) v = -v;
            adj[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
            max_deg = std::max(max_deg, static_cast<int>(d.size()) - 1);
        }
    std::vector<Eigen::MatrixXd> c(static_cast<size_t>(max_deg) + 1, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (size_t k = 0; k < adj[static_cast<size_t>(i)][static_cast<size_t>(j)].size(); ++k)
                c[k](i, j) = adj[static_cast<size_t>(i)][static_cast<size_t>(j)][k];
    return PolynomialMatrix(std::move(c));
}

bool PolynomialMatrix::is_unimodular(double tol) const {
    if (rows_ != cols_) throw DimensionError("unimodularity of a non-square polynomial matrix");
    if (tol < 0.0) tol = 1e-9 * std::max(max_coeff(), 1e-300);
    const PolynomialMatrix det = determinant();
    if (std::abs(det.coeff(0)(0, 0)) <= tol) return false;
    for (int k = 1; k <= det.degree(); ++k)
        if (std::abs(det.coeff(k)(0, 0)) > tol) return false;
    return true;
}

PolynomialMatrix PolynomialMatrix::unimodular_inverse(double tol) const {
    if (!is_unimodular(tol)) throw DomainError("matrix is not unimodular; polynomial inverse undefined");
    const double c0 = determinant().coeff(0)(0, 0);
    return adjugate() * (1.0 / c0);
}

std::vector<double> pseudo_derivative(const std::vector<double>& monic_descending, int order) {
    if (monic_descending.size() < 2)
        throw DomainError("pseudo-derivative needs degree >= 1");
    if (std::abs(monic_descending.front() - 1.0) > 1e-12)
        throw DomainError("pseudo-derivative requires a monic polynomial");
    const int m = static_cast<int>(monic_descending.size()) - 1;
    if (order < 1 || order > m) throw DomainError("pseudo-derivative order out of range");
    return std::vector<double>(monic_descending.begin(), monic_descending.end() - order);
}

std::vector<double> pseudo_derivative_formal(const std::vector<double>& descending, int order) {
    const int m = static_cast<int>(descending.size()) - 1;
    if (order < 0 || order > m) throw DomainError("pseudo-derivative order out of range");
    return std::vector<double>(descending.begin(), descending.end() - order);
}

}  // namespace sysgeom
