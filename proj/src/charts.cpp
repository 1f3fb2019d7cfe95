#include "sysgeom/charts.hpp"

#include <algorithm>
#include <cmath>

namespace sysgeom {

int ChartId::n() const {
    int total = 0;
    for (int ni : indices) total += ni;
    return total;
}

int ChartId::p() const {
    int mx = 0;
    for (int ni : indices) mx = std::max(mx, ni);
    return mx;
}

void ChartId::validate() const {
    if (m <= 0) throw DimensionError("chart needs a positive output count");
    if (static_cast<int>(indices.size()) != m)
        throw DimensionError("chart needs one index per output channel");
    for (int ni : indices)
        if (ni < 0) throw DomainError("chart indices must be nonnegative");
    if (n() < 1) throw DomainError("chart needs at least one basis row");
}

int ChartId::block_offset(int j) const {
    int off = 0;
    for (int c = 1; c < j; ++c) off += indices[static_cast<size_t>(c - 1)];
    return off;
}

int ChartId::state_position(int j, int k) const { return block_offset(j) + (k - 1); }

Eigen::VectorXd ChartCoordinates::theta() const {
    const int n = chart.n();
    const int m = chart.m;
    Eigen::VectorXd th(2 * n * m);
    for (int i = 0; i < m; ++i) th.segment(i * n, n) = alpha.row(i).transpose();
    for (int r = 0; r < n; ++r) th.segment(n * m + r * m, m) = K.row(r).transpose();
    return th;
}

ChartCoordinates ChartCoordinates::from_theta(const ChartId& chart, const Eigen::VectorXd& theta) {
    chart.validate();
    const int n = chart.n();
    const int m = chart.m;
    if (theta.size() != 2 * n * m) throw DimensionError("coordinate vector must have length 2nm");
    ChartCoordinates c;
    c.chart = chart;
    c.alpha.resize(m, n);
    c.K.resize(n, m);
    for (int i = 0; i < m; ++i) c.alpha.row(i) = theta.segment(i * n, n).transpose();
    for (int r = 0; r < n; ++r) c.K.row(r) = theta.segment(n * m + r * m, m).transpose();
    return c;
}

void ChartCoordinates::validate() const {
    chart.validate();
    const int n = chart.n();
    if (alpha.rows() != chart.m || alpha.cols() != n)
        throw DimensionError("alpha block must be m x n");
    if (K.rows() != n || K.cols() != chart.m) throw DimensionError("K block must be n x m");
    // Coordinate count is 2nm; with all indices equal to p it equals 2pm^2.
    if (dim() != 2 * n * chart.m) throw DimensionError("coordinate dimension mismatch");
}

StateSpaceForm chart_state_space(const ChartCoordinates& c, const Eigen::MatrixXd& D) {
    c.validate();
    const int m = c.chart.m;
    const int n = c.chart.n();
    if (D.rows() != m || D.cols() != m) throw DimensionError("feedthrough must be m x m");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, n);
    for (int j = 1; j <= m; ++j) {
        const int nj = c.chart.indices[static_cast<size_t>(j - 1)];
        if (nj == 0) continue;
        const int off = c.chart.block_offset(j);
        for (int k = 1; k < nj; ++k) A(off + k - 1, off + k) = 1.0;  // shift rows
        A.row(off + nj - 1) = c.alpha.row(j - 1);                    // combination row
        C(j - 1, off) = 1.0;
    }
    return StateSpaceForm{A, c.K, C, D};
}

StateSpaceForm chart_state_space(const ChartCoordinates& c) {
    return chart_state_space(c, Eigen::MatrixXd::Identity(c.chart.m, c.chart.m));
}

LinearSystem ss_from_chart(const ChartCoordinates& c) {
    const StateSpaceForm f = chart_state_space(c);
    return LinearSystem::from_state_space(f.A, f.B, f.C, f.D);
}

LinearSystem ss_from_chart(const ChartCoordinates& c, const Eigen::MatrixXd& D) {
    const StateSpaceForm f = chart_state_space(c, D);
    return LinearSystem::from_state_space(f.A, f.B, f.C, f.D);
}

namespace {

Eigen::MatrixXcd eval_zform(const std::vector<Eigen::MatrixXd>& coeffs, int top_power, Complex z) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(coeffs[0].rows(), coeffs[0].cols());
    for (size_t l = 0; l < coeffs.size(); ++l)
        acc += coeffs[l] * std::pow(z, static_cast<double>(top_power - static_cast<int>(l)));
    return acc;
}

}  // namespace

Eigen::MatrixXcd ChartArmaZform::eval_A(Complex z) const { return eval_zform(A, p, z); }
Eigen::MatrixXcd ChartArmaZform::eval_B(Complex z) const { return eval_zform(B, p, z); }
Eigen::MatrixXcd ChartArmaZform::eval_M(Complex z) const { return eval_zform(M, p - 1, z); }

ChartArmaZform chart_arma_zform(const ChartCoordinates& c) {
    c.validate();
    const int m = c.chart.m;
    const int n = c.chart.n();
    const int p = c.chart.p();

    ChartArmaZform out;
    out.p = p;
    out.K = c.K;
    out.A.assign(static_cast<size_t>(p) + 1, Eigen::MatrixXd::Zero(m, m));
    out.M.assign(static_cast<size_t>(std::max(p, 1)), Eigen::MatrixXd::Zero(m, n));

    // Column j of A has formal degree n_j: coefficient of z^{k-1} in entry
    // (i, j) is -alpha_{ijk}, plus the monic z^{n_i} on the diagonal.
    for (int j = 1; j <= m; ++j) {
        const int nj = c.chart.indices[static_cast<size_t>(j - 1)];
        if (nj > 0) out.A[static_cast<size_t>(p - nj)](j - 1, j - 1) += 1.0;
        if (nj == 0) out.A[static_cast<size_t>(p)](j - 1, j - 1) = 1.0;  // a_jj = 1
        for (int i = 1; i <= m; ++i)
            for (int k = 1; k <= nj; ++k) {
                const int power = k - 1;  // z^{k-1}
                out.A[static_cast<size_t>(p - power)](i - 1, j - 1) -=
                    c.alpha(i - 1, c.chart.state_position(j, k));
            }
    }

    // M column (j, k): order-k coefficient drop of column j at formal degree
    // n_j, i.e. z^l in a_ij maps to z^{l-k} when l >= k and vanishes below.
    for (int j = 1; j <= m; ++j) {
        const int nj = c.chart.indices[static_cast<size_t>(j - 1)];
        for (int k = 1; k <= nj; ++k) {
            const int col = c.chart.state_position(j, k);
            for (int i = 1; i <= m; ++i) {
                for (int l = k; l <= nj; ++l) {
                    // z^l coefficient of a_ij: monic top on the diagonal,
                    // -alpha_{ij,l+1} below the formal degree.
                    const double coeff =
                        (l == nj) ? (i == j ? 1.0 : 0.0)
                                  : -c.alpha(i - 1, c.chart.state_position(j, l + 1));
                    if (coeff == 0.0) continue;
                    const int power = l - k;  // z^{l-k}, stored at M[p-1-power]
                    out.M[static_cast<size_t>(p - 1 - power)](i - 1, col) += coeff;
                }
            }
        }
    }

    // B = A + M K, aligning z^{p-l} with the z^{p-1-l'} convention of M.
    out.B = out.A;
    for (size_t l = 1; l < out.B.size(); ++l) out.B[l] += out.M[l - 1] * c.K;
    return out;
}

LinearSystem arma_from_chart(const ChartCoordinates& c) {
    const ChartArmaZform zf = chart_arma_zform(c);
    const int m = c.chart.m;
    const int p = zf.p;

    // Row degrees: d_i = max(n_i, max_j n_j - 1); shifting row i by z^{-d_i}
    // keeps both polynomials in z^-1 and leaves H = A^-1 B unchanged.
    std::vector<int> row_deg(static_cast<size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        int d = c.chart.indices[static_cast<size_t>(i)];
        for (int j = 0; j < m; ++j)
            if (j != i) d = std::max(d, c.chart.indices[static_cast<size_t>(j)] - 1);
        row_deg[static_cast<size_t>(i)] = d;
    }

    std::vector<Eigen::MatrixXd> A(static_cast<size_t>(p) + 1, Eigen::MatrixXd::Zero(m, m));
    std::vector<Eigen::MatrixXd> B(static_cast<size_t>(p) + 1, Eigen::MatrixXd::Zero(m, m));
    for (int i = 0; i < m; ++i) {
        const int di = row_deg[static_cast<size_t>(i)];
        for (int k = 0; k <= di; ++k) {
            // z^{-k} coefficient of row i = z^{d_i - k} coefficient = zform[p - d_i + k].
            const int l = p - di + k;
            if (l < 0 || l > p) continue;
            A[static_cast<size_t>(k)].row(i) = zf.A[static_cast<size_t>(l)].row(i);
            B[static_cast<size_t>(k)].row(i) = zf.B[static_cast<size_t>(l)].row(i);
        }
    }
    try {
        return LinearSystem::from_arma(PolynomialMatrix(std::move(A)), PolynomialMatrix(std::move(B)));
    } catch (const DegenerateModelError&) {
        throw DegenerateModelError(
            "chart has no invertible constant AR term (index spread exceeds one)");
    }
}

Eigen::MatrixXcd chart_transfer_ss(const ChartCoordinates& c, Complex z) {
    return ss_from_chart(c).transfer(z);
}

Eigen::MatrixXcd chart_transfer_arma(const ChartCoordinates& c, Complex z) {
    const ChartArmaZform zf = chart_arma_zform(c);
    const Eigen::MatrixXcd az = zf.eval_A(z);
    const Eigen::MatrixXcd bz = zf.eval_B(z);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(az);
    const Eigen::MatrixXcd h = lu.solve(bz);
    if (!h.allFinite()) throw EvaluationError("AR form singular at the evaluation point");
    return h;
}

namespace {

// Hankel row (channel i, block j) truncated to len entries.
Eigen::VectorXd hankel_row(const std::vector<Eigen::MatrixXd>& terms, int i, int j, int len) {
    const int m = static_cast<int>(terms[0].cols());
    Eigen::VectorXd row(len);
    for (int col = 0; col < len; ++col) {
        const int block = j + col / m;
        const int input = col % m;
        row(col) = terms[static_cast<size_t>(block)](i - 1, input);
    }
    return row;
}

}  // namespace

ChartCoordinates extract_chart(const LinearSystem& s, const ChartId& chart, double tol) {
    chart.validate();
    if (tol <= 0.0) throw DomainError("extraction tolerance must be positive");
    if (s.outputs() != chart.m || s.inputs() != chart.m)
        throw DimensionError("chart extraction needs a square system matching the chart");

    const int m = chart.m;
    const int n = chart.n();
    const int p = chart.p();
    const int len = 4 * n * m;  // truncated row length for the least squares
    const int need = p + 1 + (len + m - 1) / m + 1;
    const MarkovSequence seq = s.markov(need);

    if ((seq.terms[0] - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-8)
        throw ChartError("chart extraction assumes identity feedthrough (H_0 = I)");

    // Basis rows in state order.
    Eigen::MatrixXd basis(n, len);
    std::vector<std::pair<int, int>> basis_id;
    for (int j = 1; j <= m; ++j)
        for (int k = 1; k <= chart.indices[static_cast<size_t>(j - 1)]; ++k) {
            basis.row(chart.state_position(j, k)) = hankel_row(seq.terms, j, k, len).transpose();
            basis_id.emplace_back(j, k);
        }

    // Independence of the designated rows.
    std::vector<Eigen::VectorXd> ortho;
    for (int r = 0; r < n; ++r) {
        Eigen::VectorXd v = basis.row(r).transpose();
        const double scale = v.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : ortho) v -= q.dot(v) * q;
        if (scale == 0.0 || v.norm() <= tol * scale) {
            const auto [j, k] = basis_id[static_cast<size_t>(r)];
            throw ChartError("designated Hankel row (channel " + std::to_string(j) + ", block " +
                             std::to_string(k) + ") is dependent; chart not applicable");
        }
        ortho.push_back(v / v.norm());
    }

    ChartCoordinates out;
    out.chart = chart;
    out.alpha.resize(m, n);
    out.K.resize(n, m);

    const Eigen::MatrixXd basis_t = basis.transpose();  // len x n
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis_t);
    for (int i = 1; i <= m; ++i) {
        const int ni = chart.indices[static_cast<size_t>(i - 1)];
        const Eigen::VectorXd target = hankel_row(seq.terms, i, ni + 1, len);
        const Eigen::VectorXd coeffs = qr.solve(target);
        const double residual = (basis_t * coeffs - target).norm();
        if (residual > tol * std::max(1.0, target.norm()))
            throw ChartError("channel " + std::to_string(i) +
                             " is not reproduced by the chart basis (residual " +
                             std::to_string(residual) + ")");
        out.alpha.row(i - 1) = coeffs.transpose();
    }

    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= chart.indices[static_cast<size_t>(i - 1)]; ++j)
            out.K.row(chart.state_position(i, j)) = seq.terms[static_cast<size_t>(j)].row(i - 1);

    return out;
}

}  // namespace sysgeom
