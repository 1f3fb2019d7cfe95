#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sysgeom/lsys.hpp"

namespace sysgeom {

/// Identifier of one overlapping chart: output count m and per-output row
/// counts (n_1, ..., n_m) designating the Hankel rows used as a basis.
struct ChartId {
    int m = 0;
    std::vector<int> indices;

    int n() const;  // sum of indices (state dimension)
    int p() const;  // max index
    void validate() const;

    /// 0-based offset of channel j's state block (j is 1-based).
    int block_offset(int j) const;
    /// 0-based state position of basis row (j, k), j, k 1-based, k <= n_j.
    int state_position(int j, int k) const;
};

/// Coordinates theta = (alpha-block, K-block) of a system in a chart.
/// alpha(i-1, s) is the combination coefficient alpha_{ijk} of channel i's
/// first dependent row on basis row (j, k), where s = state_position(j, k);
/// K is the n x m matrix of leading Hankel-row entries. The flattened theta
/// is all alpha in lexicographic (i, j, k) order followed by K row-major,
/// giving 2nm coordinates.
struct ChartCoordinates {
    ChartId chart;
    Eigen::MatrixXd alpha;  // m x n
    Eigen::MatrixXd K;      // n x m

    Eigen::VectorXd theta() const;
    static ChartCoordinates from_theta(const ChartId& chart, const Eigen::VectorXd& theta);
    int dim() const { return 2 * chart.n() * chart.m; }
    void validate() const;
};

/// Raw state-space realization of a chart point: per-channel shift blocks,
/// alpha rows feeding the last state of each block, C selecting the first
/// state of each nonzero block, B = K, D = I (overridable).
StateSpaceForm chart_state_space(const ChartCoordinates& c);
StateSpaceForm chart_state_space(const ChartCoordinates& c, const Eigen::MatrixXd& D);

LinearSystem ss_from_chart(const ChartCoordinates& c);
LinearSystem ss_from_chart(const ChartCoordinates& c, const Eigen::MatrixXd& D);

/// ARMA realization in ascending powers of z (global degree p = max n_i):
/// diagonal entries z^{n_i} - alpha_{ii n_i} z^{n_i - 1} - ... - alpha_{ii1},
/// off-diagonal entries -alpha_{ij n_j} z^{n_j - 1} - ... - alpha_{ij1};
/// M holds, in column (j, k), the order-k coefficient-drop derivatives of
/// column j of A at formal degree n_j; B = A + M K.
struct ChartArmaZform {
    int p = 0;
    std::vector<Eigen::MatrixXd> A;  // p+1 terms, A[l] multiplies z^{p-l}
    std::vector<Eigen::MatrixXd> B;  // p+1 terms, same convention
    std::vector<Eigen::MatrixXd> M;  // p terms (m x n), M[l] multiplies z^{p-1-l}
    Eigen::MatrixXd K;

    Eigen::MatrixXcd eval_A(Complex z) const;
    Eigen::MatrixXcd eval_B(Complex z) const;
    Eigen::MatrixXcd eval_M(Complex z) const;
};

ChartArmaZform chart_arma_zform(const ChartCoordinates& c);

/// The same realization converted to the internal z^-1 convention, each row
/// shifted by its own degree so the constant AR term stays invertible. Charts
/// whose index spread exceeds one (some n_j > n_i + 1) have no such form and
/// raise DegenerateModelError; the pointwise z-form evaluation above remains
/// available for them.
LinearSystem arma_from_chart(const ChartCoordinates& c);

/// Transfer function evaluated from each realization (cross-checks).
Eigen::MatrixXcd chart_transfer_ss(const ChartCoordinates& c, Complex z);
Eigen::MatrixXcd chart_transfer_arma(const ChartCoordinates& c, Complex z);

/// Reads coordinates off a system: alpha from least squares over truncated
/// Hankel rows of length 4nm, K from the leading entries of the basis rows.
/// Fails with ChartError if the designated rows are dependent (naming the
/// first failing row), if the least-squares residual exceeds tol, or if the
/// system lacks identity feedthrough.
ChartCoordinates extract_chart(const LinearSystem& s, const ChartId& chart, double tol = 1e-8);

}  // namespace sysgeom
