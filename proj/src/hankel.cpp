#include "sysgeom/hankel.hpp"

#include <algorithm>
#include <cmath>

namespace sysgeom {

Eigen::MatrixXd build_hankel(const MarkovSequence& seq, int block_rows, int block_cols) {
    if (block_rows <= 0 || block_cols <= 0) throw DomainError("Hankel block counts must be positive");
    if (seq.length() < block_rows + block_cols - 1)
        throw TruncationError("Markov sequence too short for the requested Hankel truncation");
    const auto m = seq.terms[0].rows();
    const auto r = seq.terms[0].cols();
    Eigen::MatrixXd h(block_rows * m, block_cols * r);
    for (int i = 0; i < block_rows; ++i)
        for (int j = 0; j < block_cols; ++j)
            h.block(i * m, j * r, m, r) = seq.terms[static_cast<size_t>(i + j + 1)];
    return h;
}

HankelAnalysis kronecker_indices(const Eigen::MatrixXd& hankel, int block_height, double tol) {
    if (tol <= 0.0) throw DomainError("rank tolerance must be positive");
    if (block_height <= 0 || hankel.rows() % block_height != 0)
        throw DimensionError("Hankel row count must be a multiple of the block height");

    const int m = block_height;
    HankelAnalysis out;
    out.indices.assign(static_cast<size_t>(m), 0);
    out.tolerance = tol;

    std::vector<Eigen::VectorXd> basis;  // orthonormal retained directions
    std::vector<bool> alive(static_cast<size_t>(m), true);

    for (int row = 0; row < hankel.rows(); ++row) {
        const int channel = row % m;
        if (!alive[static_cast<size_t>(channel)]) continue;
        Eigen::VectorXd v = hankel.row(row).transpose();
        const double scale = v.norm();
        // Two projection passes stabilize the residual against cancellation.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= q.dot(v) * q;
        if (v.norm() > tol * scale && scale > 0.0) {
            basis.push_back(v / v.norm());
            out.indices[static_cast<size_t>(channel)] += 1;
            out.selected_rows.push_back(row + 1);
        } else {
            alive[static_cast<size_t>(channel)] = false;
        }
    }

    out.degree = 0;
    for (int ni : out.indices) out.degree += ni;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(hankel);
    out.singular_values.assign(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
    return out;
}

int degree_bound(const LinearSystem& s) {
    if (const auto* f = s.arma())
        return std::max(1, s.outputs() * std::max(f->A.degree(), f->B.degree()));
    if (const auto* f = s.state_space()) return std::max<int>(1, static_cast<int>(f->A.rows()));
    const auto* f = s.markov_form();
    return std::max(1, (static_cast<int>(f->terms.size()) + 1) / 4);
}

namespace {

Eigen::MatrixXd default_truncation(const LinearSystem& s) {
    const int blocks = 2 * degree_bound(s);
    const MarkovSequence seq = s.markov(2 * blocks);
    return build_hankel(seq, blocks, blocks);
}

}  // namespace

int mcmillan_degree(const LinearSystem& s, double tol) {
    if (tol <= 0.0) throw DomainError("rank tolerance must be positive");
    const StabilityReport st = s.stability();
    if (!st.stable && s.markov_form() == nullptr)
        throw DivergenceError("McMillan degree needs a stable system for a convergent truncation");
    const Eigen::MatrixXd h = default_truncation(s);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++rank;
    return rank;
}

HankelAnalysis analyze_system(const LinearSystem& s, double tol) {
    const Eigen::MatrixXd h = default_truncation(s);
    return kronecker_indices(h, s.outputs(), tol);
}

}  // namespace sysgeom
