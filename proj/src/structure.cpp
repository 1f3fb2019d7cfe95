#include "sysgeom/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sysgeom/metric.hpp"

namespace sysgeom {

int CanonicalPattern::free_parameter_count() const {
    int count = 0;
    for (const auto& mask : ar_mask) count += (mask.array() == static_cast<std::uint8_t>(MaskEntry::Free)).count();
    for (const auto& mask : ma_mask) count += (mask.array() == static_cast<std::uint8_t>(MaskEntry::Free)).count();
    return count;
}

MaskEntry CanonicalPattern::ar(int lag, int i, int j) const {
    return static_cast<MaskEntry>(ar_mask[static_cast<size_t>(lag)](i, j));
}

MaskEntry CanonicalPattern::ma(int lag, int i, int j) const {
    return static_cast<MaskEntry>(ma_mask[static_cast<size_t>(lag)](i, j));
}

CanonicalPattern canonical_pattern(const std::vector<int>& indices) {
    const int m = static_cast<int>(indices.size());
    if (m == 0) throw DimensionError("canonical pattern needs at least one channel");
    int p = 0, total = 0;
    for (int ni : indices) {
        if (ni < 0) throw DomainError("row counts must be nonnegative");
        p = std::max(p, ni);
        total += ni;
    }
    if (total == 0) throw DomainError("row counts must not all be zero");

    CanonicalPattern pat;
    pat.m = m;
    pat.p = p;
    pat.indices = indices;
    pat.nij.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j)
                pat.nij(i, j) = indices[static_cast<size_t>(i)];
            else if (i > j)
                pat.nij(i, j) = std::min(indices[static_cast<size_t>(i)] + 1, indices[static_cast<size_t>(j)]);
            else
                pat.nij(i, j) = std::min(indices[static_cast<size_t>(i)], indices[static_cast<size_t>(j)]);
        }

    using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
    pat.ar_mask.assign(static_cast<size_t>(p) + 1, Mask::Zero(m, m));
    pat.ma_mask.assign(static_cast<size_t>(p) + 1, Mask::Zero(m, m));

    for (int i = 0; i < m; ++i) {
        const int ni = indices[static_cast<size_t>(i)];
        pat.ar_mask[0](i, i) = static_cast<std::uint8_t>(MaskEntry::FixedOne);
        pat.ma_mask[0](i, i) = static_cast<std::uint8_t>(MaskEntry::FixedOne);
        for (int j = 0; j < m; ++j) {
            // Column j of row i carries lags n_i - n_ij + 1 .. n_i; a lag of
            // zero is the constant-term entry below the diagonal.
            const int lo = ni - pat.nij(i, j) + 1;
            for (int lag = std::max(lo, 0); lag <= ni; ++lag) {
                if (lag == 0 && i == j) continue;
                pat.ar_mask[static_cast<size_t>(lag)](i, j) = static_cast<std::uint8_t>(MaskEntry::Free);
            }
            for (int lag = 1; lag <= ni; ++lag)
                pat.ma_mask[static_cast<size_t>(lag)](i, j) = static_cast<std::uint8_t>(MaskEntry::Free);
        }
    }
    return pat;
}

CanonicalInstance sample_canonical(const std::vector<int>& indices, std::uint64_t seed,
                                   double scale) {
    CanonicalPattern pat = canonical_pattern(indices);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    for (int attempt = 0; attempt < 64; ++attempt) {
        const double s = scale / (1.0 + 0.5 * attempt);
        std::vector<Eigen::MatrixXd> a(static_cast<size_t>(pat.p) + 1,
                                       Eigen::MatrixXd::Zero(pat.m, pat.m));
        std::vector<Eigen::MatrixXd> b = a;
        for (int lag = 0; lag <= pat.p; ++lag)
            for (int i = 0; i < pat.m; ++i)
                for (int j = 0; j < pat.m; ++j) {
                    if (pat.ar(lag, i, j) == MaskEntry::FixedOne)
                        a[static_cast<size_t>(lag)](i, j) = 1.0;
                    else if (pat.ar(lag, i, j) == MaskEntry::Free)
                        a[static_cast<size_t>(lag)](i, j) = s * unif(rng);
                    if (pat.ma(lag, i, j) == MaskEntry::FixedOne)
                        b[static_cast<size_t>(lag)](i, j) = 1.0;
                    else if (pat.ma(lag, i, j) == MaskEntry::Free)
                        b[static_cast<size_t>(lag)](i, j) = s * unif(rng);
                }
        PolynomialMatrix A{a}, B{b};
        const LinearSystem sys = LinearSystem::from_arma(A, B);
        if (sys.stability().stable && sys.stability().spectral_radius < 0.85)
            return {std::move(pat), std::move(A), std::move(B)};
    }
    throw NumericError("failed to sample a stable canonical pair");
}

IrreducibilityReport is_irreducible(const PolynomialMatrix& A, const PolynomialMatrix& B,
                                    double tol) {
    const LinearSystem s = LinearSystem::from_arma(A, B);
    const HankelAnalysis an = analyze_system(s, tol);
    IrreducibilityReport rep;
    rep.common_degree = std::max(A.degree(), B.degree());
    rep.kronecker = an.indices;
    rep.mcmillan = an.degree;
    const int max_index = an.indices.empty() ? 0 : *std::max_element(an.indices.begin(), an.indices.end());
    rep.irreducible = (max_index == rep.common_degree);
    return rep;
}

std::pair<PolynomialMatrix, PolynomialMatrix> unimodular_inflate(const PolynomialMatrix& A,
                                                                 const PolynomialMatrix& B,
                                                                 const PolynomialMatrix& U) {
    if (!U.is_unimodular())
        throw DomainError("left factor must be unimodular to preserve the system class");
    return {U * A, U * B};
}

namespace {

// Product of q elementary one-lag factors I + c E_{ij} z^-1, i != j, resampled
// until the top coefficient survives (the factors can telescope).
PolynomialMatrix random_unimodular(int q, int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.3, 0.9);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int attempt = 0; attempt < 256; ++attempt) {
        PolynomialMatrix u = PolynomialMatrix::identity(m);
        int prev_i = -1, prev_j = -1;
        for (int f = 0; f < q; ++f) {
            int i = 0, j = 0;
            do {
                i = std::uniform_int_distribution<int>(0, m - 1)(rng);
                j = std::uniform_int_distribution<int>(0, m - 1)(rng);
            } while (i == j || (i == prev_i && j == prev_j));
            prev_i = i;
            prev_j = j;
            const double c = (coin(rng) != 0 ? 1.0 : -1.0) * mag(rng);
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
            e(i, j) = c;
            u = u * PolynomialMatrix({Eigen::MatrixXd::Identity(m, m), e});
        }
        if (u.degree() == q && u.coeff(q).norm() > 1e-6) return u;
    }
    throw NumericError("failed to generate a degree-q unimodular matrix");
}

}  // namespace

NoninvarianceReport noninvariance_demo(int q, std::uint64_t seed) {
    if (q < 1) throw DomainError("non-invariance demo needs q >= 1 (constant case is degenerate)");
    const int m = 2;
    std::mt19937_64 rng(seed);

    NoninvarianceReport rep;
    rep.q = q;
    rep.m = m;
    rep.H = random_unimodular(q, m, rng);
    rep.h_unimodular = rep.H.is_unimodular();
    const PolynomialMatrix hinv = rep.H.unimodular_inverse();
    rep.h_inverse_unimodular = hinv.is_unimodular();

    const LinearSystem sys_ma = LinearSystem::from_arma(PolynomialMatrix::identity(m), rep.H);
    const LinearSystem sys_ar = LinearSystem::from_arma(hinv, PolynomialMatrix::identity(m));
    rep.orders_moving_average = {0, rep.H.degree()};
    rep.orders_autoregressive = {hinv.degree(), 0};

    const int len = q + 24;
    const MarkovSequence ma = sys_ma.markov(len);
    const MarkovSequence ar = sys_ar.markov(len);
    double resid = 0.0;
    for (int i = 0; i <= len; ++i)
        resid = std::max(resid, (ma.terms[static_cast<size_t>(i)] - ar.terms[static_cast<size_t>(i)])
                                    .cwiseAbs()
                                    .maxCoeff());
    rep.markov_residual = resid;

    rep.analysis_ma = analyze_system(sys_ma);
    rep.analysis_ar = analyze_system(sys_ar);
    return rep;
}

TangentProbeReport degenerate_tangent_probe(const std::vector<int>& indices,
                                            const std::vector<double>& b_grid,
                                            std::uint64_t seed) {
    const int m = static_cast<int>(indices.size());
    int p = 0;
    bool all_equal = true;
    for (int ni : indices) {
        p = std::max(p, ni);
        if (ni != indices[0]) all_equal = false;
    }
    if (all_equal)
        throw DomainError("probe not applicable: equal row counts make [A_p, B_p] full rank");
    if (b_grid.empty()) throw DomainError("probe needs a nonempty parameter grid");

    const CanonicalInstance inst = sample_canonical(indices, seed);
    const LinearSystem sys = LinearSystem::from_arma(inst.A, inst.B);  // monic normalization
    const ArmaForm* f = sys.arma();

    // Left null vector of the monic pair's top coefficients.
    Eigen::MatrixXd top(m, 2 * m);
    top.leftCols(m) = f->A.coeff_or_zero(p);
    top.rightCols(m) = f->B.coeff_or_zero(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(top.transpose(), Eigen::ComputeFullV);
    const Eigen::VectorXd v = svd.matrixV().col(m - 1);
    if ((v.transpose() * top).norm() > 1e-8 * std::max(1.0, top.norm()))
        throw NumericError("top coefficient pair is unexpectedly full rank");

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd y0(m);
    for (int i = 0; i < m; ++i) y0(i) = 0.3 * unif(rng);
    y0 -= (v.dot(y0)) * v;  // det(I + y v^T z^-1) must reduce to 1 + b z^-1

    TangentProbeReport rep;
    rep.indices = indices;
    rep.m = m;
    rep.p = p;
    rep.full_dim = 2 * p * m * m;
    rep.canonical_free_count = inst.pattern.free_parameter_count();
    rep.b_values = b_grid;

    const int node_count = 16;
    std::vector<Complex> nodes;
    for (int k = 0; k < node_count; ++k) {
        const double ang = 2.0 * std::numbers::pi * (k + 0.5) / node_count;
        nodes.emplace_back(std::cos(ang), std::sin(ang));
    }

    std::vector<Eigen::MatrixXcd> h_ref;
    for (const Complex& z : nodes) h_ref.push_back(sys.transfer(z));

    const int d = rep.full_dim;
    const int cols = node_count * m * m;
    Eigen::MatrixXcd stacked(d * static_cast<int>(b_grid.size()), cols);
    Eigen::MatrixXcd base(d, cols);

    // The factor annihilates the top coefficients, so the product stays at
    // degree p up to roundoff; the residue is dropped explicitly so the full
    // layout keeps its 2 p m^2 coordinates.
    auto truncate_to_p = [p, m](const PolynomialMatrix& poly) {
        std::vector<Eigen::MatrixXd> c;
        for (int k = 0; k <= p; ++k) c.push_back(poly.coeff_or_zero(k));
        if (poly.coeff_or_zero(p + 1).norm() > 1e-8 * std::max(1.0, poly.max_coeff()))
            throw NumericError("one-lag factor failed to cancel the top coefficient");
        (void)m;
        return PolynomialMatrix(std::move(c));
    };

    double invariance = 0.0;
    auto tangent_rows = [&](double b, Eigen::Ref<Eigen::MatrixXcd> block) {
        const Eigen::MatrixXd mat = (y0 + b * v / v.squaredNorm()) * v.transpose();
        const PolynomialMatrix factor({Eigen::MatrixXd::Identity(m, m), mat});
        const LinearSystem inflated = LinearSystem::from_arma(truncate_to_p(factor * f->A),
                                                              truncate_to_p(factor * f->B));
        const ArmaFullLayout layout(inflated);
        for (size_t ni = 0; ni < nodes.size(); ++ni) {
            const Eigen::MatrixXcd h = inflated.transfer(nodes[ni]);
            invariance = std::max(invariance, (h - h_ref[ni]).cwiseAbs().maxCoeff());
            std::vector<Eigen::MatrixXcd> tg;
            layout.tangents(nodes[ni], tg);
            for (int i = 0; i < d; ++i)
                block.block(i, static_cast<int>(ni) * m * m, 1, m * m) =
                    Eigen::Map<const Eigen::RowVectorXcd>(tg[static_cast<size_t>(i)].data(), m * m);
        }
    };

    tangent_rows(0.0, base);
    for (size_t gi = 0; gi < b_grid.size(); ++gi)
        tangent_rows(b_grid[gi], stacked.block(static_cast<int>(gi) * d, 0, d, cols));
    rep.h_invariance_residual = invariance;

    auto rank_of = [](const Eigen::MatrixXcd& mat) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> s(mat);
        const auto& sv = s.singularValues();
        if (sv.size() == 0 || sv(0) <= 0.0) return 0;
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-7 * sv(0)) ++rank;
        return rank;
    };
    rep.rank_base = rank_of(base);
    rep.rank_grid = rank_of(stacked);
    return rep;
}

}  // namespace sysgeom
