#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "sysgeom/hankel.hpp"
#include "sysgeom/lsys.hpp"
#include "sysgeom/polymat.hpp"

namespace sysgeom {

enum class MaskEntry : std::uint8_t { Zero = 0, Free = 1, FixedOne = 2 };

/// Structural zero pattern of the canonical square ARMA form for a given set
/// of row counts: n_ii = n_i, n_ij = min(n_i + 1, n_j) below the diagonal and
/// min(n_i, n_j) above it; row i of the AR side spans lags
/// n_i - n_ij + 1 .. n_i per column, the MA side is full through lag n_i, the
/// constant AR term is unit-diagonal with entries only where n_j > n_i.
struct CanonicalPattern {
    int m = 0;
    int p = 0;
    std::vector<int> indices;
    Eigen::MatrixXi nij;
    std::vector<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>> ar_mask;  // lags 0..p
    std::vector<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>> ma_mask;  // lags 0..p

    int free_parameter_count() const;
    MaskEntry ar(int lag, int i, int j) const;
    MaskEntry ma(int lag, int i, int j) const;
};

CanonicalPattern canonical_pattern(const std::vector<int>& indices);

/// A concrete pair filling the pattern's free slots from a seeded generator,
/// rescaled until stable. Values land in roughly (-scale, scale).
struct CanonicalInstance {
    CanonicalPattern pattern;
    PolynomialMatrix A, B;  // raw, constant AR term unit-diagonal (not monic)
};
CanonicalInstance sample_canonical(const std::vector<int>& indices, std::uint64_t seed,
                                   double scale = 0.3);

struct IrreducibilityReport {
    bool irreducible = false;
    int common_degree = 0;  // max(deg A, deg B)
    std::vector<int> kronecker;
    int mcmillan = 0;
};

/// Class-membership test: the pair is irreducible iff the largest Kronecker
/// index of its transfer function equals the common polynomial degree.
IrreducibilityReport is_irreducible(const PolynomialMatrix& A, const PolynomialMatrix& B,
                                    double tol = 1e-8);

/// Left multiplication by a unimodular factor: same system, higher orders.
std::pair<PolynomialMatrix, PolynomialMatrix> unimodular_inflate(const PolynomialMatrix& A,
                                                                 const PolynomialMatrix& B,
                                                                 const PolynomialMatrix& U);

/// Order non-invariance demonstrator: a random unimodular transfer function of
/// degree q admits both a pure-MA (0, q) and a pure-AR (q, 0) representation
/// with identical Markov parameters.
struct NoninvarianceReport {
    int q = 0;
    int m = 0;
    PolynomialMatrix H;
    std::array<int, 2> orders_moving_average{};  // (0, q)
    std::array<int, 2> orders_autoregressive{};  // (q, 0)
    double markov_residual = 0.0;
    bool h_unimodular = false;
    bool h_inverse_unimodular = false;
    HankelAnalysis analysis_ma;
    HankelAnalysis analysis_ar;
};
NoninvarianceReport noninvariance_demo(int q, std::uint64_t seed);

/// Degenerate-point probe: for unequal row counts the top coefficient pair
/// [A_p, B_p] is rank deficient, so a one-lag factor I + M z^-1 with
/// M [A_p, B_p] = 0 maps the pair to other same-order pairs of the very same
/// system; sweeping the determinant parameter b of that factor and stacking
/// the full-layout tangent families exhibits strictly growing rank.
struct TangentProbeReport {
    std::vector<int> indices;
    int m = 0, p = 0;
    int full_dim = 0;               // 2 p m^2
    int canonical_free_count = 0;
    std::vector<double> b_values;
    double h_invariance_residual = 0.0;  // max over the grid and test nodes
    int rank_base = 0;                   // tangent rank at b = 0
    int rank_grid = 0;                   // rank of the family stacked over b
};
TangentProbeReport degenerate_tangent_probe(const std::vector<int>& indices,
                                            const std::vector<double>& b_grid,
                                            std::uint64_t seed);

}  // namespace sysgeom
