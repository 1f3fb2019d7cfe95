#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sysgeom/lsys.hpp"

namespace sysgeom {

struct HankelAnalysis {
    std::vector<int> indices;        // retained-row count per output channel
    int degree = 0;                  // sum of indices = numerical Hankel rank
    std::vector<int> selected_rows;  // 1-based positions of the retained rows
    double tolerance = 0.0;
    std::vector<double> singular_values;
};

/// Block Hankel matrix with block (i, j) = H_{i+j-1} (1-based blocks; H_0 is
/// excluded). Requires the sequence to reach H_{block_rows + block_cols - 1}.
Eigen::MatrixXd build_hankel(const MarkovSequence& seq, int block_rows, int block_cols);

/// Top-down row search: a row is retained iff its residual after projection
/// onto the span of previously retained rows exceeds tol * ||row||
/// (Gram-Schmidt with reorthogonalization). Once a channel's row is rejected
/// at some block, all of its deeper rows are rejected as well, matching the
/// shift structure of the Hankel matrix.
HankelAnalysis kronecker_indices(const Eigen::MatrixXd& hankel, int block_height,
                                 double tol = 1e-8);

/// Numerical rank (singular values above tol * largest) of a Hankel truncation
/// sized at twice the representation-derived degree bound.
int mcmillan_degree(const LinearSystem& s, double tol = 1e-8);

/// Convenience: builds the default-size truncation and runs both the row
/// search and the SVD on it.
HankelAnalysis analyze_system(const LinearSystem& s, double tol = 1e-8);

/// Degree bound read off the representation: state dimension for state-space,
/// m * max(p, q) for ARMA pairs, a quarter of the length for raw sequences.
int degree_bound(const LinearSystem& s);

}  // namespace sysgeom
