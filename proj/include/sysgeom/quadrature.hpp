#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "sysgeom/errors.hpp"

namespace sysgeom {

using Complex = std::complex<double>;

struct QuadratureOptions {
    int start_nodes = 512;   // must be a power of two
    double rel_tol = 1e-11;  // doubling stops when successive means agree to this
    int max_nodes = 1 << 16;
};

struct QuadratureResult {
    Eigen::MatrixXcd value;
    int nodes = 0;     // node count of the accepted mean
    double delta = 0;  // relative change at the last doubling
};

/// Mean of f over the unit circle, (1/N) sum_k f(e^{2 pi i k / N}), which for
/// functions analytic in an annulus around the circle equals
/// (1/2 pi i) oint f(z) z^-1 dz up to a geometrically small tail.
/// Doubles N until successive means agree to rel_tol or max_nodes is hit;
/// non-convergence (poles too near the circle) raises QuadratureError.
QuadratureResult circle_average(const std::function<Eigen::MatrixXcd(Complex)>& f,
                                const QuadratureOptions& opt = {});

/// Scalar convenience wrapper.
Complex circle_average_scalar(const std::function<Complex(Complex)>& f,
                              const QuadratureOptions& opt = {});

}  // namespace sysgeom
