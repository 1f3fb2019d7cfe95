#include "sysgeom/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace sysgeom {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::MatrixXcd node_sum(const std::function<Eigen::MatrixXcd(Complex)>& f, int n, int stride,
                          int offset) {
    // Sum of f over nodes exp(2 pi i (stride*k + offset) / n), k = 0..n/stride-1.
    Eigen::MatrixXcd acc;
    for (int k = offset; k < n; k += stride) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const Eigen::MatrixXcd v = f(Complex(std::cos(ang), std::sin(ang)));
        if (acc.size() == 0)
            acc = v;
        else
            acc += v;
    }
    return acc;
}

}  // namespace

QuadratureResult circle_average(const std::function<Eigen::MatrixXcd(Complex)>& f,
                                const QuadratureOptions& opt) {
    if (!power_of_two(opt.start_nodes) || !power_of_two(opt.max_nodes))
        throw DomainError("quadrature node counts must be powers of two");
    if (opt.start_nodes > opt.max_nodes)
        throw DomainError("start_nodes exceeds max_nodes");

    int n = opt.start_nodes;
    Eigen::MatrixXcd sum = node_sum(f, n, 1, 0);
    Eigen::MatrixXcd mean = sum / static_cast<double>(n);
    double delta = std::numeric_limits<double>::infinity();

    while (n < opt.max_nodes) {
        // Nodes of 2n = nodes of n plus the odd 2n-nodes; reuse the old sum.
        const Eigen::MatrixXcd odd = node_sum(f, 2 * n, 2, 1);
        n *= 2;
        sum += odd;
        const Eigen::MatrixXcd refined = sum / static_cast<double>(n);
        const double scale = std::max(refined.norm(), 1e-12);
        delta = (refined - mean).norm() / scale;
        mean = refined;
        if (delta <= opt.rel_tol) return {mean, n, delta};
    }
    throw QuadratureError("circle quadrature did not converge at " + std::to_string(n) +
                              " nodes (last relative delta " + std::to_string(delta) + ")",
                          delta);
}

Complex circle_average_scalar(const std::function<Complex(Complex)>& f,
                              const QuadratureOptions& opt) {
    auto wrapped = [&f](Complex z) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = f(z);
        return m;
    };
    return circle_average(wrapped, opt).value(0, 0);
}

}  // namespace sysgeom
