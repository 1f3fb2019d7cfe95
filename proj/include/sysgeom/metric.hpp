#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "sysgeom/charts.hpp"
#include "sysgeom/lsys.hpp"
#include "sysgeom/quadrature.hpp"

namespace sysgeom {

/// Symmetric positive-semidefinite coordinate metric with method metadata.
struct MetricTensor {
    Eigen::MatrixXd entries;
    std::vector<std::string> labels;
    std::string mode;
    int nodes = 0;
    int truncation = 0;      // series length for truncated-transform modes
    double quad_delta = 0;   // relative change at the accepted quadrature level
    double asymmetry = 0;    // worst |g_ij - g_ji| before symmetrization
    double imag_residual = 0;
    double min_eigenvalue = 0;
    int dim() const { return static_cast<int>(entries.rows()); }
};

enum class DerivKind { Analytic, Numeric };
enum class DerivScheme { Central, ComplexStep };

/// A parametrization: an indexed family theta -> system with the machinery to
/// differentiate the transfer function and the Markov sequence along each
/// coordinate. Implementations are immutable and hold their base point.
class ParamLayout {
public:
    virtual ~ParamLayout() = default;

    virtual int dim() const = 0;
    virtual int outputs() const = 0;
    virtual std::string label(int i) const = 0;
    virtual Eigen::VectorXd theta() const = 0;
    virtual const LinearSystem& system() const = 0;
    virtual LinearSystem rebuild(const Eigen::VectorXd& theta) const = 0;

    /// H(z) of the base point (overridable for forms with a cheaper path).
    virtual Eigen::MatrixXcd transfer(Complex z) const;

    /// Analytic dH/dtheta_i at z.
    virtual Eigen::MatrixXcd tangent(int i, Complex z) const = 0;
    /// All tangents at once (shared per-node factorizations).
    virtual void tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const;

    /// Analytic Markov derivatives dH_0..dH_count per coordinate.
    virtual std::vector<Eigen::MatrixXd> markov_derivative(int i, int count) const = 0;

    /// Markov derivatives by a complex step on the construction map
    /// (exact to machine precision for the polynomial maps used here).
    std::vector<Eigen::MatrixXd> markov_derivative_cstep(int i, int count) const;

protected:
    /// Markov expansion of the rebuilt system at complex-perturbed theta;
    /// the default routes through rebuild() templated evaluation.
    virtual std::vector<Eigen::MatrixXcd> markov_complex(const Eigen::VectorXcd& theta,
                                                         int count) const = 0;
};

/// Full monic square ARMA(p,p) layout: theta runs over every entry of
/// A_1..A_p then B_1..B_p, lexicographic by (lag, row, col); A_0 = I and the
/// constant MA term are held fixed; d = 2 p m^2.
class ArmaFullLayout : public ParamLayout {
public:
    explicit ArmaFullLayout(const LinearSystem& s);

    int dim() const override { return 2 * p_ * m_ * m_; }
    int outputs() const override { return m_; }
    std::string label(int i) const override;
    Eigen::VectorXd theta() const override;
    const LinearSystem& system() const override { return s_; }
    LinearSystem rebuild(const Eigen::VectorXd& theta) const override;
    Eigen::MatrixXcd tangent(int i, Complex z) const override;
    void tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const override;
    std::vector<Eigen::MatrixXd> markov_derivative(int i, int count) const override;

    int lag_count() const { return p_; }
    /// Decodes index -> (is_ma, lag 1..p, row, col).
    struct Slot {
        bool ma;
        int lag, row, col;
    };
    Slot slot(int i) const;

protected:
    std::vector<Eigen::MatrixXcd> markov_complex(const Eigen::VectorXcd& theta,
                                                 int count) const override;

private:
    LinearSystem s_;
    int m_ = 0, p_ = 0;
};

/// State-space chart layout: theta = (alpha block, K block). The feedthrough
/// is not a coordinate and may differ from the identity.
class SsChartLayout : public ParamLayout {
public:
    explicit SsChartLayout(const ChartCoordinates& c);
    SsChartLayout(const ChartCoordinates& c, const Eigen::MatrixXd& D);

    int dim() const override { return c_.dim(); }
    int outputs() const override { return c_.chart.m; }
    std::string label(int i) const override;
    Eigen::VectorXd theta() const override { return c_.theta(); }
    const LinearSystem& system() const override { return s_; }
    LinearSystem rebuild(const Eigen::VectorXd& theta) const override;
    Eigen::MatrixXcd tangent(int i, Complex z) const override;
    void tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const override;
    std::vector<Eigen::MatrixXd> markov_derivative(int i, int count) const override;

    const ChartCoordinates& coordinates() const { return c_; }

protected:
    std::vector<Eigen::MatrixXcd> markov_complex(const Eigen::VectorXcd& theta,
                                                 int count) const override;

private:
    friend class ArmaChartLayout;

    /// alpha index -> (combination row in A, state column); row is -1 for
    /// channels without states (frozen coordinates, zero tangent).
    std::pair<int, int> alpha_slot(int i) const;

    ChartCoordinates c_;
    Eigen::MatrixXd D_;
    StateSpaceForm ss_;
    LinearSystem s_;
};

/// ARMA chart layout: same coordinates, tangents assembled from the
/// ascending-power realization through dB = dA + dM K + M dK with the
/// index split between the alpha and K blocks.
class ArmaChartLayout : public ParamLayout {
public:
    explicit ArmaChartLayout(const ChartCoordinates& c);

    int dim() const override { return c_.dim(); }
    int outputs() const override { return c_.chart.m; }
    std::string label(int i) const override;
    Eigen::VectorXd theta() const override { return c_.theta(); }
    const LinearSystem& system() const override { return s_; }
    LinearSystem rebuild(const Eigen::VectorXd& theta) const override;
    Eigen::MatrixXcd transfer(Complex z) const override;
    Eigen::MatrixXcd tangent(int i, Complex z) const override;
    void tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const override;
    std::vector<Eigen::MatrixXd> markov_derivative(int i, int count) const override;

    const ChartCoordinates& coordinates() const { return c_; }

protected:
    std::vector<Eigen::MatrixXcd> markov_complex(const Eigen::VectorXcd& theta,
                                                 int count) const override;

private:
    ChartCoordinates c_;
    ChartArmaZform zf_;
    // Both realizations parametrize one map; the state-space one supplies the
    // Markov machinery while the tangent formulas work on the ascending form.
    SsChartLayout ss_;
};

/// dH/dtheta_i = A(z)^-1 (B_i(z) - A_i(z) H(z)) for the full monic layout,
/// where A_i, B_i are single-entry indicators times z^-lag.
Eigen::MatrixXcd transfer_derivative_arma(const LinearSystem& s, int theta_index, Complex z);

/// State-space chart derivative: C R dB for K coordinates and C R dA R B for
/// alpha coordinates, R = (zI - A)^-1.
Eigen::MatrixXcd transfer_derivative_ss(const ChartCoordinates& c, int theta_index, Complex z);

/// Derivative oracle: central difference (h = 1e-6 max(1,|theta_i|)) on the
/// rebuilt transfer, or a complex step (h = 1e-30) through the Markov map
/// summed into the transform.
Eigen::MatrixXcd transfer_derivative_numeric(const ParamLayout& layout, int theta_index, Complex z,
                                             DerivScheme scheme);

struct TensorOptions {
    QuadratureOptions quadrature;
    double stability_margin = 1e-6;
};

/// g_ij = mean over the unit circle of tr[dH_i(z) dH_j^T(z^-1)], assembled as
/// a Gram matrix of vectorized tangents (z^-1 = conj z on the contour).
MetricTensor metric_tensor(const ParamLayout& layout, DerivKind kind,
                           const TensorOptions& opt = {});

/// Shared finalization: symmetrize, record asymmetry / imaginary residual /
/// smallest eigenvalue.
MetricTensor finalize_tensor(const Eigen::MatrixXcd& gram, std::vector<std::string> labels,
                             std::string mode, int nodes, double delta, int truncation);

}  // namespace sysgeom
