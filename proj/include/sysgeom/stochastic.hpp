#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sysgeom/lsys.hpp"
#include "sysgeom/metric.hpp"

namespace sysgeom {

/// A stable square system driven by white noise of covariance R. When
/// r_coords is set, the upper triangle of R (row-major) is appended to the
/// coordinate vector of whatever parametrization is in use.
struct StochasticSystem {
    LinearSystem system;
    Eigen::MatrixXd R;
    bool r_coords = false;

    StochasticSystem(LinearSystem s, Eigen::MatrixXd r, bool with_r_coords = false);
};

/// Output covariances Gamma_k = sum_i H_i R H_{i+k}^T with a fitted geometric
/// tail certificate.
struct CovarianceSequence {
    std::vector<Eigen::MatrixXd> gammas;
    double rho = 0.0;
    double tail_bound = 0.0;
    int length() const { return static_cast<int>(gammas.size()) - 1; }
};

CovarianceSequence covariance_sequence(const StochasticSystem& ss, int count);
CovarianceSequence covariance_sequence_adaptive(const StochasticSystem& ss);

/// One-sided transform U(z) = sum_{k>=0} Gamma_k z^-k (truncated series).
Eigen::MatrixXcd u_eval(const StochasticSystem& ss, Complex z);

/// Spectral density T(z) = H(z) R H^T(z^-1), evaluated directly.
Eigen::MatrixXcd t_eval(const StochasticSystem& ss, Complex z);

/// Max over equispaced circle nodes of || T - U - U^T(z^-1) + Gamma_0 ||.
double tm_identity_residual(const StochasticSystem& ss, int nodes = 64);

enum class StochMode { OneSidedU, TwoSidedT };

/// Stochastic coordinate metric: the circle mean of
/// tr[dPhi_i(z) dPhi_j^T(z^-1)] with Phi = U (one-sided) or Phi = T
/// (two-sided). Analytic derivatives chain through dH (and through
/// dGamma_k for the one-sided transform); numeric ones difference the
/// transforms on rebuilt systems. The layout must parametrize ss.system.
MetricTensor stochastic_metric_tensor(const StochasticSystem& ss, const ParamLayout& layout,
                                      StochMode mode, DerivKind kind,
                                      const TensorOptions& opt = {});

}  // namespace sysgeom
