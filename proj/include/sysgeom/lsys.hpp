#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "sysgeom/polymat.hpp"
#include "sysgeom/quadrature.hpp"

namespace sysgeom {

/// ARMA pair with invertible constant term, stored monic (A_0 = I).
struct ArmaForm {
    PolynomialMatrix A;  // m x m
    PolynomialMatrix B;  // m x r
};

struct StateSpaceForm {
    Eigen::MatrixXd A, B, C, D;
};

/// Truncated Markov sequence H_0..H_N with a declared decay bound on the tail.
struct MarkovForm {
    std::vector<Eigen::MatrixXd> terms;
    double decay_bound = 0.0;
};

struct StabilityReport {
    bool stable = false;
    double spectral_radius = 0.0;
    bool marginal = false;  // radius within the margin of 1
};

/// H_0..H_N with a fitted geometric tail certificate: rho and C majorize
/// ||H_i|| over the trailing half, tail_bound = C rho^{N+1} / (1 - rho).
struct MarkovSequence {
    std::vector<Eigen::MatrixXd> terms;
    double rho = 0.0;
    double tail_bound = 0.0;
    int length() const { return static_cast<int>(terms.size()) - 1; }
};

/// A linear dynamical system viewed as its Markov sequence, held in one of
/// three representations with conversions between them. Immutable value type.
class LinearSystem {
public:
    /// Normalizes to a monic pair (both sides premultiplied by A_0^-1).
    /// A_0 with condition number above 1e12 is rejected as degenerate.
    static LinearSystem from_arma(const PolynomialMatrix& A, const PolynomialMatrix& B);

    static LinearSystem from_state_space(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                         const Eigen::MatrixXd& C, const Eigen::MatrixXd& D);
    /// D defaults to the identity (the H_0 = I convention).
    static LinearSystem from_state_space(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                         const Eigen::MatrixXd& C);

    static LinearSystem from_markov(std::vector<Eigen::MatrixXd> terms, double decay_bound);

    int outputs() const { return outputs_; }
    int inputs() const { return inputs_; }

    const ArmaForm* arma() const { return std::get_if<ArmaForm>(&rep_); }
    const StateSpaceForm* state_space() const { return std::get_if<StateSpaceForm>(&rep_); }
    const MarkovForm* markov_form() const { return std::get_if<MarkovForm>(&rep_); }

    /// H(z) at a point: A(z)^-1 B(z), C(zI - A)^-1 B + D, or the truncated sum.
    Eigen::MatrixXcd transfer(Complex z) const;

    /// Markov terms H_0..H_N for a fixed N (usable on any system).
    MarkovSequence markov(int count) const;

    /// Markov terms with the certified-tail policy: extend until the fitted
    /// geometric tail drops below 1e-14 of the running partial norm, capped at
    /// 1e5 terms. Requires stability (else DivergenceError).
    MarkovSequence markov_adaptive() const;

    /// Spectral radius of the pole set; stable iff radius < 1 - margin.
    StabilityReport stability(double margin = 1e-9) const;

private:
    int outputs_ = 0;
    int inputs_ = 0;
    std::variant<ArmaForm, StateSpaceForm, MarkovForm> rep_;
};

enum class InnerProductMethod { Time, Frequency };

/// <s1, s2> = sum_i tr[H_i^1 (H_i^2)^T]  (time form, truncated with certified
/// tails) or the mean over the unit circle of tr[H_1(z) H_2^T(z^-1)]
/// (frequency form). Both operands must be stable and share (m, r).
double inner_product(const LinearSystem& s1, const LinearSystem& s2, InnerProductMethod method,
                     const QuadratureOptions& opt = {});

double system_norm(const LinearSystem& s, InnerProductMethod method = InnerProductMethod::Time);

/// d(s1, s2) = ||s1 - s2||, computed on the Markov difference.
double system_distance(const LinearSystem& s1, const LinearSystem& s2);

/// Least-squares geometric envelope fit over the trailing half of a norm
/// sequence; returns {rho, tail_bound_for_next_index}. Shared by the Markov
/// and covariance truncation policies.
struct TailFit {
    double rho = 0.0;
    double tail_bound = 0.0;
};
TailFit fit_geometric_tail(const std::vector<double>& norms);

}  // namespace sysgeom
