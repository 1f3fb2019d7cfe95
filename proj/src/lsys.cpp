#include "sysgeom/lsys.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sysgeom {

namespace {

constexpr double kTailRelTol = 1e-14;
constexpr int kTailCap = 100000;
constexpr double kConditionLimit = 1e12;

double condition_number(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

// Roots of det A(z) in the z plane: det A as a polynomial in w = z^-1 has
// nonzero constant term (det A_0 = 1 for monic pairs); the z-form companion
// matrix of w^D det A(1/w) gives the poles.
double arma_pole_radius(const ArmaForm& f) {
    const PolynomialMatrix det = f.A.determinant();
    const int deg = det.degree();
    if (deg == 0) return 0.0;
    Eigen::VectorXd c(deg + 1);  // z-form descending: c[k] = coeff of z^{deg-k}
    for (int k = 0; k <= deg; ++k) c(k) = det.coeff(k)(0, 0);
    if (std::abs(c(0)) < 1e-300) throw DegenerateModelError("det A has vanishing leading term");
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int k = 1; k <= deg; ++k) companion(0, k - 1) = -c(k) / c(0);
    companion.block(1, 0, deg - 1, deg - 1).setIdentity();
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TailFit fit_geometric_tail(const std::vector<double>& norms) {
    const int n = static_cast<int>(norms.size());
    const int start = n / 2;
    std::vector<std::pair<int, double>> pts;  // (index, log norm)
    for (int i = start; i < n; ++i)
        if (norms[static_cast<size_t>(i)] > 0.0)
            pts.emplace_back(i, std::log(norms[static_cast<size_t>(i)]));
    if (pts.empty()) return {0.0, 0.0};
    if (pts.size() == 1) return {0.5, norms.back()};

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [i, ln] : pts) {
        sx += i;
        sy += ln;
        sxx += static_cast<double>(i) * i;
        sxy += i * ln;
    }
    const double np = static_cast<double>(pts.size());
    const double denom = np * sxx - sx * sx;
    double slope = (denom != 0.0) ? (np * sxy - sx * sy) / denom : 0.0;
    double rho = std::exp(slope);
    rho = std::min(std::max(rho, 1e-12), 0.999999);

    // Majorizing constant: C = max ||H_i|| / rho^i over the window (in logs).
    double log_c = -std::numeric_limits<double>::infinity();
    for (auto [i, ln] : pts) log_c = std::max(log_c, ln - i * std::log(rho));
    const double log_tail = log_c + (n) * std::log(rho) - std::log(1.0 - rho);
    return {rho, std::exp(log_tail)};
}

LinearSystem LinearSystem::from_arma(const PolynomialMatrix& A, const PolynomialMatrix& B) {
    if (A.rows() != A.cols()) throw DimensionError("AR polynomial must be square");
    if (B.rows() != A.rows()) throw DimensionError("MA polynomial must have matching row count");
    const Eigen::MatrixXd& a0 = A.coeff(0);
    if (condition_number(a0) > kConditionLimit)
        throw DegenerateModelError("constant AR term is singular; model is degenerate");
    const Eigen::MatrixXd a0inv = a0.inverse();

    auto premul = [&a0inv](const PolynomialMatrix& p) {
        std::vector<Eigen::MatrixXd> c;
        c.reserve(static_cast<size_t>(p.degree()) + 1);
        for (int k = 0; k <= p.degree(); ++k) c.push_back(a0inv * p.coeff(k));
        return PolynomialMatrix(std::move(c));
    };

    LinearSystem s;
    s.outputs_ = A.rows();
    s.inputs_ = B.cols();
    s.rep_ = ArmaForm{premul(A), premul(B)};
    return s;
}

LinearSystem LinearSystem::from_state_space(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                            const Eigen::MatrixXd& C, const Eigen::MatrixXd& D) {
    const auto n = A.rows();
    if (A.cols() != n) throw DimensionError("state matrix must be square");
    if (B.rows() != n) throw DimensionError("input matrix row count must match the state dimension");
    if (C.cols() != n) throw DimensionError("output matrix column count must match the state dimension");
    if (D.rows() != C.rows() || D.cols() != B.cols())
        throw DimensionError("feedthrough shape must be outputs x inputs");
    LinearSystem s;
    s.outputs_ = static_cast<int>(C.rows());
    s.inputs_ = static_cast<int>(B.cols());
    s.rep_ = StateSpaceForm{A, B, C, D};
    return s;
}

LinearSystem LinearSystem::from_state_space(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                            const Eigen::MatrixXd& C) {
    if (C.rows() != B.cols())
        throw DimensionError("identity feedthrough needs outputs == inputs; pass D explicitly");
    return from_state_space(A, B, C, Eigen::MatrixXd::Identity(C.rows(), B.cols()));
}

LinearSystem LinearSystem::from_markov(std::vector<Eigen::MatrixXd> terms, double decay_bound) {
    if (terms.empty()) throw DimensionError("Markov sequence must be nonempty");
    const auto r = terms[0].rows();
    const auto c = terms[0].cols();
    for (const auto& t : terms)
        if (t.rows() != r || t.cols() != c) throw DimensionError("Markov terms must share one shape");
    if (terms.back().norm() > decay_bound + 1e-300)
        throw DomainError("final Markov term exceeds the declared decay bound");
    LinearSystem s;
    s.outputs_ = static_cast<int>(r);
    s.inputs_ = static_cast<int>(c);
    s.rep_ = MarkovForm{std::move(terms), decay_bound};
    return s;
}

Eigen::MatrixXcd LinearSystem::transfer(Complex z) const {
    if (const auto* f = arma()) {
        const Eigen::MatrixXcd az = f->A.evaluate(z);
        const Eigen::MatrixXcd bz = f->B.evaluate(z);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(az);
        const Eigen::MatrixXcd h = lu.solve(bz);
        if (!h.allFinite() || (az * h - bz).norm() > 1e-8 * std::max(1.0, bz.norm()))
            throw EvaluationError("AR polynomial is numerically singular at the evaluation point");
        return h;
    }
    if (const auto* f = state_space()) {
        const auto n = f->A.rows();
        const Eigen::MatrixXcd res =
            (Eigen::MatrixXcd::Identity(n, n) * z - f->A.cast<Complex>());
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(res);
        const Eigen::MatrixXcd x = lu.solve(f->B.cast<Complex>());
        if (!x.allFinite()) throw EvaluationError("resolvent pole at the evaluation point");
        return f->C.cast<Complex>() * x + f->D.cast<Complex>();
    }
    const auto* f = markov_form();
    if (z == Complex(0.0, 0.0)) throw DomainError("evaluation pole at origin");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(outputs_, inputs_);
    const Complex w = Complex(1.0, 0.0) / z;
    for (int k = static_cast<int>(f->terms.size()) - 1; k >= 0; --k)
        acc = acc * w + f->terms[static_cast<size_t>(k)];
    return acc;
}

MarkovSequence LinearSystem::markov(int count) const {
    if (count < 0) throw DomainError("Markov term count must be nonnegative");
    std::vector<Eigen::MatrixXd> h;
    h.reserve(static_cast<size_t>(count) + 1);

    if (const auto* f = arma()) {
        const int p = f->A.degree();
        const int q = f->B.degree();
        // Monic recursion: H_i = B_i - sum_{j=1..min(i,p)} A_j H_{i-j}.
        for (int i = 0; i <= count; ++i) {
            Eigen::MatrixXd hi = (i <= q) ? f->B.coeff(i) : Eigen::MatrixXd::Zero(outputs_, inputs_);
            for (int j = 1; j <= std::min(i, p); ++j)
                hi -= f->A.coeff(j) * h[static_cast<size_t>(i - j)];
            h.push_back(std::move(hi));
        }
    } else if (const auto* f = state_space()) {
        h.push_back(f->D);
        Eigen::MatrixXd power = f->B;  // A^{i-1} B
        for (int i = 1; i <= count; ++i) {
            h.push_back(f->C * power);
            power = f->A * power;
        }
    } else {
        const auto* f = markov_form();
        for (int i = 0; i <= count; ++i)
            h.push_back(i < static_cast<int>(f->terms.size())
                            ? f->terms[static_cast<size_t>(i)]
                            : Eigen::MatrixXd::Zero(outputs_, inputs_));
    }

    std::vector<double> norms;
    norms.reserve(h.size());
    for (const auto& m : h) norms.push_back(m.norm());
    const TailFit fit = fit_geometric_tail(norms);
    return {std::move(h), fit.rho, fit.tail_bound};
}

MarkovSequence LinearSystem::markov_adaptive() const {
    const StabilityReport st = stability();
    if (!st.stable)
        throw DivergenceError("adaptive Markov expansion requested on an unstable system (radius " +
                              std::to_string(st.spectral_radius) + ")");

    int n = 64;
    while (true) {
        MarkovSequence seq = markov(n);
        double partial = 0.0;
        for (const auto& m : seq.terms) partial += m.squaredNorm();
        partial = std::sqrt(partial);
        if (seq.tail_bound <= kTailRelTol * std::max(partial, 1e-300) || n >= kTailCap) return seq;
        n = std::min(2 * n, kTailCap);
    }
}

StabilityReport LinearSystem::stability(double margin) const {
    double radius = 0.0;
    if (const auto* f = arma()) {
        radius = arma_pole_radius(*f);
    } else if (const auto* f = state_space()) {
        radius = (f->A.rows() == 0) ? 0.0 : f->A.eigenvalues().cwiseAbs().maxCoeff();
    } else {
        radius = 0.0;  // finite sequences are polynomial in z^-1: poles only at the origin
    }
    StabilityReport rep;
    rep.spectral_radius = radius;
    rep.marginal = std::abs(radius - 1.0) < margin;
    rep.stable = radius < 1.0 - margin;
    return rep;
}

double inner_product(const LinearSystem& s1, const LinearSystem& s2, InnerProductMethod method,
                     const QuadratureOptions& opt) {
    if (s1.outputs() != s2.outputs() || s1.inputs() != s2.inputs())
        throw DimensionError("inner product operands must share (outputs, inputs)");
    if (!s1.stability().stable || !s2.stability().stable)
        throw DivergenceError("inner product requires stable operands");

    if (method == InnerProductMethod::Time) {
        const MarkovSequence m1 = s1.markov_adaptive();
        const MarkovSequence m2 = s2.markov_adaptive();
        const size_t n = std::max(m1.terms.size(), m2.terms.size());
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (i >= m1.terms.size() || i >= m2.terms.size()) break;
            acc += (m1.terms[i].array() * m2.terms[i].array()).sum();
        }
        return acc;
    }

    auto f = [&s1, &s2](Complex z) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = (s1.transfer(z) * s2.transfer(std::conj(z)).transpose()).trace();
        return m;
    };
    return circle_average(f, opt).value(0, 0).real();
}

double system_norm(const LinearSystem& s, InnerProductMethod method) {
    return std::sqrt(std::max(0.0, inner_product(s, s, method)));
}

double system_distance(const LinearSystem& s1, const LinearSystem& s2) {
    if (s1.outputs() != s2.outputs() || s1.inputs() != s2.inputs())
        throw DimensionError("distance operands must share (outputs, inputs)");
    const MarkovSequence m1 = s1.markov_adaptive();
    const MarkovSequence m2 = s2.markov_adaptive();
    const size_t n = std::max(m1.terms.size(), m2.terms.size());
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Eigen::MatrixXd a = i < m1.terms.size()
                                      ? m1.terms[i]
                                      : Eigen::MatrixXd::Zero(s1.outputs(), s1.inputs());
        const Eigen::MatrixXd b = i < m2.terms.size()
                                      ? m2.terms[i]
                                      : Eigen::MatrixXd::Zero(s2.outputs(), s2.inputs());
        acc += (a - b).squaredNorm();
    }
    return std::sqrt(acc);
}

}  // namespace sysgeom
