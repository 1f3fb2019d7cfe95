#include "sysgeom/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sysgeom {

namespace {

constexpr double kComplexStepH = 1e-30;

Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamLayout defaults
// ---------------------------------------------------------------------------

Eigen::MatrixXcd ParamLayout::transfer(Complex z) const { return system().transfer(z); }

void ParamLayout::tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const {
    out.resize(static_cast<size_t>(dim()));
    for (int i = 0; i < dim(); ++i) out[static_cast<size_t>(i)] = tangent(i, z);
}

std::vector<Eigen::MatrixXd> ParamLayout::markov_derivative_cstep(int i, int count) const {
    Eigen::VectorXcd th = theta().cast<Complex>();
    th(i) += Complex(0.0, kComplexStepH);
    const std::vector<Eigen::MatrixXcd> seq = markov_complex(th, count);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(seq.size());
    for (const auto& h : seq) out.push_back(h.imag() / kComplexStepH);
    return out;
}

// ---------------------------------------------------------------------------
// ArmaFullLayout
// ---------------------------------------------------------------------------

ArmaFullLayout::ArmaFullLayout(const LinearSystem& s) : s_(s) {
    const ArmaForm* f = s_.arma();
    if (f == nullptr) throw DimensionError("full ARMA layout needs an ARMA-pair system");
    if (s_.outputs() != s_.inputs())
        throw DimensionError("full ARMA layout needs a square system");
    m_ = s_.outputs();
    p_ = std::max(f->A.degree(), f->B.degree());
    if (p_ < 1) throw DomainError("constant pair has no lag coordinates");
}

ArmaFullLayout::Slot ArmaFullLayout::slot(int i) const {
    if (i < 0 || i >= dim()) throw DomainError("coordinate index out of range");
    const int block = m_ * m_;
    const bool ma = i >= p_ * block;
    int r = ma ? i - p_ * block : i;
    const int lag = r / block + 1;
    r %= block;
    return {ma, lag, r / m_, r % m_};
}

std::string ArmaFullLayout::label(int i) const {
    const Slot s = slot(i);
    return std::string(s.ma ? "B" : "A") + std::to_string(s.lag) + "[" + std::to_string(s.row + 1) +
           "," + std::to_string(s.col + 1) + "]";
}

Eigen::VectorXd ArmaFullLayout::theta() const {
    const ArmaForm* f = s_.arma();
    Eigen::VectorXd th(dim());
    for (int i = 0; i < dim(); ++i) {
        const Slot s = slot(i);
        const Eigen::MatrixXd c = (s.ma ? f->B : f->A).coeff_or_zero(s.lag);
        th(i) = c(s.row, s.col);
    }
    return th;
}

LinearSystem ArmaFullLayout::rebuild(const Eigen::VectorXd& theta) const {
    if (theta.size() != dim()) throw DimensionError("coordinate vector of wrong length");
    std::vector<Eigen::MatrixXd> a(static_cast<size_t>(p_) + 1, Eigen::MatrixXd::Zero(m_, m_));
    std::vector<Eigen::MatrixXd> b = a;
    a[0] = Eigen::MatrixXd::Identity(m_, m_);
    b[0] = s_.arma()->B.coeff(0);  // constant MA term is not a coordinate
    for (int i = 0; i < dim(); ++i) {
        const Slot s = slot(i);
        (s.ma ? b : a)[static_cast<size_t>(s.lag)](s.row, s.col) = theta(i);
    }
    return LinearSystem::from_arma(PolynomialMatrix(std::move(a)), PolynomialMatrix(std::move(b)));
}

void ArmaFullLayout::tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const {
    const ArmaForm* f = s_.arma();
    const Eigen::MatrixXcd az = f->A.evaluate(z);
    const Eigen::MatrixXcd ainv = az.inverse();
    const Eigen::MatrixXcd h = ainv * f->B.evaluate(z);
    if (!ainv.allFinite()) throw EvaluationError("AR polynomial singular on the contour");

    out.resize(static_cast<size_t>(dim()));
    const Complex w = Complex(1.0, 0.0) / z;
    for (int i = 0; i < dim(); ++i) {
        const Slot s = slot(i);
        const Complex zlag = std::pow(w, static_cast<double>(s.lag));
        // dH = A^-1 (dB - dA H); with single-entry indicators both cases are
        // rank one in the columns of A^-1.
        if (s.ma)
            out[static_cast<size_t>(i)] = (zlag * ainv.col(s.row)) * Eigen::RowVectorXcd::Unit(m_, s.col);
        else
            out[static_cast<size_t>(i)] = (-zlag * ainv.col(s.row)) * h.row(s.col);
    }
}

Eigen::MatrixXcd ArmaFullLayout::tangent(int i, Complex z) const {
    std::vector<Eigen::MatrixXcd> all;
    tangents(z, all);
    return all[static_cast<size_t>(i)];
}

std::vector<Eigen::MatrixXd> ArmaFullLayout::markov_derivative(int i, int count) const {
    const ArmaForm* f = s_.arma();
    const Slot sl = slot(i);
    const MarkovSequence base = s_.markov(count);
    std::vector<Eigen::MatrixXd> dh(static_cast<size_t>(count) + 1, Eigen::MatrixXd::Zero(m_, m_));
    for (int l = 1; l <= count; ++l) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m_, m_);
        if (sl.ma) {
            if (l == sl.lag) acc(sl.row, sl.col) += 1.0;
        } else if (l >= sl.lag) {
            acc.row(sl.row) -= base.terms[static_cast<size_t>(l - sl.lag)].row(sl.col);
        }
        for (int j = 1; j <= std::min(l, f->A.degree()); ++j)
            acc -= f->A.coeff(j) * dh[static_cast<size_t>(l - j)];
        dh[static_cast<size_t>(l)] = acc;
    }
    return dh;
}

std::vector<Eigen::MatrixXcd> ArmaFullLayout::markov_complex(const Eigen::VectorXcd& theta,
                                                             int count) const {
    std::vector<Eigen::MatrixXcd> a(static_cast<size_t>(p_) + 1, Eigen::MatrixXcd::Zero(m_, m_));
    std::vector<Eigen::MatrixXcd> b = a;
    a[0] = Eigen::MatrixXcd::Identity(m_, m_);
    b[0] = s_.arma()->B.coeff(0).cast<Complex>();
    for (int i = 0; i < dim(); ++i) {
        const Slot s = slot(i);
        (s.ma ? b : a)[static_cast<size_t>(s.lag)](s.row, s.col) = theta(i);
    }
    std::vector<Eigen::MatrixXcd> h;
    h.reserve(static_cast<size_t>(count) + 1);
    for (int l = 0; l <= count; ++l) {
        Eigen::MatrixXcd hl = (l <= p_) ? b[static_cast<size_t>(l)] : Eigen::MatrixXcd::Zero(m_, m_);
        for (int j = 1; j <= std::min(l, p_); ++j) hl -= a[static_cast<size_t>(j)] * h[static_cast<size_t>(l - j)];
        h.push_back(std::move(hl));
    }
    return h;
}

// ---------------------------------------------------------------------------
// SsChartLayout
// ---------------------------------------------------------------------------

SsChartLayout::SsChartLayout(const ChartCoordinates& c)
    : SsChartLayout(c, Eigen::MatrixXd::Identity(c.chart.m, c.chart.m)) {}

SsChartLayout::SsChartLayout(const ChartCoordinates& c, const Eigen::MatrixXd& D)
    : c_(c),
      D_(D),
      ss_(chart_state_space(c, D)),
      s_(LinearSystem::from_state_space(ss_.A, ss_.B, ss_.C, ss_.D)) {}

std::pair<int, int> SsChartLayout::alpha_slot(int i) const {
    const int n = c_.chart.n();
    const int channel = i / n + 1;
    const int state = i % n;
    const int ni = c_.chart.indices[static_cast<size_t>(channel - 1)];
    if (ni == 0) return {-1, state};
    return {c_.chart.block_offset(channel) + ni - 1, state};
}

std::string SsChartLayout::label(int i) const {
    const int n = c_.chart.n();
    const int m = c_.chart.m;
    if (i < n * m) {
        const int channel = i / n + 1;
        const int state = i % n;
        // Recover (j, k) from the state position.
        int j = 1;
        while (c_.chart.block_offset(j + 1) <= state && j < m) ++j;
        const int k = state - c_.chart.block_offset(j) + 1;
        return "alpha[" + std::to_string(channel) + "," + std::to_string(j) + "," +
               std::to_string(k) + "]";
    }
    const int r = (i - n * m) / m;
    const int cc = (i - n * m) % m;
    return "K[" + std::to_string(r + 1) + "," + std::to_string(cc + 1) + "]";
}

LinearSystem SsChartLayout::rebuild(const Eigen::VectorXd& theta) const {
    const ChartCoordinates c = ChartCoordinates::from_theta(c_.chart, theta);
    const StateSpaceForm f = chart_state_space(c, D_);
    return LinearSystem::from_state_space(f.A, f.B, f.C, f.D);
}

void SsChartLayout::tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const {
    const int n = c_.chart.n();
    const int m = c_.chart.m;
    const Eigen::MatrixXcd res =
        Eigen::MatrixXcd::Identity(n, n) * z - ss_.A.cast<Complex>();
    const Eigen::MatrixXcd rinv = res.inverse();
    if (!rinv.allFinite()) throw EvaluationError("resolvent pole on the contour");
    const Eigen::MatrixXcd cr = ss_.C.cast<Complex>() * rinv;  // m x n
    const Eigen::MatrixXcd rb = rinv * ss_.B.cast<Complex>();  // n x m

    out.resize(static_cast<size_t>(dim()));
    for (int i = 0; i < n * m; ++i) {
        const auto [row, col] = alpha_slot(i);
        if (row < 0)
            out[static_cast<size_t>(i)] = Eigen::MatrixXcd::Zero(m, m);
        else
            out[static_cast<size_t>(i)] = cr.col(row) * rb.row(col);
    }
    for (int i = n * m; i < dim(); ++i) {
        const int r = (i - n * m) / m;
        const int cc = (i - n * m) % m;
        out[static_cast<size_t>(i)] = cr.col(r) * Eigen::RowVectorXcd::Unit(m, cc);
    }
}

Eigen::MatrixXcd SsChartLayout::tangent(int i, Complex z) const {
    std::vector<Eigen::MatrixXcd> all;
    tangents(z, all);
    return all[static_cast<size_t>(i)];
}

std::vector<Eigen::MatrixXd> SsChartLayout::markov_derivative(int i, int count) const {
    const int n = c_.chart.n();
    const int m = c_.chart.m;
    std::vector<Eigen::MatrixXd> dh(static_cast<size_t>(count) + 1, Eigen::MatrixXd::Zero(m, m));
    if (i < n * m) {
        const auto [row, col] = alpha_slot(i);
        if (row < 0) return dh;
        Eigen::MatrixXd da = Eigen::MatrixXd::Zero(n, n);
        da(row, col) = 1.0;
        // dP_l = d(A^{l-1}): dP_1 = 0, dP_{l+1} = dA A^{l-1} + A dP_l.
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd dpower = Eigen::MatrixXd::Zero(n, n);
        for (int l = 1; l <= count; ++l) {
            dh[static_cast<size_t>(l)] = ss_.C * dpower * ss_.B;
            dpower = da * power + ss_.A * dpower;
            power = ss_.A * power;
        }
        return dh;
    }
    const int r = (i - n * m) / m;
    const int cc = (i - n * m) % m;
    Eigen::MatrixXd cpow = ss_.C;  // C A^{l-1}
    for (int l = 1; l <= count; ++l) {
        dh[static_cast<size_t>(l)].col(cc) = cpow.col(r);
        cpow = cpow * ss_.A;
    }
    return dh;
}

std::vector<Eigen::MatrixXcd> SsChartLayout::markov_complex(const Eigen::VectorXcd& theta,
                                                            int count) const {
    const int n = c_.chart.n();
    const int m = c_.chart.m;
    // Complex-parameter copies of the chart realization.
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd K(n, m);
    for (int j = 1; j <= m; ++j) {
        const int nj = c_.chart.indices[static_cast<size_t>(j - 1)];
        if (nj == 0) continue;
        const int off = c_.chart.block_offset(j);
        for (int k = 1; k < nj; ++k) A(off + k - 1, off + k) = 1.0;
        for (int s = 0; s < n; ++s) A(off + nj - 1, s) = theta((j - 1) * n + s);
    }
    for (int r = 0; r < n; ++r)
        for (int cc = 0; cc < m; ++cc) K(r, cc) = theta(n * m + r * m + cc);

    std::vector<Eigen::MatrixXcd> h;
    h.reserve(static_cast<size_t>(count) + 1);
    h.push_back(D_.cast<Complex>());
    Eigen::MatrixXcd power = K;
    const Eigen::MatrixXcd C = ss_.C.cast<Complex>();
    for (int l = 1; l <= count; ++l) {
        h.push_back(C * power);
        power = A * power;
    }
    return h;
}

// ---------------------------------------------------------------------------
// ArmaChartLayout
// ---------------------------------------------------------------------------

ArmaChartLayout::ArmaChartLayout(const ChartCoordinates& c)
    : c_(c), zf_(chart_arma_zform(c)), ss_(c) {}

std::string ArmaChartLayout::label(int i) const { return ss_.label(i); }

LinearSystem ArmaChartLayout::rebuild(const Eigen::VectorXd& theta) const {
    return ss_.rebuild(theta);
}

Eigen::MatrixXcd ArmaChartLayout::transfer(Complex z) const {
    return chart_transfer_arma(c_, z);
}

void ArmaChartLayout::tangents(Complex z, std::vector<Eigen::MatrixXcd>& out) const {
    const int n = c_.chart.n();
    const int m = c_.chart.m;
    const Eigen::MatrixXcd az = zf_.eval_A(z);
    const Eigen::MatrixXcd ainv = az.inverse();
    if (!ainv.allFinite()) throw EvaluationError("AR form singular on the contour");
    const Eigen::MatrixXcd mz = zf_.eval_M(z);
    const Eigen::MatrixXcd h = ainv * zf_.eval_B(z);
    const Eigen::MatrixXcd am = ainv * mz;  // m x n
    const Eigen::MatrixXcd ih = Eigen::MatrixXcd::Identity(m, m) - h;

    out.resize(static_cast<size_t>(dim()));
    for (int i = 0; i < n * m; ++i) {
        const int channel = i / n + 1;  // row of dA / dM
        const int state = i % n;
        int j = 1;
        while (j < m && c_.chart.block_offset(j + 1) <= state) ++j;
        const int k = state - c_.chart.block_offset(j) + 1;

        // dB = dA + dM K with dA = -z^{k-1} E_{channel,j} and dM supported on
        // the channel row at orders below k; everything is rank one.
        Eigen::RowVectorXcd w = Eigen::RowVectorXcd::Zero(m);
        for (int kk = 1; kk < k; ++kk)
            w -= std::pow(z, static_cast<double>(k - 1 - kk)) *
                 c_.K.row(c_.chart.state_position(j, kk)).cast<Complex>();
        w -= std::pow(z, static_cast<double>(k - 1)) * ih.row(j - 1);
        out[static_cast<size_t>(i)] = ainv.col(channel - 1) * w;
    }
    for (int i = n * m; i < dim(); ++i) {
        const int r = (i - n * m) / m;
        const int cc = (i - n * m) % m;
        out[static_cast<size_t>(i)] = am.col(r) * Eigen::RowVectorXcd::Unit(m, cc);
    }
}

Eigen::MatrixXcd ArmaChartLayout::tangent(int i, Complex z) const {
    std::vector<Eigen::MatrixXcd> all;
    tangents(z, all);
    return all[static_cast<size_t>(i)];
}

std::vector<Eigen::MatrixXd> ArmaChartLayout::markov_derivative(int i, int count) const {
    return ss_.markov_derivative(i, count);
}

std::vector<Eigen::MatrixXcd> ArmaChartLayout::markov_complex(const Eigen::VectorXcd& theta,
                                                              int count) const {
    return ss_.markov_complex(theta, count);
}

// ---------------------------------------------------------------------------
// Free derivative operations
// ---------------------------------------------------------------------------

Eigen::MatrixXcd transfer_derivative_arma(const LinearSystem& s, int theta_index, Complex z) {
    return ArmaFullLayout(s).tangent(theta_index, z);
}

Eigen::MatrixXcd transfer_derivative_ss(const ChartCoordinates& c, int theta_index, Complex z) {
    return SsChartLayout(c).tangent(theta_index, z);
}

Eigen::MatrixXcd transfer_derivative_numeric(const ParamLayout& layout, int theta_index, Complex z,
                                             DerivScheme scheme) {
    if (theta_index < 0 || theta_index >= layout.dim())
        throw DomainError("coordinate index out of range");
    if (scheme == DerivScheme::Central) {
        Eigen::VectorXd th = layout.theta();
        const double h = 1e-6 * std::max(1.0, std::abs(th(theta_index)));
        Eigen::VectorXd tp = th, tm = th;
        tp(theta_index) += h;
        tm(theta_index) -= h;
        return (layout.rebuild(tp).transfer(z) - layout.rebuild(tm).transfer(z)) / (2.0 * h);
    }
    // Complex step through the Markov map, summed into the transform with the
    // base system's certified truncation length.
    const int count = layout.system().markov_adaptive().length();
    const std::vector<Eigen::MatrixXd> dh = layout.markov_derivative_cstep(theta_index, count);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(layout.outputs(), layout.outputs());
    const Complex w = Complex(1.0, 0.0) / z;
    for (int l = count; l >= 0; --l) acc = acc * w + dh[static_cast<size_t>(l)];
    return acc;
}

// ---------------------------------------------------------------------------
// Tensor assembly
// ---------------------------------------------------------------------------

MetricTensor finalize_tensor(const Eigen::MatrixXcd& gram, std::vector<std::string> labels,
                             std::string mode, int nodes, double delta, int truncation) {
    const Eigen::MatrixXd re = gram.real();
    MetricTensor t;
    t.entries = 0.5 * (re + re.transpose());
    t.labels = std::move(labels);
    t.mode = std::move(mode);
    t.nodes = nodes;
    t.quad_delta = delta;
    t.truncation = truncation;
    t.asymmetry = (re - re.transpose()).cwiseAbs().maxCoeff();
    t.imag_residual = gram.imag().cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t.entries);
    t.min_eigenvalue = eig.eigenvalues().minCoeff();
    return t;
}

MetricTensor metric_tensor(const ParamLayout& layout, DerivKind kind, const TensorOptions& opt) {
    const StabilityReport st = layout.system().stability(opt.stability_margin);
    if (!st.stable)
        throw DivergenceError("metric tensor requires stability margin " +
                              std::to_string(opt.stability_margin) + " (radius " +
                              std::to_string(st.spectral_radius) + ")");

    const int d = layout.dim();
    const int m = layout.outputs();
    std::vector<std::string> labels;
    labels.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) labels.push_back(layout.label(i));

    std::function<Eigen::MatrixXcd(Complex)> gram_at;
    std::vector<LinearSystem> plus, minus;
    std::vector<double> steps;

    if (kind == DerivKind::Analytic) {
        gram_at = [&layout, d, m](Complex z) {
            std::vector<Eigen::MatrixXcd> tg;
            layout.tangents(z, tg);
            Eigen::MatrixXcd v(d, m * m);
            for (int i = 0; i < d; ++i) v.row(i) = vec(tg[static_cast<size_t>(i)]).transpose();
            return Eigen::MatrixXcd(v * v.adjoint());
        };
    } else {
        const Eigen::VectorXd th = layout.theta();
        plus.reserve(static_cast<size_t>(d));
        minus.reserve(static_cast<size_t>(d));
        steps.reserve(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(th(i)));
            Eigen::VectorXd tp = th, tm = th;
            tp(i) += h;
            tm(i) -= h;
            plus.push_back(layout.rebuild(tp));
            minus.push_back(layout.rebuild(tm));
            steps.push_back(h);
        }
        gram_at = [&plus, &minus, &steps, d, m](Complex z) {
            Eigen::MatrixXcd v(d, m * m);
            for (int i = 0; i < d; ++i) {
                const Eigen::MatrixXcd dh =
                    (plus[static_cast<size_t>(i)].transfer(z) -
                     minus[static_cast<size_t>(i)].transfer(z)) /
                    (2.0 * steps[static_cast<size_t>(i)]);
                v.row(i) = vec(dh).transpose();
            }
            return Eigen::MatrixXcd(v * v.adjoint());
        };
    }

    const QuadratureResult q = circle_average(gram_at, opt.quadrature);
    return finalize_tensor(q.value, std::move(labels),
                           kind == DerivKind::Analytic ? "analytic" : "numeric", q.nodes, q.delta,
                           0);
}

}  // namespace sysgeom
