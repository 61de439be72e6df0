#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiretap/numerics.hpp"

namespace wiretap {

inline constexpr double kMassTol = 1e-9;

/// Probability mass function over a finite alphabet {0, ..., size-1}.
class FiniteDist {
  public:
    explicit FiniteDist(std::vector<double> masses) : m_(std::move(masses)) {
        double sum = 0.0;
        for (size_t i = 0; i < m_.size(); ++i) {
            if (m_[i] < 0.0)
                throw std::domain_error("FiniteDist: negative mass at index " + std::to_string(i));
            sum += m_[i];
        }
        if (std::abs(sum - 1.0) > kMassTol)
            throw std::domain_error("FiniteDist: total mass " + std::to_string(sum) +
                                    " (defect " + std::to_string(sum - 1.0) + ")");
    }

    static FiniteDist uniform(size_t n) {
        return FiniteDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }
    static FiniteDist point_mass(size_t n, size_t at) {
        std::vector<double> m(n, 0.0);
        m.at(at) = 1.0;
        return FiniteDist(std::move(m));
    }
    static FiniteDist normalized(std::vector<double> weights) {
        double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
        if (sum <= 0.0) throw std::domain_error("FiniteDist: nonpositive total weight");
        for (double& w : weights) w /= sum;
        return FiniteDist(std::move(weights));
    }

    size_t size() const { return m_.size(); }
    double operator[](size_t i) const { return m_[i]; }
    std::span<const double> masses() const { return m_; }

  private:
    std::vector<double> m_;
};

/// Row-stochastic transition matrix: one output distribution per input symbol.
class DiscreteChannel {
  public:
    DiscreteChannel(std::vector<std::vector<double>> rows) {
        if (rows.empty()) throw std::domain_error("DiscreteChannel: no rows");
        out_ = rows[0].size();
        for (size_t x = 0; x < rows.size(); ++x) {
            if (rows[x].size() != out_)
                throw std::domain_error("DiscreteChannel: ragged row " + std::to_string(x));
            rows_.emplace_back(validated_row(std::move(rows[x]), x));
        }
    }

    static DiscreteChannel bsc(double p) {
        return DiscreteChannel({{1.0 - p, p}, {p, 1.0 - p}});
    }
    static DiscreteChannel identity(size_t n) {
        std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
        for (size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
        return DiscreteChannel(std::move(rows));
    }

    size_t input_size() const { return rows_.size(); }
    size_t output_size() const { return out_; }
    const FiniteDist& row(size_t x) const { return rows_[x]; }
    double operator()(size_t z, size_t x) const { return rows_[x][z]; }

    /// Output marginal induced by an input distribution.
    FiniteDist apply(const FiniteDist& p_in) const {
        if (p_in.size() != input_size())
            throw std::domain_error("DiscreteChannel::apply: input alphabet mismatch");
        std::vector<double> out(out_, 0.0);
        for (size_t x = 0; x < input_size(); ++x)
            for (size_t z = 0; z < out_; ++z) out[z] += p_in[x] * rows_[x][z];
        return FiniteDist(std::move(out));
    }

    /// Output marginal of the uniform mixture of rows.
    FiniteDist uniform_output() const { return apply(FiniteDist::uniform(input_size())); }

  private:
    static FiniteDist validated_row(std::vector<double> r, size_t x) {
        try {
            return FiniteDist(std::move(r));
        } catch (const std::domain_error& e) {
            throw std::domain_error("DiscreteChannel row " + std::to_string(x) + ": " + e.what());
        }
    }
    std::vector<FiniteDist> rows_;
    size_t out_;
};

/// Joint pmf over a product alphabet, stored row-major (x, z).
class JointDist {
  public:
    JointDist(std::vector<double> masses, size_t rows, size_t cols)
        : m_(std::move(masses)), rows_(rows), cols_(cols) {
        if (m_.size() != rows_ * cols_) throw std::domain_error("JointDist: shape mismatch");
        double sum = 0.0;
        for (double v : m_) {
            if (v < 0.0) throw std::domain_error("JointDist: negative mass");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kMassTol)
            throw std::domain_error("JointDist: total mass " + std::to_string(sum));
    }

    static JointDist from_input_and_channel(const FiniteDist& p_in, const DiscreteChannel& ch) {
        if (p_in.size() != ch.input_size())
            throw std::domain_error("JointDist: input alphabet mismatch");
        std::vector<double> m(ch.input_size() * ch.output_size());
        for (size_t x = 0; x < ch.input_size(); ++x)
            for (size_t z = 0; z < ch.output_size(); ++z)
                m[x * ch.output_size() + z] = p_in[x] * ch(z, x);
        return JointDist(std::move(m), ch.input_size(), ch.output_size());
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    double at(size_t x, size_t z) const { return m_[x * cols_ + z]; }
    std::span<const double> flat() const { return m_; }

    FiniteDist row_marginal() const {
        std::vector<double> p(rows_, 0.0);
        for (size_t x = 0; x < rows_; ++x)
            for (size_t z = 0; z < cols_; ++z) p[x] += at(x, z);
        return FiniteDist(std::move(p));
    }
    FiniteDist col_marginal() const {
        std::vector<double> p(cols_, 0.0);
        for (size_t x = 0; x < rows_; ++x)
            for (size_t z = 0; z < cols_; ++z) p[z] += at(x, z);
        return FiniteDist(std::move(p));
    }

    /// Conditional column distribution given that the row index lies in `rows`.
    FiniteDist col_conditional_on_rows(std::span<const size_t> rows) const {
        std::vector<double> p(cols_, 0.0);
        for (size_t x : rows)
            for (size_t z = 0; z < cols_; ++z) p[z] += at(x, z);
        return FiniteDist::normalized(std::move(p));
    }

  private:
    std::vector<double> m_;
    size_t rows_, cols_;
};

namespace detail {

inline double total_variation_span(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::domain_error("total_variation: alphabet mismatch");
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

// E_gamma(P,Q) = sum over the threshold set {dP/dQ >= gamma} of (P - gamma Q).
// P-mass on Q-null atoms has ratio +infinity and is always inside the set.
inline double e_gamma_span(std::span<const double> p, std::span<const double> q, double gamma) {
    if (p.size() != q.size()) throw std::domain_error("e_gamma: shape mismatch");
    if (!(gamma > 0.0)) throw std::domain_error("e_gamma: gamma must be positive");
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (q[i] == 0.0) {
            s += p[i];
        } else if (p[i] >= gamma * q[i]) {
            s += p[i] - gamma * q[i];
        }
    }
    return s;
}

}  // namespace detail

inline double total_variation(const FiniteDist& p, const FiniteDist& q) {
    return detail::total_variation_span(p.masses(), q.masses());
}
inline double total_variation(const JointDist& p, const JointDist& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols())
        throw std::domain_error("total_variation: shape mismatch");
    return detail::total_variation_span(p.flat(), q.flat());
}

inline double e_gamma(const FiniteDist& p, const FiniteDist& q, double gamma) {
    return detail::e_gamma_span(p.masses(), q.masses(), gamma);
}
inline double e_gamma(const JointDist& p, const JointDist& q, double gamma) {
    if (p.rows() != q.rows() || p.cols() != q.cols())
        throw std::domain_error("e_gamma: shape mismatch");
    return detail::e_gamma_span(p.flat(), q.flat(), gamma);
}

/// Outcome of the exact Neyman-Pearson optimization.
struct BetaResult {
    double beta;            // attained Q-mass of the optimal test
    double log_beta;        // same value in natural log (usable when beta underflows)
    double log_threshold;   // log likelihood ratio of the boundary atom group
    double randomization;   // acceptance weight on the boundary group, in [0,1]
};

/// Exact NP optimum from atom masses given in natural log. Atoms are sorted by
/// likelihood ratio (descending, ties grouped) and included until the P-mass
/// reaches alpha, randomizing on the boundary group.
inline BetaResult np_beta_log(std::span<const double> ln_p, std::span<const double> ln_q,
                              double alpha) {
    if (ln_p.size() != ln_q.size()) throw std::domain_error("np_beta: shape mismatch");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("np_beta: alpha " + std::to_string(alpha) + " outside (0,1]");

    struct Atom {
        double ratio;  // ln p - ln q; +inf on Q-null atoms carrying P-mass
        double lp, lq;
    };
    std::vector<Atom> atoms;
    atoms.reserve(ln_p.size());
    for (size_t i = 0; i < ln_p.size(); ++i) {
        double lp = ln_p[i], lq = ln_q[i];
        if (lp == kNegInf && lq == kNegInf) continue;  // carries no mass under either
        double r = lp == kNegInf ? kNegInf : (lq == kNegInf ? kInf : lp - lq);
        atoms.push_back({r, lp, lq});
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.ratio > b.ratio; });

    LogAccumulator beta_acc;
    double cum_p = 0.0;
    double threshold = kNegInf;
    double randomization = 1.0;
    size_t i = 0;
    while (i < atoms.size()) {
        size_t j = i;
        double group_p = 0.0;
        LogAccumulator group_q;
        while (j < atoms.size() && atoms[j].ratio == atoms[i].ratio) {
            group_p += std::exp(atoms[j].lp);
            group_q.add(atoms[j].lq);
            ++j;
        }
        threshold = atoms[i].ratio;
        if (cum_p + group_p >= alpha - 1e-12 && group_p > 0.0) {
            double theta = std::clamp((alpha - cum_p) / group_p, 0.0, 1.0);
            randomization = theta;
            if (theta > 0.0 && group_q.log_total() != kNegInf)
                beta_acc.add(std::log(theta) + group_q.log_total());
            break;
        }
        cum_p += group_p;
        beta_acc.add(group_q.log_total());
        i = j;
    }
    double lb = beta_acc.log_total();
    return {std::exp(lb), lb, threshold, randomization};
}

namespace detail {

inline std::vector<double> to_log(std::span<const double> linear) {
    std::vector<double> out(linear.size());
    for (size_t i = 0; i < linear.size(); ++i)
        out[i] = linear[i] > 0.0 ? std::log(linear[i]) : kNegInf;
    return out;
}

}  // namespace detail

inline BetaResult np_beta(double alpha, const FiniteDist& p, const FiniteDist& q) {
    if (p.size() != q.size()) throw std::domain_error("np_beta: alphabet mismatch");
    return np_beta_log(detail::to_log(p.masses()), detail::to_log(q.masses()), alpha);
}
inline BetaResult np_beta(double alpha, const JointDist& p, const JointDist& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols())
        throw std::domain_error("np_beta: shape mismatch");
    return np_beta_log(detail::to_log(p.flat()), detail::to_log(q.flat()), alpha);
}

enum class DensityMode {
    kSourceKey,  // i(x;z) = ln[P_in(x) ch(z|x)] - ln[(1/|X|) Q_out(z)]
    kChannel,    // i(x;y) = ln ch(y|x) - ln Q_out(y)
};

/// Matrix of per-atom information densities in nats. Zero numerator over a
/// positive reference gives -inf; positive numerator over a zero reference
/// gives +inf; atoms null under both measures are marked absent (NaN).
struct DensityTable {
    std::vector<double> values;  // row-major (x, z)
    size_t rows, cols;
    double at(size_t x, size_t z) const { return values[x * cols + z]; }
};

inline DensityTable info_density_table(const FiniteDist& p_in, const DiscreteChannel& ch,
                                       const FiniteDist& q_out,
                                       DensityMode mode = DensityMode::kSourceKey) {
    if (p_in.size() != ch.input_size() || q_out.size() != ch.output_size())
        throw std::domain_error("info_density_table: shape mismatch");
    const size_t nx = ch.input_size(), nz = ch.output_size();
    DensityTable t{std::vector<double>(nx * nz), nx, nz};
    const double ln_inv_x = -std::log(static_cast<double>(nx));
    for (size_t x = 0; x < nx; ++x) {
        for (size_t z = 0; z < nz; ++z) {
            double num, den;
            if (mode == DensityMode::kSourceKey) {
                num = p_in[x] * ch(z, x);
                den = q_out[z];
            } else {
                num = ch(z, x);
                den = q_out[z];
            }
            double v;
            if (num == 0.0 && den == 0.0) {
                v = std::numeric_limits<double>::quiet_NaN();
            } else if (num == 0.0) {
                v = kNegInf;
            } else if (den == 0.0) {
                v = kInf;
            } else {
                v = std::log(num) - std::log(den);
                if (mode == DensityMode::kSourceKey) v -= ln_inv_x;
            }
            t.values[x * nz + z] = v;
        }
    }
    return t;
}

/// The three secrecy metrics of a message-to-eavesdropper channel P_{Z|W},
/// with W uniform. S_avg averages and S_max maximizes the same per-message
/// total variation to the mixture output Q_Z.
struct SecrecyMetrics {
    double s_avg;
    double s_max;
    double ds;
    bool ds_degenerate;  // fewer than two messages: DS is 0 by convention
};

inline SecrecyMetrics secrecy_metrics(const DiscreteChannel& p_z_given_w) {
    const size_t m = p_z_given_w.input_size();
    FiniteDist q_z = p_z_given_w.uniform_output();
    double s_avg = 0.0, s_max = 0.0;
    for (size_t w = 0; w < m; ++w) {
        double d = total_variation(p_z_given_w.row(w), q_z);
        s_avg += d / static_cast<double>(m);
        s_max = std::max(s_max, d);
    }
    double ds = 0.0;
    bool degenerate = m < 2;
    for (size_t a = 0; a + 1 < m; ++a)
        for (size_t b = a + 1; b < m; ++b)
            ds = std::max(ds, total_variation(p_z_given_w.row(a), p_z_given_w.row(b)));
    return {s_avg, s_max, ds, degenerate};
}

}  // namespace wiretap
