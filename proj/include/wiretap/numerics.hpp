#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wiretap {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;
inline constexpr double kLog2E = 1.4426950408889634073599246810018921;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double nats_to_bits(double x) { return x * kLog2E; }
inline double bits_to_nats(double x) { return x * kLn2; }

/// A probability (or nonnegative mass) stored as its natural logarithm.
/// ln(0) is represented by -infinity.
class LogProb {
  public:
    LogProb() : v_(kNegInf) {}

    static LogProb from_log(double ln_mass) { return LogProb(ln_mass); }
    static LogProb from_linear(double mass) {
        if (mass < 0.0) throw std::domain_error("LogProb: negative mass " + std::to_string(mass));
        return LogProb(std::log(mass));
    }
    static LogProb zero() { return LogProb(kNegInf); }
    static LogProb one() { return LogProb(0.0); }

    double log() const { return v_; }
    double linear() const { return std::exp(v_); }
    bool is_zero() const { return v_ == kNegInf; }

    friend bool operator==(LogProb a, LogProb b) { return a.v_ == b.v_; }
    friend bool operator<(LogProb a, LogProb b) { return a.v_ < b.v_; }

  private:
    explicit LogProb(double v) : v_(v) {}
    double v_;
};

/// ln(sum of exp(x_i)), max-shifted so that no intermediate overflows.
inline double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) throw std::domain_error("log_sum_exp: empty sequence");
    double m = *std::max_element(xs.begin(), xs.end());
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline LogProb logsumexp(std::span<const LogProb> terms) {
    if (terms.empty()) throw std::domain_error("logsumexp: empty sequence");
    std::vector<double> xs(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) xs[i] = terms[i].log();
    return LogProb::from_log(log_sum_exp(xs));
}

/// Streaming log-domain accumulator for sums of many small masses.
class LogAccumulator {
  public:
    void add(double ln_term) {
        if (ln_term == kNegInf) return;
        if (total_ == kNegInf) {
            total_ = ln_term;
            return;
        }
        if (ln_term > total_) std::swap(total_, ln_term);
        total_ += std::log1p(std::exp(ln_term - total_));
    }
    double log_total() const { return total_; }

  private:
    double total_ = kNegInf;
};

/// Gaussian tail Q(x) = P[N(0,1) >= x], via the complementary error function.
inline double q_func(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

namespace detail {

// Acklam's rational approximation to the inverse normal CDF, good to ~1e-9.
inline double norm_inv_cdf_acklam(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

inline double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
}

}  // namespace detail

/// Inverse of q_func on (0,1). Strictly decreasing.
inline double q_inv(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("q_inv: argument " + std::to_string(p) + " outside (0,1)");
    // Q(x) = p  <=>  normal cdf at x is 1-p.
    double x = detail::norm_inv_cdf_acklam(1.0 - p);
    // Newton refinement against the erfc-based q_func; Q'(x) = -phi(x).
    for (int it = 0; it < 3; ++it) {
        double err = q_func(x) - p;
        double pdf = detail::std_normal_pdf(x);
        if (pdf <= 0.0) break;
        x += err / pdf;
    }
    return x;
}

inline double log_binomial_coefficient(long long n, long long k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// ln of the Binomial(n,p) pmf at k, with the 0*ln(0) = 0 convention.
inline LogProb log_binom_pmf(long long n, long long k, double p) {
    if (k < 0 || n < 0 || k > n)
        throw std::domain_error("log_binom_pmf: k=" + std::to_string(k) +
                                " outside [0, n=" + std::to_string(n) + "]");
    if (p < 0.0 || p > 1.0) throw std::domain_error("log_binom_pmf: p outside [0,1]");
    if (p == 0.0) return k == 0 ? LogProb::one() : LogProb::zero();
    if (p == 1.0) return k == n ? LogProb::one() : LogProb::zero();
    double v = log_binomial_coefficient(n, k);
    if (k > 0) v += static_cast<double>(k) * std::log(p);
    if (k < n) v += static_cast<double>(n - k) * std::log1p(-p);
    return LogProb::from_log(v);
}

/// Search bracket for a monotone crossing of a level.
struct BracketedRoot {
    double lo;
    double hi;
    double tol = 1e-10;
};

/// Finds x in [lo, hi] with f(x) = level for monotone f (either direction).
/// Stops when |f(x) - level| <= tol or the interval width is <= tol.
inline double bisect_monotone(const std::function<double(double)>& f, double level,
                              BracketedRoot bracket) {
    double lo = bracket.lo, hi = bracket.hi;
    if (!(lo < hi)) throw std::domain_error("bisect_monotone: requires lo < hi");
    double flo = f(lo), fhi = f(hi);
    bool increasing = flo <= fhi;
    double a = std::min(flo, fhi), b = std::max(flo, fhi);
    if (level < a - bracket.tol || level > b + bracket.tol)
        throw std::domain_error("bisect_monotone: level " + std::to_string(level) +
                                " not bracketed by f(lo)=" + std::to_string(flo) +
                                ", f(hi)=" + std::to_string(fhi));
    while (hi - lo > bracket.tol) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (std::abs(fm - level) <= bracket.tol) return mid;
        if ((fm < level) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct ScalarMinimum {
    double argmin;
    double min;
};

/// Coarse scan over an explicit grid followed by golden-section refinement
/// around the best cell. The returned minimum never exceeds any grid value.
inline ScalarMinimum minimize_scalar(const std::function<double(double)>& f,
                                     std::span<const double> grid, int refine_iters = 64) {
    if (grid.empty()) throw std::domain_error("minimize_scalar: empty grid");
    size_t best = 0;
    double best_val = f(grid[0]);
    for (size_t i = 1; i < grid.size(); ++i) {
        double v = f(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = grid[best > 0 ? best - 1 : best];
    double hi = grid[best + 1 < grid.size() ? best + 1 : best];
    double best_x = grid[best];
    if (lo < hi) {
        constexpr double invphi = 0.6180339887498949;
        double a = lo, b = hi;
        double x1 = b - invphi * (b - a);
        double x2 = a + invphi * (b - a);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < refine_iters && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = f(x2);
            }
            double fx = std::min(f1, f2);
            double xx = f1 <= f2 ? x1 : x2;
            if (fx < best_val) {
                best_val = fx;
                best_x = xx;
            }
        }
    }
    return {best_x, best_val};
}

/// Uniform grid in ln(gamma). Default span covers every finite per-letter
/// information density on binary alphabets scaled by blocklength n.
inline std::vector<double> log_gamma_grid(double ln_lo, double ln_hi, int points = 512) {
    if (points < 2 || !(ln_lo < ln_hi)) throw std::domain_error("log_gamma_grid: bad parameters");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = ln_lo + (ln_hi - ln_lo) * static_cast<double>(i) / (points - 1);
    return g;
}

/// Binary entropy in nats.
inline double binary_entropy_nats(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
    return h;
}

inline double binary_entropy_bits(double p) { return binary_entropy_nats(p) * kLog2E; }

}  // namespace wiretap
