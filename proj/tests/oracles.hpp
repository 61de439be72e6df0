#pragma once

// Test-only reference implementations. Everything here is deliberately
// independent of the library's computation paths: extended-precision series
// and continued fractions, exhaustive enumeration, and exact rational
// arithmetic via GMP.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace oracles {

// erf(x) by Maclaurin series, for |x| <= 1.
inline long double erf_series(long double x) {
    const long double two_over_sqrt_pi = 1.1283791670955125738961589031215L;
    long double term = x, sum = x;
    for (int n = 1; n < 80; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
        if (std::abs(term) < 1e-25L * std::abs(sum)) break;
    }
    return two_over_sqrt_pi * sum;
}

// erfc(x) for x >= 1 via the Laplace continued fraction, modified Lentz.
inline long double erfc_cf(long double x) {
    const long double sqrt_pi = 1.7724538509055160272981674833411L;
    const long double tiny = 1e-300L;
    long double f = tiny, c = f, d = 0.0L;
    // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...)))))
    for (int k = 0; k < 300; ++k) {
        long double a = k == 0 ? 1.0L : k / 2.0L;
        long double b = x;
        d = b + a * d;
        if (d == 0.0L) d = tiny;
        c = b + a / c;
        if (c == 0.0L) c = tiny;
        d = 1.0L / d;
        long double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0L) < 1e-22L) break;
    }
    return std::exp(-x * x) / sqrt_pi * f;
}

inline long double erfc_ref(long double x) {
    if (x < 0.0L) return 2.0L - erfc_ref(-x);
    if (x <= 1.0L) return 1.0L - erf_series(x);
    return erfc_cf(x);
}

// Gaussian tail Q(x), extended precision, no use of std::erfc.
inline long double q_ref(long double x) {
    const long double sqrt2 = 1.4142135623730950488016887242097L;
    return 0.5L * erfc_ref(x / sqrt2);
}

// Inverse of q_ref by bisection.
inline long double q_inv_ref(long double p) {
    long double lo = -42.0L, hi = 42.0L;
    for (int it = 0; it < 200; ++it) {
        long double mid = 0.5L * (lo + hi);
        if (q_ref(mid) > p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5L * (lo + hi);
}

// Exact Binomial(n, num/den) pmf at k as a GMP rational.
inline mpq_class binom_pmf_exact(unsigned n, unsigned k, unsigned num, unsigned den) {
    mpz_class coeff;
    mpz_bin_uiui(coeff.get_mpz_t(), n, k);
    mpz_class pk, qk;
    mpz_ui_pow_ui(pk.get_mpz_t(), num, k);
    mpz_ui_pow_ui(qk.get_mpz_t(), den - num, n - k);
    mpz_class dn;
    mpz_ui_pow_ui(dn.get_mpz_t(), den, n);
    return mpq_class(coeff * pk * qk) / mpq_class(dn);
}

// E_gamma(P,Q) via the variational form: max over all subsets of P[E]-gamma*Q[E].
inline double e_gamma_subset_sup(std::span<const double> p, std::span<const double> q,
                                 double gamma) {
    size_t n = p.size();
    double best = 0.0;  // empty set attains 0
    for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
        double v = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (mask >> i & 1) v += p[i] - gamma * q[i];
        if (v > best) best = v;
    }
    return best;
}

// LP optimum of the Neyman-Pearson problem. Vertices of the feasible polytope
// {0 <= t <= 1, sum t_i p_i >= alpha} have at most one fractional coordinate,
// so enumerating deterministic tests plus one randomized atom is exact.
inline double np_beta_lp(std::span<const double> p, std::span<const double> q, double alpha) {
    size_t n = p.size();
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        double pm = 0.0, qm = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (mask >> i & 1) {
                pm += p[i];
                qm += q[i];
            }
        if (pm >= alpha - 1e-15) {
            best = std::min(best, qm);
            continue;
        }
        for (size_t j = 0; j < n; ++j) {
            if (mask >> j & 1) continue;
            if (p[j] <= 0.0) continue;
            double theta = (alpha - pm) / p[j];
            if (theta <= 1.0 + 1e-15) best = std::min(best, qm + std::min(theta, 1.0) * q[j]);
        }
    }
    return best;
}

}  // namespace oracles
