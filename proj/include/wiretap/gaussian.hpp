#pragma once

// Gaussian wiretap channel: closed-form second-order quantities and Monte
// Carlo nonasymptotic bounds. The spherical symmetry of the power sphere and
// of the auxiliary output measures makes every per-codeword quantity equal to
// its value at x = (sqrt(P), ..., sqrt(P)), where the n-letter log-likelihood
// ratios are sums of i.i.d. quadratics in Gaussians. Diagonalizing those
// quadratics turns each blocklength-n sample into a couple of noncentral
// chi-square draws, so sampling cost does not grow with n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <cstring>
#include <thread>
#include <vector>

#include "wiretap/bounds.hpp"
#include "wiretap/numerics.hpp"
#include "wiretap/prob.hpp"

namespace wiretap {

struct GaussianWiretapParams {
    double power;  // transmit power P
    double n1;     // legitimate noise variance
    double n2;     // eavesdropper noise variance

    GaussianWiretapParams(double p, double noise1, double noise2)
        : power(p), n1(noise1), n2(noise2) {
        if (!(power > 0.0) || !(n1 > 0.0) || !(n2 > n1))
            throw std::domain_error(
                "GaussianWiretapParams: requires P > 0 and 0 < N1 < N2");
    }

    static GaussianWiretapParams from_snr_db(double snr_legit_db, double snr_eve_db) {
        // N1 normalized to 1; P = 10^(legit/10); N2 = P / 10^(eve/10)
        double p = std::pow(10.0, snr_legit_db / 10.0);
        double n2 = p / std::pow(10.0, snr_eve_db / 10.0);
        return GaussianWiretapParams(p, 1.0, n2);
    }
};

struct McConfig {
    size_t samples = 1'000'000;
    uint64_t seed = 0;
    int workers = 1;
    int bootstrap_resamples = 200;
};

struct GaussianSecondOrder {
    double c_s_bits;
    double v1_bits2;
    double v2_bits2;
    double vc_bits2;
};

inline GaussianSecondOrder gaussian_second_order_terms(const GaussianWiretapParams& gp) {
    const double p = gp.power, n1 = gp.n1, n2 = gp.n2;
    const double l2e = kLog2E, l2e2 = kLog2E * kLog2E;
    double c_s = 0.5 * (std::log1p(p / n1) - std::log1p(p / n2)) * l2e;
    double v1 = 0.5 * (p * p + 2.0 * p * n1) / ((p + n1) * (p + n1)) * l2e2;
    double v2 = 0.5 * (p * p + 2.0 * p * n2) / ((p + n2) * (p + n2)) * l2e2;
    double vc = v1 + v2 -
                p * n1 / (p + n1) * (1.0 / n2 + 1.0 / (p + n2)) * l2e2;
    return {c_s, v1, v2, vc};
}

struct GaussianApprox {
    double ach_rate_bits;
    double conv_rate_bits;
    bool variance_ordering_ok;  // Vc <= (sqrt(V1)+sqrt(V2))^2, checked not assumed
};

inline GaussianApprox gaussian_approx(const GaussianWiretapParams& gp, long long n, double eps,
                                      double delta) {
    if (!(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0))
        throw std::domain_error("gaussian_approx: eps, delta must lie in (0,1)");
    if (!(eps + delta < 1.0))
        throw std::domain_error("gaussian_approx: converse form requires eps + delta < 1");
    auto t = gaussian_second_order_terms(gp);
    double sn = std::sqrt(static_cast<double>(n));
    double ach = t.c_s_bits - std::sqrt(t.v1_bits2) / sn * q_inv(eps) -
                 std::sqrt(t.v2_bits2) / sn * q_inv(delta);
    double conv = t.c_s_bits - std::sqrt(t.vc_bits2) / sn * q_inv(eps + delta);
    bool ordering = t.vc_bits2 <=
                    std::pow(std::sqrt(t.v1_bits2) + std::sqrt(t.v2_bits2), 2.0) + 1e-12;
    return {ach, conv, ordering};
}

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Counter-based splitmix64 engine: cheap to construct per sample, which is
/// what keeps the worker split deterministic.
class SplitMixEngine {
  public:
    using result_type = uint64_t;
    explicit SplitMixEngine(uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~uint64_t{0}; }
    result_type operator()() { return splitmix64(state_++); }

  private:
    uint64_t state_;
};

/// Distribution of sum_{i=1..n} q(w_i) for a fixed real quadratic q of a
/// standard normal vector, reduced to independent noncentral chi-squares
/// (plus a pure Gaussian for null directions):
///   sum = n*constant + sum_j coeff_j * X_j + sum_k lin_k * sqrt(n) * Z_k,
/// X_j ~ noncentral chi^2 with n degrees of freedom and noncentrality
/// n*shift_j^2.
struct ReducedQuadratic {
    std::vector<double> coeffs;
    std::vector<double> shifts;
    std::vector<double> lins;
    double constant = 0.0;

    double per_letter_mean() const {
        double m = constant;
        for (size_t j = 0; j < coeffs.size(); ++j)
            m += coeffs[j] * (1.0 + shifts[j] * shifts[j]);
        return m;
    }
    double per_letter_variance() const {
        double v = 0.0;
        for (size_t j = 0; j < coeffs.size(); ++j)
            v += coeffs[j] * coeffs[j] * (2.0 + 4.0 * shifts[j] * shifts[j]);
        for (double l : lins) v += l * l;
        return v;
    }

    double sample(long long n, SplitMixEngine& rng) const {
        std::normal_distribution<double> normal(0.0, 1.0);
        double s = n * constant;
        for (size_t j = 0; j < coeffs.size(); ++j) {
            double chi = 0.0;
            if (n > 1) {
                std::gamma_distribution<double> gamma((n - 1) / 2.0, 2.0);
                chi = gamma(rng);
            }
            double z = normal(rng) + std::sqrt(static_cast<double>(n)) * shifts[j];
            s += coeffs[j] * (chi + z * z);
        }
        for (double l : lins) s += l * std::sqrt(static_cast<double>(n)) * normal(rng);
        return s;
    }
};

// (1/2)(w' M w + g' w + c) for a 2x2 symmetric M, via its eigensystem
inline ReducedQuadratic reduce_quadratic_2d(double m11, double m12, double m22, double g1,
                                            double g2, double c) {
    ReducedQuadratic r;
    double tr = m11 + m22, det = m11 * m22 - m12 * m12;
    double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    double scale = std::abs(m11) + std::abs(m22) + std::abs(m12) + 1e-300;
    double lam[2] = {(tr + disc) / 2.0, (tr - disc) / 2.0};
    double extra_const = c;
    for (double l : lam) {
        // eigenvector for eigenvalue l
        double vx, vy;
        if (std::abs(m12) > 1e-14 * scale) {
            vx = m12;
            vy = l - m11;
        } else if (std::abs(l - m11) < std::abs(l - m22)) {
            vx = 1.0;
            vy = 0.0;
        } else {
            vx = 0.0;
            vy = 1.0;
        }
        double nrm = std::hypot(vx, vy);
        vx /= nrm;
        vy /= nrm;
        double h = g1 * vx + g2 * vy;  // linear coefficient along this axis
        if (std::abs(l) > 1e-13 * (scale + std::abs(h))) {
            double shift = h / (2.0 * l);
            r.coeffs.push_back(0.5 * l);
            r.shifts.push_back(shift);
            extra_const -= l * shift * shift;
        } else if (h != 0.0) {
            r.lins.push_back(0.5 * h);
        }
    }
    r.constant = 0.5 * extra_const;
    return r;
}

// n-letter log dP_{YZ|X=xbar}/d(P_{Z|X=xbar} Q_{Y|Z}) as a function of the
// noise pair (U, Ubar); mean n*C_S, per-letter variance Vc (nats)
inline ReducedQuadratic converse_llr_form(const GaussianWiretapParams& gp) {
    const double p = gp.power, n1 = gp.n1, n2 = gp.n2;
    const double s1 = std::sqrt(n1), s2 = std::sqrt(n2 - n1), sp = std::sqrt(p);
    // (1/2)[ a (U+Ub)^2 + b U^2 + c1 U + c2 (U+Ub) + c0 ] in whitened coords
    const double a = 1.0 / n2 - 1.0 / (p + n2);
    const double b = 1.0 / (p + n1) - 1.0 / n1;
    const double c1 = 2.0 * sp / (p + n1);
    const double c2 = -2.0 * sp / (p + n2);
    const double c0 = p / (p + n1) - p / (p + n2);
    double m11 = (a + b) * n1;
    double m12 = a * s1 * s2;
    double m22 = a * s2 * s2;
    double g1 = (c1 + c2) * s1;
    double g2 = c2 * s2;
    auto r = reduce_quadratic_2d(m11, m12, m22, g1, g2, c0);
    double c_s_nats = 0.5 * (std::log1p(p / n1) - std::log1p(p / n2));
    r.constant += c_s_nats;
    return r;
}

// n-letter log dP_{V^n|X^n=xbar}/dQ_{V^n} with Q_V = N(0, (P+N) I), as a
// function of the own-channel noise; mean (n/2) ln(1+P/N)
inline ReducedQuadratic channel_density_form(double p, double noise) {
    const double s = std::sqrt(noise), sp = std::sqrt(p);
    // (1/2)[ (1/(P+N) - 1/N) v^2 + (2 sqrt(P)/(P+N)) v + P/(P+N) + ln(1+P/N) ]
    double m11 = (1.0 / (p + noise) - 1.0 / noise) * noise;
    double g1 = 2.0 * sp / (p + noise) * s;
    double c = p / (p + noise) + std::log1p(p / noise);
    auto r = reduce_quadratic_2d(m11, 0.0, 0.0, g1, 0.0, c);
    return r;
}

inline int block_label(double value, uint64_t seed, int blocks) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    return static_cast<int>(splitmix64(bits ^ seed) % static_cast<uint64_t>(blocks));
}

inline std::vector<double> sample_reduced(const ReducedQuadratic& form, long long n,
                                          const McConfig& mc) {
    std::vector<double> out(mc.samples);
    int workers = std::max(mc.workers, 1);
    auto fill = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            SplitMixEngine rng(splitmix64(mc.seed ^ splitmix64(i + 1)));
            out[i] = form.sample(n, rng);
        }
    };
    if (workers == 1) {
        fill(0, mc.samples);
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (mc.samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            size_t lo = std::min(w * chunk, mc.samples);
            size_t hi = std::min(lo + chunk, mc.samples);
            if (lo < hi) pool.emplace_back(fill, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    return out;
}

/// Sorted-sample view with log-domain prefix structures for importance
/// reweighting: Q[i >= t] = E_P[exp(-i) 1{i >= t}] when i = ln dP/dQ.
struct DensitySample {
    std::vector<double> sorted;          // ascending
    std::vector<double> suffix_lse_neg;  // lse of -sorted[j], j >= idx
    std::vector<double> prefix_lse_pos;  // lse of +sorted[j], j < idx
    double log_n;

    explicit DensitySample(std::vector<double> xs) {
        std::sort(xs.begin(), xs.end());
        sorted = std::move(xs);
        const size_t n = sorted.size();
        suffix_lse_neg.assign(n + 1, kNegInf);
        prefix_lse_pos.assign(n + 1, kNegInf);
        LogAccumulator suf;
        for (size_t i = n; i-- > 0;) {
            suf.add(-sorted[i]);
            suffix_lse_neg[i] = suf.log_total();
        }
        LogAccumulator pre;
        for (size_t i = 0; i < n; ++i) {
            pre.add(sorted[i]);
            prefix_lse_pos[i + 1] = pre.log_total();
        }
        log_n = std::log(static_cast<double>(n));
    }

    size_t count_below(double t) const {
        return std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    }

    // E_gamma(P, Q) estimate at threshold ln gamma
    double e_gamma(double ln_gamma) const {
        size_t idx = count_below(ln_gamma);
        double p_tail = static_cast<double>(sorted.size() - idx) / sorted.size();
        double q_tail_ln = suffix_lse_neg[idx] - log_n;
        return std::max(p_tail - std::exp(ln_gamma + q_tail_ln), 0.0);
    }

    // E_P[exp(-|i - ln gamma|)] estimate
    double abs_exp(double ln_gamma) const {
        size_t idx = count_below(ln_gamma);
        LogAccumulator acc;
        acc.add(prefix_lse_pos[idx] - ln_gamma);
        acc.add(suffix_lse_neg[idx] + ln_gamma);
        return std::exp(std::min(acc.log_total() - log_n, 0.0));
    }

    // ln beta_alpha of the weighted empirical measure: the exact
    // Neyman-Pearson optimum with atom i carrying P-mass 1/N and Q-mass
    // exp(-i)/N, including boundary randomization
    double log_beta(double alpha) const {
        const size_t n = sorted.size();
        double atoms = alpha * static_cast<double>(n);
        size_t full = std::min(static_cast<size_t>(atoms), n);
        double theta = atoms - static_cast<double>(full);
        // accept the `full` largest densities outright
        LogAccumulator acc;
        acc.add(suffix_lse_neg[n - full]);
        if (theta > 0.0 && full < n) acc.add(std::log(theta) - sorted[n - full - 1]);
        return acc.log_total() - log_n;
    }
};

}  // namespace detail

/// Samples of the converse log-likelihood ratio (natural log) at blocklength
/// n. Deterministic given (seed); the worker count only changes scheduling.
inline std::vector<double> sample_converse_density(const GaussianWiretapParams& gp, long long n,
                                                   const McConfig& mc) {
    if (mc.samples < 1) throw std::domain_error("sample_converse_density: needs samples");
    return detail::sample_reduced(detail::converse_llr_form(gp), n, mc);
}

struct McBound {
    double rate_bits;
    double halfwidth_bits;      // bootstrap confidence half-width
    double tau_star = 0.0;      // converse only
    double ln_gamma_star = 0.0; // achievability only, natural log
    double log_l_star = 0.0;    // achievability only
    double rate_bits_hayashi = 0.0;  // converse only: the 1/tau^2 comparison
    bool feasible = true;
};

/// Monte Carlo evaluation of the binary-hypothesis-testing converse with the
/// spherically symmetric Q_{Y^n|Z^n}: the NP beta at alpha = 1-eps-delta-tau
/// is computed on the importance-weighted empirical measure and plugged into
/// the tau optimization.
inline McBound mc_beta_converse(const GaussianWiretapParams& gp, long long n, double eps,
                                double delta, const McConfig& mc) {
    if (!(eps + delta < 1.0))
        throw std::domain_error("mc_beta_converse: requires eps + delta < 1");
    if (mc.samples < 10000)
        throw std::domain_error("mc_beta_converse: bound evaluation needs >= 1e4 samples");
    detail::DensitySample s(sample_converse_density(gp, n, mc));
    auto log_beta = [&](double alpha) { return s.log_beta(alpha); };
    auto r = converse_bht(log_beta, eps, delta);
    double rate = r.log_m * kLog2E / static_cast<double>(n);

    // block bootstrap at the chosen operating point: resample 200 sample
    // blocks, rebuild beta at fixed (tau*, threshold index)
    const int blocks = 200;
    const size_t bn = s.sorted.size();
    double alpha_star = 1.0 - eps - delta - r.tau_star;
    size_t full = std::min(static_cast<size_t>(alpha_star * bn), bn);
    size_t cut = bn - full;  // acceptance region = sorted[cut..]
    std::vector<double> blk_beta_ln(blocks, kNegInf);
    {
        // per-block tail sums over the acceptance region sorted[cut..];
        // labels come from hashing the sample value so the blocks are
        // exchangeable i.i.d. groups rather than strata of the sorted order
        std::vector<LogAccumulator> acc(blocks);
        for (size_t i = cut; i < bn; ++i)
            acc[detail::block_label(s.sorted[i], mc.seed, blocks)].add(-s.sorted[i]);
        for (int b = 0; b < blocks; ++b) blk_beta_ln[b] = acc[b].log_total();
    }
    std::mt19937_64 boot_rng(detail::splitmix64(mc.seed ^ 0xb00757ull));
    std::uniform_int_distribution<int> pick(0, blocks - 1);
    std::vector<double> rates;
    rates.reserve(mc.bootstrap_resamples);
    for (int rs = 0; rs < mc.bootstrap_resamples; ++rs) {
        LogAccumulator acc;
        for (int b = 0; b < blocks; ++b) acc.add(blk_beta_ln[pick(boot_rng)]);
        double lb = acc.log_total() - s.log_n;
        double lm = std::log((r.tau_star + delta) / r.tau_star) - lb;
        rates.push_back(lm * kLog2E / static_cast<double>(n));
    }
    double mean = 0.0, var = 0.0;
    for (double x : rates) mean += x;
    mean /= rates.size();
    for (double x : rates) var += (x - mean) * (x - mean);
    var /= rates.size();
    return {rate,
            2.0 * std::sqrt(var),
            r.tau_star,
            0.0,
            0.0,
            r.log_m_hayashi * kLog2E / static_cast<double>(n),
            true};
}

/// Monte Carlo achievability: eavesdropper terms estimated along the sphere
/// codeword against N(0, (P+N2) I); the legitimate error uses a threshold
/// bound with auxiliary measure N(0, (P+N1) I). Joint search over gamma, L,
/// and M under both constraints, with the concentration penalties of the
/// maximum-metric construction.
inline McBound mc_achievability(const GaussianWiretapParams& gp, long long n, double eps,
                                double delta, const McConfig& mc) {
    if (mc.samples < 10000)
        throw std::domain_error("mc_achievability: bound evaluation needs >= 1e4 samples");
    McConfig mc_eve = mc;
    McConfig mc_legit = mc;
    mc_legit.seed = detail::splitmix64(mc.seed ^ 0x1e917ull);
    detail::DensitySample eve(
        detail::sample_reduced(detail::channel_density_form(gp.power, gp.n2), n, mc_eve));
    detail::DensitySample legit(
        detail::sample_reduced(detail::channel_density_form(gp.power, gp.n1), n, mc_legit));

    // candidate decoding thresholds: subsampled quantiles of the legit density
    const size_t n_thresh = 4096;
    std::vector<size_t> thresh_idx;
    for (size_t j = 0; j < n_thresh; ++j)
        thresh_idx.push_back(j * (legit.sorted.size() - 1) / (n_thresh - 1));
    auto eps_legit = [&](double log_a) {
        double best = 1.0;
        for (size_t j : thresh_idx) {
            double below = static_cast<double>(j) / legit.sorted.size();
            double tail_ln = legit.suffix_lse_neg[j] - legit.log_n;
            double u = log_a + tail_ln;
            double val = below + (u > 0.0 ? 1.0 : std::exp(u));
            best = std::min(best, val);
        }
        return best;
    };

    // secrecy pieces on a gamma grid centered on the eavesdropper density
    auto grid = log_gamma_grid(eve.sorted.front() - 5.0, eve.sorted.back() + 5.0, 512);
    std::vector<double> sec_base(grid.size());

    auto concentration = [&](double log_m, double log_l) {
        return std::sqrt(detail::log_plus_const(log_m + kLn2, 1.0) * std::exp(-log_l) / 2.0);
    };

    double best_log_m = -kInf, best_gamma = 0.0, best_log_l = 0.0;
    const double max_log_l = n * 0.5 * std::log1p(gp.power / gp.n2) + 12.0 * std::sqrt(n) + 10.0;
    for (int li = 0; li <= 160; ++li) {
        double log_l = max_log_l * li / 160.0;
        // best secrecy base term over gamma for this L
        double base_best = kInf, gamma_best = 0.0;
        for (double lg : grid) {
            double v = eve.e_gamma(lg) +
                       0.5 * std::sqrt(std::exp(lg - log_l) * eve.abs_exp(lg));
            if (v < base_best) {
                base_best = v;
                gamma_best = lg;
            }
        }
        if (base_best >= delta) continue;
        // secrecy cap on M: concentration <= delta - base
        double margin = delta - base_best;
        double lm_sec;
        double cap = 2.0 * std::exp(log_l) * margin * margin;  // ln(2M+1) <= cap
        if (cap > 50.0)
            lm_sec = cap - kLn2;
        else if (std::expm1(cap) / 2.0 < 1.0)
            lm_sec = std::log(std::max(std::expm1(cap) / 2.0, 1e-300));
        else
            lm_sec = std::log(std::expm1(cap) / 2.0);
        // reliability cap on M via bisection (monotone in log_m)
        auto eps_total = [&](double log_m) {
            return eps_legit(log_m + log_l) + concentration(log_m, log_l);
        };
        if (eps_total(0.0) > eps) continue;
        double lo = 0.0, hi = n * kLn2 * 2.0 + 10.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (eps_total(mid) <= eps)
                lo = mid;
            else
                hi = mid;
        }
        double lm = std::min(lm_sec, lo);
        if (lm > best_log_m) {
            best_log_m = lm;
            best_gamma = gamma_best;
            best_log_l = log_l;
        }
    }
    if (best_log_m == -kInf || best_log_m <= 0.0)
        return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, false};

    double rate = best_log_m * kLog2E / static_cast<double>(n);

    // binding decode threshold at the final operating point, for the
    // reliability-side bootstrap
    size_t best_thresh = 0;
    {
        double best_val = kInf;
        double log_a = best_log_m + best_log_l;
        for (size_t j : thresh_idx) {
            double below = static_cast<double>(j) / legit.sorted.size();
            double u = log_a + legit.suffix_lse_neg[j] - legit.log_n;
            double val = below + (u > 0.0 ? 1.0 : std::exp(u));
            if (val < best_val) {
                best_val = val;
                best_thresh = j;
            }
        }
    }

    // bootstrap half-width at the chosen operating point (fixed gamma*, L*):
    // block-resample the eavesdropper estimates entering the secrecy cap and
    // the legit tail at its binding threshold
    const int blocks = 200;
    std::mt19937_64 boot_rng(detail::splitmix64(mc.seed ^ 0xb0075e11ull));
    std::uniform_int_distribution<int> pick(0, blocks - 1);
    const size_t bn = eve.sorted.size();
    size_t idx = eve.count_below(best_gamma);
    std::vector<double> blk_tail_cnt(blocks, 0.0), blk_q_ln(blocks, kNegInf),
        blk_abs_ln(blocks, kNegInf);
    {
        std::vector<LogAccumulator> q(blocks), ab(blocks);
        std::vector<int> cnt(blocks, 0);
        for (size_t i = 0; i < bn; ++i) {
            int b = detail::block_label(eve.sorted[i], mc.seed, blocks);
            if (i >= idx) {
                cnt[b]++;
                q[b].add(-eve.sorted[i]);
                ab[b].add(best_gamma - eve.sorted[i]);
            } else {
                ab[b].add(eve.sorted[i] - best_gamma);
            }
        }
        for (int b = 0; b < blocks; ++b) {
            blk_tail_cnt[b] = cnt[b];
            blk_q_ln[b] = q[b].log_total();
            blk_abs_ln[b] = ab[b].log_total();
        }
    }
    // per-block reliability pieces at the binding threshold: counts below it
    // and the log tail mass above it under the auxiliary measure
    const size_t ln_count = legit.sorted.size();
    std::vector<double> blk_below(blocks, 0.0), blk_ltail_ln(blocks, kNegInf);
    {
        std::vector<LogAccumulator> lt(blocks);
        std::vector<int> below_cnt(blocks, 0);
        for (size_t i = 0; i < ln_count; ++i) {
            int b = detail::block_label(legit.sorted[i], mc_legit.seed, blocks);
            if (i < best_thresh)
                below_cnt[b]++;
            else
                lt[b].add(-legit.sorted[i]);
        }
        for (int b = 0; b < blocks; ++b) {
            blk_below[b] = below_cnt[b];
            blk_ltail_ln[b] = lt[b].log_total();
        }
    }

    std::vector<double> rates;
    for (int rs = 0; rs < mc.bootstrap_resamples; ++rs) {
        double cnt = 0.0;
        LogAccumulator q, ab;
        double below = 0.0;
        LogAccumulator ltail;
        for (int b = 0; b < blocks; ++b) {
            int j = pick(boot_rng);
            cnt += blk_tail_cnt[j];
            q.add(blk_q_ln[j]);
            ab.add(blk_abs_ln[j]);
            int j2 = pick(boot_rng);
            below += blk_below[j2];
            ltail.add(blk_ltail_ln[j2]);
        }
        // secrecy side
        double eg = std::max(cnt / bn - std::exp(best_gamma + q.log_total() - eve.log_n), 0.0);
        double h = std::exp(std::min(ab.log_total() - eve.log_n, 0.0));
        double base = eg + 0.5 * std::sqrt(std::exp(best_gamma - best_log_l) * h);
        double margin = delta - base;
        if (margin <= 0.0) {
            rates.push_back(0.0);
            continue;
        }
        double cap = 2.0 * std::exp(best_log_l) * margin * margin;
        double lm_sec = cap > 50.0 ? cap - kLn2
                                   : std::log(std::max(std::expm1(cap) / 2.0, 1e-300));
        // reliability side at the fixed threshold: bisect the largest log M
        double below_frac = below / ln_count;
        double ltail_shift = ltail.log_total() - legit.log_n;
        double lo = 0.0, hi = n * kLn2 * 2.0 + 10.0;
        auto eps_of = [&](double log_m) {
            double u = log_m + best_log_l + ltail_shift;
            return below_frac + (u > 0.0 ? 1.0 : std::exp(u)) +
                   concentration(log_m, best_log_l);
        };
        if (eps_of(0.0) > eps) {
            rates.push_back(0.0);
            continue;
        }
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (eps_of(mid) <= eps)
                lo = mid;
            else
                hi = mid;
        }
        rates.push_back(std::min(lm_sec, lo) * kLog2E / static_cast<double>(n));
    }
    double mean = 0.0, var = 0.0;
    for (double x : rates) mean += x;
    mean /= rates.size();
    for (double x : rates) var += (x - mean) * (x - mean);
    var /= rates.size();
    return {rate, 2.0 * std::sqrt(var), 0.0, best_gamma, best_log_l, 0.0, true};
}

}  // namespace wiretap
