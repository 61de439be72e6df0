#pragma once

// Privacy-amplification and channel-resolvability bounds. All four bounds are
// exact finite sums built from the E_gamma metric and the information density
// i(x;z) = ln dP_XZ / d(Q_unif_X Q_Z); gamma is a free parameter to be
// minimized by the caller (every gamma > 0 gives a valid bound).

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wiretap/numerics.hpp"
#include "wiretap/prob.hpp"

namespace wiretap {

struct PABoundInputs {
    JointDist joint;   // P_XZ
    size_t key_size;   // |K|
    double ratio_L;    // L = |X| / |K|
    FiniteDist q_z;

    PABoundInputs(JointDist j, size_t k, FiniteDist q)
        : joint(std::move(j)), key_size(k), ratio_L(0.0), q_z(std::move(q)) {
        if (key_size == 0) throw std::domain_error("PABoundInputs: key_size must be positive");
        if (q_z.size() != joint.cols())
            throw std::domain_error("PABoundInputs: q_z alphabet mismatch");
        ratio_L = static_cast<double>(joint.rows()) / static_cast<double>(key_size);
        if (ratio_L < 1.0) throw std::domain_error("PABoundInputs: needs |X| >= |K|");
    }
};

struct PABoundValue {
    double egamma_term;
    double sqrt_term;
    double concentration_term;  // 0 when not applicable
    double total;
    double gamma_used;
};

namespace detail {

// Product reference measure Q_unif_X x Q_Z, flattened like the joint.
inline std::vector<double> uniform_product_ref(size_t nx, const FiniteDist& q_z) {
    std::vector<double> r(nx * q_z.size());
    const double inv_x = 1.0 / static_cast<double>(nx);
    for (size_t x = 0; x < nx; ++x)
        for (size_t z = 0; z < q_z.size(); ++z) r[x * q_z.size() + z] = inv_x * q_z[z];
    return r;
}

// E_{weights}[ exp(-|i(x;z) - ln gamma|) ] where i is the density of `joint`
// against Q_unif_X Q_Z and `weights` is a pmf on the same product alphabet.
inline double abs_exp_expectation(const JointDist& joint, const FiniteDist& q_z,
                                  std::span<const double> weights, double ln_gamma) {
    const size_t nx = joint.rows(), nz = joint.cols();
    const double ln_inv_x = -std::log(static_cast<double>(nx));
    double e = 0.0;
    for (size_t x = 0; x < nx; ++x) {
        for (size_t z = 0; z < nz; ++z) {
            double w = weights[x * nz + z];
            if (w == 0.0) continue;
            double num = joint.at(x, z);
            if (num == 0.0) continue;  // density -inf, exp(-inf) = 0
            if (q_z[z] == 0.0) continue;  // density +inf
            double dens = std::log(num) - (ln_inv_x + std::log(q_z[z]));
            e += w * std::exp(-std::abs(dens - ln_gamma));
        }
    }
    return e;
}

}  // namespace detail

/// Average-secrecy privacy amplification: some balanced hash g achieves
/// S(g(X)|Z) <= E_gamma(P_XZ, Q_unif_X Q_Z) + (1/2) sqrt((gamma/L) E[...]),
/// with the expectation under P_XZ itself.
inline PABoundValue pa_avg_bound(const PABoundInputs& in, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("pa_avg_bound: gamma must be positive");
    auto ref = detail::uniform_product_ref(in.joint.rows(), in.q_z);
    double eg = detail::e_gamma_span(in.joint.flat(), ref, gamma);
    double expect =
        detail::abs_exp_expectation(in.joint, in.q_z, in.joint.flat(), std::log(gamma));
    double sq = 0.5 * std::sqrt(gamma / in.ratio_L * expect);
    return {eg, sq, 0.0, eg + sq, gamma};
}

/// Soft-covering bound on the mean total variation of an i.i.d. random
/// codebook of size L: the expectation runs under uniform input and the true
/// channel, not under P_XZ.
inline PABoundValue resolvability_bound(const FiniteDist& p_x, const DiscreteChannel& ch,
                                        size_t codebook_size, double gamma,
                                        const FiniteDist& q_z) {
    if (!(gamma > 0.0)) throw std::domain_error("resolvability_bound: gamma must be positive");
    if (codebook_size == 0) throw std::domain_error("resolvability_bound: empty codebook");
    for (size_t x = 0; x < p_x.size(); ++x)
        if (p_x[x] == 0.0)
            throw std::domain_error("resolvability_bound: P_X must be strictly positive (symbol " +
                                    std::to_string(x) + ")");
    auto joint = JointDist::from_input_and_channel(p_x, ch);
    auto ref = detail::uniform_product_ref(joint.rows(), q_z);
    double eg = detail::e_gamma_span(joint.flat(), ref, gamma);
    // weights: uniform X, true channel rows
    std::vector<double> w(joint.rows() * joint.cols());
    const double inv_x = 1.0 / static_cast<double>(joint.rows());
    for (size_t x = 0; x < joint.rows(); ++x)
        for (size_t z = 0; z < joint.cols(); ++z) w[x * joint.cols() + z] = inv_x * ch(z, x);
    double expect = detail::abs_exp_expectation(joint, q_z, w, std::log(gamma));
    double sq = 0.5 * std::sqrt(gamma / static_cast<double>(codebook_size) * expect);
    return {eg, sq, 0.0, eg + sq, gamma};
}

/// Maximum-secrecy privacy amplification: resolvability mean bound plus the
/// sampling-without-replacement concentration penalty sqrt(ln(|K|+1)/(2L)).
/// Requires a uniform P_X marginal and integral L.
inline PABoundValue pa_max_bound(const PABoundInputs& in, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("pa_max_bound: gamma must be positive");
    if (in.joint.rows() % in.key_size != 0)
        throw std::domain_error("pa_max_bound: |X| must be divisible by |K|");
    auto p_x = in.joint.row_marginal();
    const double inv_x = 1.0 / static_cast<double>(in.joint.rows());
    for (size_t x = 0; x < p_x.size(); ++x)
        if (std::abs(p_x[x] - inv_x) > 1e-9)
            throw std::domain_error("pa_max_bound: requires uniform P_X marginal");
    auto base = pa_avg_bound(in, gamma);
    double conc =
        std::sqrt(std::log(static_cast<double>(in.key_size) + 1.0) / (2.0 * in.ratio_L));
    return {base.egamma_term, base.sqrt_term, conc, base.total + conc, gamma};
}

/// Converse: every hash g satisfies S(g(X)|Z) >= E_L(P_XZ, Q_unif_X P_Z),
/// with P_Z the true Z-marginal of the joint.
inline double pa_converse(const JointDist& joint, double ratio_L) {
    if (ratio_L < 1.0) throw std::domain_error("pa_converse: L must be >= 1");
    auto ref = detail::uniform_product_ref(joint.rows(), joint.col_marginal());
    return detail::e_gamma_span(joint.flat(), ref, ratio_L);
}

struct ResolvabilityConverse {
    double bound;     // E_L lower bound on d(P_Z|C, Q_Z)
    double exact_tv;  // the exact total variation, for comparison
};

inline ResolvabilityConverse resolvability_converse(std::span<const size_t> codebook,
                                                    const DiscreteChannel& ch,
                                                    const FiniteDist& q_z) {
    if (codebook.empty()) throw std::domain_error("resolvability_converse: empty codebook");
    const size_t l = codebook.size();
    const size_t nz = ch.output_size();
    // joint over (codeword index, Z) under uniform codeword choice
    std::vector<double> p(l * nz), q(l * nz), out(nz, 0.0);
    const double inv_l = 1.0 / static_cast<double>(l);
    for (size_t i = 0; i < l; ++i) {
        for (size_t z = 0; z < nz; ++z) {
            p[i * nz + z] = inv_l * ch(z, codebook[i]);
            q[i * nz + z] = inv_l * q_z[z];
            out[z] += inv_l * ch(z, codebook[i]);
        }
    }
    double bound = detail::e_gamma_span(p, q, static_cast<double>(l));
    double exact = detail::total_variation_span(out, q_z.masses());
    return {bound, exact};
}

/// One enumerated balanced hash with its exact secrecy values.
struct HashRecord {
    std::vector<size_t> assignment;  // class index per source symbol
    double s_avg;
    double s_max_tv;  // max_k d(P_{Z | g^{-1}(k)}, P_Z)
};

struct HashOracleResult {
    double best_s_avg;
    double best_s_max;
    std::vector<HashRecord> per_hash;
};

/// Enumerates every balanced g : X -> K (unordered classes) and evaluates the
/// exact average and maximum secrecy of g(X) against Z. Realizes the
/// existential quantifiers of the privacy amplification bounds on small
/// instances.
inline HashOracleResult exhaustive_hash_oracle(const JointDist& joint, size_t key_size) {
    const size_t nx = joint.rows();
    if (key_size == 0 || nx % key_size != 0)
        throw std::domain_error("exhaustive_hash_oracle: |X| must be divisible by |K|");
    if (nx > 16) throw std::domain_error("exhaustive_hash_oracle: |X| too large");
    const size_t l = nx / key_size;

    // unordered balanced partition count: |X|! / (L!^K K!)
    double ln_count = std::lgamma(static_cast<double>(nx) + 1.0) -
                      static_cast<double>(key_size) * std::lgamma(static_cast<double>(l) + 1.0) -
                      std::lgamma(static_cast<double>(key_size) + 1.0);
    if (ln_count > std::log(1e6))
        throw std::domain_error("exhaustive_hash_oracle: more than 1e6 balanced partitions");

    const size_t nz = joint.cols();
    auto p_z = joint.col_marginal();
    auto p_x = joint.row_marginal();

    HashOracleResult result{kInf, kInf, {}};
    std::vector<size_t> assignment(nx, SIZE_MAX);
    std::vector<size_t> cls;

    auto evaluate = [&]() {
        // per-class Z mass and class probability
        std::vector<double> class_z(key_size * nz, 0.0), class_p(key_size, 0.0);
        for (size_t x = 0; x < nx; ++x) {
            class_p[assignment[x]] += p_x[x];
            for (size_t z = 0; z < nz; ++z) class_z[assignment[x] * nz + z] += joint.at(x, z);
        }
        double s_avg = 0.0, s_max = 0.0;
        const double inv_k = 1.0 / static_cast<double>(key_size);
        for (size_t k = 0; k < key_size; ++k) {
            double dk = 0.0;
            for (size_t z = 0; z < nz; ++z) {
                s_avg += 0.5 * std::abs(class_z[k * nz + z] - inv_k * p_z[z]);
                if (class_p[k] > 0.0)
                    dk += 0.5 * std::abs(class_z[k * nz + z] / class_p[k] - p_z[z]);
            }
            s_max = std::max(s_max, dk);
        }
        result.best_s_avg = std::min(result.best_s_avg, s_avg);
        result.best_s_max = std::min(result.best_s_max, s_max);
        result.per_hash.push_back({assignment, s_avg, s_max});
    };

    // Assign classes one at a time; anchoring each class at the smallest
    // unassigned symbol enumerates unordered partitions exactly once.
    auto rec = [&](auto&& self, size_t next_class) -> void {
        if (next_class == key_size) {
            evaluate();
            return;
        }
        size_t anchor = SIZE_MAX;
        std::vector<size_t> free_syms;
        for (size_t x = 0; x < nx; ++x) {
            if (assignment[x] != SIZE_MAX) continue;
            if (anchor == SIZE_MAX)
                anchor = x;
            else
                free_syms.push_back(x);
        }
        assignment[anchor] = next_class;
        std::vector<size_t> pick(l > 0 ? l - 1 : 0);
        // iterate over (l-1)-subsets of free_syms
        auto choose = [&](auto&& chooser, size_t start, size_t depth) -> void {
            if (depth == l - 1) {
                for (size_t s : pick) assignment[s] = next_class;
                self(self, next_class + 1);
                for (size_t s : pick) assignment[s] = SIZE_MAX;
                return;
            }
            for (size_t i = start; i + (l - 1 - depth) <= free_syms.size(); ++i) {
                pick[depth] = free_syms[i];
                chooser(chooser, i + 1, depth + 1);
            }
        };
        if (l == 1)
            self(self, next_class + 1);
        else
            choose(choose, 0, 0);
        assignment[anchor] = SIZE_MAX;
    };
    rec(rec, 0);
    return result;
}

}  // namespace wiretap
