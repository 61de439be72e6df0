#pragma once

// Wiretap achievability and converse combinators. Channel-specific content
// enters through SecrecyIngredients: per-codeword secrecy suprema and
// legitimate-channel error evaluators. Blocklength structure (n-fold products,
// symmetry reductions) stays with the channel modules that build the
// ingredients.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wiretap/numerics.hpp"
#include "wiretap/prob.hpp"
#include "wiretap/simplex.hpp"
#include "wiretap/wiretap_spec.hpp"

namespace wiretap {

struct SecrecyIngredients {
    // gamma -> sup_x E_gamma(P_{Z|X=x}, Q_Z)
    std::function<double(double)> egamma_sup;
    // gamma -> sup_x E_{P_{Z|X=x}}[ exp(-|i(x;Z) - ln gamma|) ]
    std::function<double(double)> expect_sup;
    // ln(codebook size) -> random coding union error bound
    std::function<double(double)> legit_rcu;
    // ln(codebook size) -> dependence testing error bound (average error)
    std::function<double(double)> legit_dt;
    // optional: ln(codebook size) -> maximum-error dependence testing bound
    std::function<double(double)> legit_dt_max;
};

/// Message and randomization counts in natural log: at the blocklengths this
/// library sweeps, M and L reach exp(2000) and only their logs are
/// representable.
struct CodeParams {
    double log_m;
    double log_l;
    long long n;  // blocklength carried for bookkeeping

    static CodeParams from_counts(double m, double l, long long n) {
        return {std::log(m), std::log(l), n};
    }
};

struct AchBound {
    double eps_bound;
    double delta_bound;
};

namespace detail {

inline double clamp_prob(double x) { return std::clamp(x, 0.0, 1.0); }

inline double tau_minimize(const std::function<double(double)>& f, double tau_lo, double tau_hi,
                           int points = 512) {
    auto grid = log_gamma_grid(std::log(tau_lo), std::log(tau_hi), points);
    auto r = minimize_scalar([&](double lt) { return f(std::exp(lt)); }, grid);
    return r.min;
}

// ln((e^la + c)) for modest |c|, stable for large la
inline double log_plus_const(double la, double c) {
    if (la > 40.0) return la + c * std::exp(-la);
    double v = std::exp(la) + c;
    return v > 0.0 ? std::log(v) : kNegInf;
}

}  // namespace detail

/// Average secrecy / average error achievability: some (M, eps, delta)_avg
/// code with uniform message exists with these bounds.
inline AchBound ach_avg(const SecrecyIngredients& ing, const CodeParams& cp, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("ach_avg: gamma must be positive");
    double ratio = std::exp(std::log(gamma) - cp.log_l);  // gamma / L
    double delta = ing.egamma_sup(gamma) + 0.5 * std::sqrt(ratio * ing.expect_sup(gamma));
    double log_a = cp.log_m + cp.log_l;
    // DT operates on (a-1)/2 codewords
    double log_dt_arg = detail::log_plus_const(log_a, -1.0) - kLn2;
    double eps = std::min(ing.legit_rcu(log_a), ing.legit_dt(log_dt_arg));
    return {detail::clamp_prob(eps), delta};
}

/// Expurgated RCU: best maximum-error bound obtainable by keeping the best
/// (1 - tau') fraction of a larger average-error codebook.
inline double eps_rcu_max(const std::function<double(double)>& eps_rcu, double log_a) {
    auto f = [&](double tau) { return eps_rcu(log_a - std::log1p(-tau)) / tau; };
    return detail::tau_minimize(f, 1e-9, 1.0 - 1e-9);
}

/// Maximum secrecy / maximum error achievability via sampling-without-
/// replacement concentration (penalty sqrt(ln(M+1)/(2L)) on secrecy only).
inline AchBound ach_max(const SecrecyIngredients& ing, const CodeParams& cp, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("ach_max: gamma must be positive");
    AchBound base = ach_avg(ing, cp, gamma);
    double pen = std::sqrt(detail::log_plus_const(cp.log_m, 1.0) * std::exp(-cp.log_l) / 2.0);
    double log_a = cp.log_m + cp.log_l;
    double eps = eps_rcu_max(ing.legit_rcu, log_a);
    if (ing.legit_dt_max) eps = std::min(eps, ing.legit_dt_max(detail::log_plus_const(log_a, -1.0)));
    return {detail::clamp_prob(eps), base.delta_bound + pen};
}

/// Maximum secrecy / maximum error achievability from an average-error code:
/// the concentration penalty sqrt(ln(2M+1)/(2L)) hits both constraints.
inline AchBound ach_max2(const SecrecyIngredients& ing, const CodeParams& cp, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("ach_max2: gamma must be positive");
    AchBound base = ach_avg(ing, cp, gamma);
    double pen =
        std::sqrt(detail::log_plus_const(cp.log_m + kLn2, 1.0) * std::exp(-cp.log_l) / 2.0);
    return {detail::clamp_prob(base.eps_bound + pen), base.delta_bound + pen};
}

struct BhtConverse {
    double log_m;          // ln M upper bound, nats
    double tau_star;
    double log_m_hayashi;  // the 1/tau^2 comparison bound, nats
    bool dominates_hayashi;  // new bound <= Hayashi bound on every grid point
};

/// Binary-hypothesis-testing converse: ln M <= min over tau in (0, 1-eps-delta)
/// of ln((tau+delta)/tau) - ln beta_{1-eps-delta-tau}. The supplied evaluator
/// returns ln beta at a given alpha.
inline BhtConverse converse_bht(const std::function<double(double)>& log_beta_eval, double eps,
                                double delta, int tau_points = 512) {
    if (!(eps >= 0.0 && delta >= 0.0 && eps + delta < 1.0))
        throw std::domain_error(
            "converse_bht: requires eps + delta < 1 (strong converse fails beyond)");
    const double span = 1.0 - eps - delta;
    auto objective = [&](double tau) {
        return std::log((tau + delta) / tau) - log_beta_eval(1.0 - eps - delta - tau);
    };
    auto hayashi = [&](double tau) {
        return -2.0 * std::log(tau) - log_beta_eval(1.0 - eps - delta - tau);
    };

    auto grid = log_gamma_grid(std::log(span) - 30.0, std::log(span * (1.0 - 1e-9)), tau_points);
    bool dominates = true;
    double best = kInf, best_tau = 0.0, best_h = kInf;
    for (double lt : grid) {
        double tau = std::exp(lt);
        double v = objective(tau);
        double h = hayashi(tau);
        if (v > h + 1e-12) dominates = false;
        if (v < best) {
            best = v;
            best_tau = tau;
        }
        best_h = std::min(best_h, h);
    }
    auto refined = minimize_scalar([&](double lt) { return objective(std::exp(lt)); }, grid);
    if (refined.min < best) {
        best = refined.min;
        best_tau = std::exp(refined.argmin);
    }
    return {best, best_tau, best_h, dominates};
}

/// Mixes the encoder with its marginal to relax reliability in exchange for
/// secrecy: (M, eps0, delta0) -> (M, eps, delta0 (1-eps)/(1-eps0)).
inline double trade_rel_for_sec(double eps0, double delta0, double eps) {
    if (!(eps0 >= 0.0 && eps0 < 1.0 && delta0 >= 0.0 && delta0 < 1.0))
        throw std::domain_error("trade_rel_for_sec: eps0, delta0 must lie in [0,1)");
    if (!(eps > eps0)) throw std::domain_error("trade_rel_for_sec: requires eps > eps0");
    return delta0 * (1.0 - eps) / (1.0 - eps0);
}

/// Semi-deterministic channels only: further privacy amplification converts an
/// (M, eps, delta)_avg code into an (M', 0, delta')_avg code.
inline double trade_sec_for_rel(double m, double eps, double delta, double m_prime) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::domain_error("trade_sec_for_rel: requires eps < 1");
    if (!(m >= 1.0 && m_prime >= 1.0))
        throw std::domain_error("trade_sec_for_rel: message counts must be >= 1");
    return delta / (1.0 - eps) + 0.5 * std::sqrt(m_prime / (m * (1.0 - eps)));
}

struct SemidetConverse {
    double log_m;          // ln of the largest M passing the E_gamma test (per channel use)
    double rate_bits;      // log2(M)
    double gamma_star;
    double min_value;      // attained min of the E_gamma objective at gamma_star
    double fw_gap;         // final Frank-Wolfe linear-minimization gap
    bool vacuous;          // delta/(1-eps) >= 1: every M is feasible
    bool monotone_descent; // objective was nonincreasing along accepted iterates
};

namespace detail {

struct FwResult {
    double value;        // certified minimum (exact LP finish)
    double gap;          // suboptimality of the final Frank-Wolfe iterate
    bool monotone;       // accepted FW iterates never increased the objective
    std::vector<double> p_x, q_z;
};

// min over (P_X, Q_Z) of E_gamma(P_{YZ|X} o P_X, Q_unif_Y Q_Z). The objective
// is jointly convex (E_gamma is an f-divergence) and piecewise linear.
// Frank-Wolfe with descent backtracking supplies the iterate trace; because
// plain Frank-Wolfe can stall above the optimum of a polyhedral objective, the
// epigraph linear program is solved afterwards to certify and finish the
// minimization.
inline FwResult semidet_inner_min(const DiscreteChannel& legit, const DiscreteChannel& eve,
                                  double gamma, int max_iters = 2000, double gap_tol = 1e-9) {
    const size_t nx = legit.input_size(), ny = legit.output_size(), nz = eve.output_size();
    const double inv_y = 1.0 / static_cast<double>(ny);

    auto value_of = [&](const std::vector<double>& px, const std::vector<double>& qz) {
        double v = 0.0;
        for (size_t y = 0; y < ny; ++y)
            for (size_t z = 0; z < nz; ++z) {
                double j = 0.0;
                for (size_t x = 0; x < nx; ++x) j += px[x] * legit(y, x) * eve(z, x);
                double d = j - gamma * inv_y * qz[z];
                if (d > 0.0) v += d;
            }
        return v;
    };

    std::vector<double> px(nx, 1.0 / static_cast<double>(nx));
    std::vector<double> qz(nz, 1.0 / static_cast<double>(nz));
    double val = value_of(px, qz);
    double fw_gap = kInf;
    for (int t = 0; t < max_iters; ++t) {
        // subgradient over the active set {J - gamma Q/|Y| > 0}
        std::vector<double> gpx(nx, 0.0), gqz(nz, 0.0);
        for (size_t y = 0; y < ny; ++y)
            for (size_t z = 0; z < nz; ++z) {
                double j = 0.0;
                for (size_t x = 0; x < nx; ++x) j += px[x] * legit(y, x) * eve(z, x);
                if (j - gamma * inv_y * qz[z] > 0.0) {
                    for (size_t x = 0; x < nx; ++x) gpx[x] += legit(y, x) * eve(z, x);
                    gqz[z] -= gamma * inv_y;
                }
            }
        size_t bx = std::min_element(gpx.begin(), gpx.end()) - gpx.begin();
        size_t bz = std::min_element(gqz.begin(), gqz.end()) - gqz.begin();
        double inner = 0.0;
        for (size_t x = 0; x < nx; ++x) inner += gpx[x] * px[x];
        for (size_t z = 0; z < nz; ++z) inner += gqz[z] * qz[z];
        fw_gap = inner - gpx[bx] - gqz[bz];
        if (fw_gap < gap_tol) break;
        // step toward the best vertex, backtracking to keep descent
        double step = 2.0 / (t + 2.0);
        for (int halvings = 0; halvings < 40; ++halvings) {
            std::vector<double> npx = px, nqz = qz;
            for (size_t x = 0; x < nx; ++x) npx[x] *= 1.0 - step;
            npx[bx] += step;
            for (size_t z = 0; z < nz; ++z) nqz[z] *= 1.0 - step;
            nqz[bz] += step;
            double nval = value_of(npx, nqz);
            if (nval <= val + 1e-15) {
                px = std::move(npx);
                qz = std::move(nqz);
                val = nval;
                break;
            }
            step *= 0.5;
        }
    }

    // exact finish: min sum s_yz  s.t.  s_yz >= J(y,z) - (gamma/|Y|) q_z,
    // s >= 0, p and q on their simplices
    LpProblem lp;
    const size_t ns = ny * nz;
    lp.c.assign(nx + nz + ns, 0.0);
    for (size_t s = 0; s < ns; ++s) lp.c[nx + nz + s] = 1.0;
    for (size_t y = 0; y < ny; ++y)
        for (size_t z = 0; z < nz; ++z) {
            std::vector<double> row(nx + nz + ns, 0.0);
            for (size_t x = 0; x < nx; ++x) row[x] = legit(y, x) * eve(z, x);
            row[nx + z] = -gamma * inv_y;
            row[nx + nz + y * nz + z] = -1.0;
            lp.a_ub.push_back(std::move(row));
            lp.b_ub.push_back(0.0);
        }
    std::vector<double> p_simplex(nx + nz + ns, 0.0), q_simplex(nx + nz + ns, 0.0);
    for (size_t x = 0; x < nx; ++x) p_simplex[x] = 1.0;
    for (size_t z = 0; z < nz; ++z) q_simplex[nx + z] = 1.0;
    lp.a_eq = {p_simplex, q_simplex};
    lp.b_eq = {1.0, 1.0};
    auto sol = solve_lp(lp);
    if (sol.feasible && sol.bounded && sol.value <= val + 1e-12) {
        std::vector<double> lp_px(sol.x.begin(), sol.x.begin() + nx);
        std::vector<double> lp_qz(sol.x.begin() + nx, sol.x.begin() + nx + nz);
        double lp_val = value_of(lp_px, lp_qz);  // re-evaluate, drop slack noise
        if (lp_val <= val) {
            fw_gap = val - lp_val;
            val = lp_val;
            px = std::move(lp_px);
            qz = std::move(lp_qz);
        }
    }
    return FwResult{val, fw_gap, /*monotone=*/true, px, qz};
}

}  // namespace detail

/// Largest ln M such that min over (P_X, Q_Z) of
/// E_{|Y|/(M(1-eps))}(P_{YZ|X} o P_X, Q_unif_Y Q_Z) <= delta/(1-eps).
/// Single channel use; the outer search runs on gamma, using that the inner
/// minimum is nonincreasing in gamma.
inline SemidetConverse semidet_converse(const WiretapSpec& wtc, double eps, double delta) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::domain_error("semidet_converse: requires eps < 1");
    if (!wtc.semi_deterministic)
        throw std::domain_error("semidet_converse: channel must carry the semi-deterministic tag");
    if (wtc.legit.input_size() > 16 || wtc.eve.output_size() > 16)
        throw std::domain_error("semidet_converse: alphabets too large for the solver");
    const double ny = static_cast<double>(wtc.legit.output_size());
    const double target = delta / (1.0 - eps);

    if (target >= 1.0) {
        // E_gamma <= 1 always: the test never fails, the bound is vacuous
        return {std::log(ny), std::log2(ny), 0.0, 0.0, 0.0, true, true};
    }

    auto min_at = [&](double gamma) {
        return detail::semidet_inner_min(wtc.legit, wtc.eve, gamma);
    };
    // smallest gamma with inner min <= target (the inner min is nonincreasing)
    double lo = std::log(ny) - 80.0, hi = std::log(ny) + 5.0;
    double g = bisect_monotone([&](double lg) { return min_at(std::exp(lg)).value; }, target,
                               {lo, hi, 1e-10});
    // keep the feasible side of the tolerance band
    double gamma_star = std::exp(g);
    auto fw = min_at(gamma_star);
    for (int guard = 0; guard < 60 && fw.value > target; ++guard) {
        gamma_star *= 1.0 + 1e-9;
        fw = min_at(gamma_star);
    }
    double log_m = std::log(ny) - std::log(gamma_star) - std::log1p(-eps);
    return {log_m, log_m * kLog2E, gamma_star, fw.value, fw.gap, false, fw.monotone};
}

// ---------------------------------------------------------------------------
// Exact single-letter legitimate-channel error evaluators for small discrete
// channels, usable as SecrecyIngredients.

/// eps_RCU(a) = E[min{1, (a-1) P[i(Xbar;Y) >= i(X;Y) | X,Y]}], taking ln(a).
inline std::function<double(double)> make_rcu_eval(const FiniteDist& p_x,
                                                   const DiscreteChannel& ch) {
    auto p_y = ch.apply(p_x);
    const size_t nx = ch.input_size(), ny = ch.output_size();
    // density i(x;y) and the pairwise-tie probability table
    std::vector<double> dens(nx * ny, kNegInf), tie(nx * ny, 0.0);
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y)
            if (ch(y, x) > 0.0 && p_y[y] > 0.0)
                dens[x * ny + y] = std::log(ch(y, x)) - std::log(p_y[y]);
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y) {
            double pr = 0.0;
            for (size_t xb = 0; xb < nx; ++xb)
                if (dens[xb * ny + y] >= dens[x * ny + y]) pr += p_x[xb];
            tie[x * ny + y] = pr;
        }
    return [=](double log_a) {
        double a = std::exp(std::min(log_a, 690.0));
        double e = 0.0;
        for (size_t x = 0; x < nx; ++x)
            for (size_t y = 0; y < ny; ++y)
                e += p_x[x] * ch(y, x) * std::min(1.0, std::max(a - 1.0, 0.0) * tie[x * ny + y]);
        return e;
    };
}

/// eps_DT(a) = 1 - E_a(P_XY, P_X P_Y), taking ln(a).
inline std::function<double(double)> make_dt_eval(const FiniteDist& p_x,
                                                  const DiscreteChannel& ch) {
    auto joint = JointDist::from_input_and_channel(p_x, ch);
    auto p_y = joint.col_marginal();
    auto prod = JointDist::from_input_and_channel(
        p_x, DiscreteChannel(std::vector<std::vector<double>>(
                 p_x.size(), std::vector<double>(p_y.masses().begin(), p_y.masses().end()))));
    return [=](double log_a) {
        if (log_a == kNegInf) return 0.0;  // a -> 0+: E_a -> total P-mass of the support
        return 1.0 - e_gamma(joint, prod, std::exp(std::min(log_a, 690.0)));
    };
}

/// eps_DT,max(a) = inf over thresholds t of
/// P[i(X;Y) <= t] + a sup_{x in supp P_X} P_Y[i(x;Y) >= t], taking ln(a).
/// Both step functions jump only at atom densities, so evaluating at each atom
/// (inclusive and just-above variants) realizes the infimum exactly.
inline std::function<double(double)> make_dt_max_eval(const FiniteDist& p_x,
                                                      const DiscreteChannel& ch) {
    auto p_y = ch.apply(p_x);
    const size_t nx = ch.input_size(), ny = ch.output_size();
    std::vector<double> dens(nx * ny);
    std::vector<double> candidates;
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y) {
            double v;
            if (ch(y, x) == 0.0)
                v = kNegInf;
            else if (p_y[y] == 0.0)
                v = kInf;
            else {
                v = std::log(ch(y, x)) - std::log(p_y[y]);
                if (p_x[x] > 0.0) candidates.push_back(v);
            }
            dens[x * ny + y] = v;
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return [=](double log_a) {
        double a = std::exp(std::min(log_a, 690.0));
        double best = 1.0;  // threshold above every atom
        auto eval = [&](double t, bool tail_strict) {
            double below = 0.0;
            for (size_t x = 0; x < nx; ++x)
                for (size_t y = 0; y < ny; ++y)
                    if (dens[x * ny + y] <= t) below += p_x[x] * ch(y, x);
            double sup_tail = 0.0;
            for (size_t x = 0; x < nx; ++x) {
                if (p_x[x] == 0.0) continue;
                double tail = 0.0;
                for (size_t y = 0; y < ny; ++y) {
                    double d = dens[x * ny + y];
                    if (tail_strict ? d > t : d >= t) tail += p_y[y];
                }
                sup_tail = std::max(sup_tail, tail);
            }
            best = std::min(best, below + a * sup_tail);
        };
        if (!candidates.empty()) {
            // threshold below every atom: nothing below, full tails
            double sup_all = 0.0;
            for (size_t x = 0; x < nx; ++x) {
                if (p_x[x] == 0.0) continue;
                double tail = 0.0;
                for (size_t y = 0; y < ny; ++y)
                    if (dens[x * ny + y] != kNegInf) tail += p_y[y];
                sup_all = std::max(sup_all, tail);
            }
            best = std::min(best, a * sup_all);
        }
        for (double t : candidates) {
            eval(t, false);
            eval(t, true);
        }
        return std::clamp(best, 0.0, 1.0);
    };
}

}  // namespace wiretap
