#pragma once

// Second-order quantities for discrete memoryless wiretap channels: mutual
// informations and dispersions, secrecy-capacity optimizations over the input
// simplex, and the sqrt(V/n) expansions. Everything is computed in nats and
// converted to bits at the interface.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "wiretap/numerics.hpp"
#include "wiretap/prob.hpp"
#include "wiretap/wiretap_spec.hpp"

namespace wiretap {

struct InfoDispersion {
    double info_bits;
    double dispersion_bits2;
};

/// I(P, W) and the conditional information variance V(P, W), in bits.
inline InfoDispersion mutual_info_and_dispersion(const FiniteDist& p, const DiscreteChannel& w) {
    if (p.size() != w.input_size())
        throw std::domain_error("mutual_info_and_dispersion: alphabet mismatch");
    auto out = w.apply(p);
    double info = 0.0, var = 0.0;
    for (size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        double d = 0.0, d2 = 0.0;
        for (size_t y = 0; y < w.output_size(); ++y) {
            double wy = w(y, x);
            if (wy == 0.0) continue;
            double dens = std::log(wy) - std::log(out[y]);
            d += wy * dens;
            d2 += wy * dens * dens;
        }
        info += p[x] * d;
        var += p[x] * (d2 - d * d);
    }
    return {info * kLog2E, std::max(var, 0.0) * kLog2E * kLog2E};
}

namespace detail {

// joint over (x, (y,z)) using the conditionally independent coupling
inline std::vector<double> default_coupling(const WiretapSpec& wtc) {
    const size_t nx = wtc.legit.input_size(), ny = wtc.legit.output_size(),
                 nz = wtc.eve.output_size();
    std::vector<double> a(nx * ny * nz);
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y)
            for (size_t z = 0; z < nz; ++z)
                a[(x * ny + y) * nz + z] = wtc.legit(y, x) * wtc.eve(z, x);
    return a;
}

}  // namespace detail

/// I(X;Y|Z) and its dispersion for an explicit coupling P_{YZ|X}, flattened
/// row-major as coupling[(x*ny + y)*nz + z].
inline InfoDispersion conditional_info_and_dispersion(const FiniteDist& p,
                                                      std::span<const double> coupling, size_t ny,
                                                      size_t nz) {
    const size_t nx = p.size();
    if (coupling.size() != nx * ny * nz)
        throw std::domain_error("conditional_info_and_dispersion: coupling shape mismatch");
    // induced P_{YZ}, P_Z and P_{Y|Z}
    std::vector<double> p_yz(ny * nz, 0.0), p_z(nz, 0.0);
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y)
            for (size_t z = 0; z < nz; ++z) {
                double m = p[x] * coupling[(x * ny + y) * nz + z];
                p_yz[y * nz + z] += m;
                p_z[z] += m;
            }
    double info = 0.0, var = 0.0;
    std::vector<double> pzx(nz);
    for (size_t x = 0; x < nx; ++x) {
        if (p[x] == 0.0) continue;
        // marginal eavesdropper channel P_{Z|X=x} under this coupling
        for (size_t z = 0; z < nz; ++z) {
            pzx[z] = 0.0;
            for (size_t y = 0; y < ny; ++y) pzx[z] += coupling[(x * ny + y) * nz + z];
        }
        double d = 0.0, d2 = 0.0;
        for (size_t y = 0; y < ny; ++y)
            for (size_t z = 0; z < nz; ++z) {
                double w = coupling[(x * ny + y) * nz + z];
                if (w == 0.0) continue;
                double p_y_given_z = p_yz[y * nz + z] / p_z[z];
                double dens = std::log(w) - std::log(pzx[z]) - std::log(p_y_given_z);
                d += w * dens;
                d2 += w * dens * dens;
            }
        info += p[x] * d;
        var += p[x] * (d2 - d * d);
    }
    return {info * kLog2E, std::max(var, 0.0) * kLog2E * kLog2E};
}

inline InfoDispersion conditional_info_and_dispersion(const FiniteDist& p,
                                                      const WiretapSpec& wtc) {
    auto coupling = detail::default_coupling(wtc);
    return conditional_info_and_dispersion(p, coupling, wtc.legit.output_size(),
                                           wtc.eve.output_size());
}

struct DispersionReport {
    double c_s_bits;        // secrecy capacity with the V = X restriction
    double c_s_upper_bits;  // max_P I(X;Y|Z)
    double v1_bits2;
    double v2_bits2;
    double vc_bits2;
    double v_s_bits2;       // semi-deterministic dispersion V(P_Y*, P_{Z|Y}*), else 0
    FiniteDist optimizer_p;         // argmax of the V = X secrecy rate
    FiniteDist optimizer_p_upper;   // argmax of I(X;Y|Z)
    double multi_start_spread;      // best minus 10th-best start, V = X objective
    bool non_unique_warning;
    bool coupling_is_conditional_product;
};

namespace detail {

// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    int rho = -1;
    for (size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i);
            theta = t;
        }
    }
    (void)rho;
    double s = 0.0;
    for (double& x : v) {
        x = std::max(x - theta, 0.0);
        s += x;
    }
    for (double& x : v) x /= s;
}

struct AscentResult {
    std::vector<double> p;
    double value;
};

// Projected gradient ascent with backtracking from a given start.
inline AscentResult ascend(const std::function<double(const std::vector<double>&)>& f,
                           const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                           std::vector<double> p, int max_iters = 400) {
    double val = f(p);
    for (int it = 0; it < max_iters; ++it) {
        auto g = grad(p);
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            std::vector<double> q = p;
            for (size_t i = 0; i < q.size(); ++i) q[i] += step * g[i];
            project_simplex(q);
            double nv = f(q);
            if (nv > val + 1e-14) {
                p = std::move(q);
                val = nv;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return {p, val};
}

}  // namespace detail

/// Secrecy capacities and dispersions of a wiretap channel. The V = X
/// restriction of the capacity formula and the I(X;Y|Z) upper bound are both
/// maximized by Dirichlet multi-start projected gradient ascent. The
/// conditional quantities default to the conditionally independent coupling
/// P_{YZ|X} = P_{Y|X} P_{Z|X}; callers holding a physical joint channel can
/// pass it explicitly (the bounds depend only on marginals, so any consistent
/// coupling is legitimate, but the value of I(X;Y|Z) is coupling-dependent).
inline DispersionReport optimize_secrecy_capacity(const WiretapSpec& wtc, int starts = 2000,
                                                  uint64_t seed = 0x5eed,
                                                  std::span<const double> coupling = {}) {
    const size_t nx = wtc.legit.input_size();
    if (nx > 8) throw std::domain_error("optimize_secrecy_capacity: |X| > 8 unsupported");
    std::vector<double> coupling_store;
    if (coupling.empty()) {
        coupling_store = detail::default_coupling(wtc);
        coupling = coupling_store;
    } else if (coupling.size() !=
               nx * wtc.legit.output_size() * wtc.eve.output_size()) {
        throw std::domain_error("optimize_secrecy_capacity: coupling shape mismatch");
    }
    const bool product_coupling = !coupling_store.empty();

    auto to_dist = [](const std::vector<double>& v) { return FiniteDist::normalized(v); };

    // V = X objective: I(P, legit) - I(P, eve), gradient via the per-row
    // divergences (the additive constants cancel under projection)
    auto f_vx = [&](const std::vector<double>& v) {
        auto p = to_dist(v);
        return mutual_info_and_dispersion(p, wtc.legit).info_bits -
               mutual_info_and_dispersion(p, wtc.eve).info_bits;
    };
    auto grad_vx = [&](const std::vector<double>& v) {
        auto p = to_dist(v);
        auto out1 = wtc.legit.apply(p);
        auto out2 = wtc.eve.apply(p);
        std::vector<double> g(nx, 0.0);
        for (size_t x = 0; x < nx; ++x) {
            double d1 = 0.0, d2 = 0.0;
            for (size_t y = 0; y < wtc.legit.output_size(); ++y)
                if (wtc.legit(y, x) > 0.0)
                    d1 += wtc.legit(y, x) * (std::log(wtc.legit(y, x)) - std::log(out1[y]));
            for (size_t z = 0; z < wtc.eve.output_size(); ++z)
                if (wtc.eve(z, x) > 0.0)
                    d2 += wtc.eve(z, x) * (std::log(wtc.eve(z, x)) - std::log(out2[z]));
            g[x] = (d1 - d2) * kLog2E;
        }
        return g;
    };

    // upper-bound objective I(X;Y|Z), ascended with a numerical gradient on
    // the normalized extension
    auto f_up = [&](const std::vector<double>& v) {
        return conditional_info_and_dispersion(to_dist(v), coupling, wtc.legit.output_size(),
                                               wtc.eve.output_size())
            .info_bits;
    };
    auto grad_up = [&](const std::vector<double>& v) {
        std::vector<double> g(nx);
        const double h = 1e-7;
        for (size_t x = 0; x < nx; ++x) {
            std::vector<double> a = v, b = v;
            a[x] += h;
            b[x] = std::max(b[x] - h, 0.0);
            double den = a[x] - b[x];
            g[x] = den > 0.0 ? (f_up(a) - f_up(b)) / den : 0.0;
        }
        return g;
    };

    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> unit_gamma(1.0, 1.0);
    auto dirichlet = [&]() {
        std::vector<double> v(nx);
        double s = 0.0;
        for (double& x : v) {
            x = unit_gamma(rng);
            s += x;
        }
        for (double& x : v) x /= s;
        return v;
    };

    std::vector<double> values;
    detail::AscentResult best_vx{std::vector<double>(nx, 1.0 / nx), -kInf};
    std::vector<std::vector<double>> top_points;
    for (int s = 0; s < starts; ++s) {
        auto r = detail::ascend(f_vx, grad_vx, s == 0 ? std::vector<double>(nx, 1.0 / nx)
                                                      : dirichlet());
        values.push_back(r.value);
        top_points.push_back(r.p);
        if (r.value > best_vx.value) best_vx = r;
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    double spread = values.size() >= 10 ? values[0] - values[9] : 0.0;

    // distant optimizers with near-equal values indicate non-uniqueness
    bool non_unique = false;
    for (const auto& pt : top_points) {
        double fv = f_vx(pt);
        if (best_vx.value - fv < 1e-8) {
            double dist = 0.0;
            for (size_t i = 0; i < nx; ++i) dist += std::abs(pt[i] - best_vx.p[i]);
            if (dist > 1e-3) non_unique = true;
        }
    }

    detail::AscentResult best_up{std::vector<double>(nx, 1.0 / nx), -kInf};
    for (int s = 0; s < std::max(starts / 10, 20); ++s) {
        auto r = detail::ascend(f_up, grad_up, s == 0 ? std::vector<double>(nx, 1.0 / nx)
                                                      : dirichlet());
        if (r.value > best_up.value) best_up = r;
    }

    auto p_star = FiniteDist::normalized(best_vx.p);
    auto p_up = FiniteDist::normalized(best_up.p);
    double c_s = best_vx.value;
    double c_s_upper = best_up.value;

    double v1 = mutual_info_and_dispersion(p_star, wtc.legit).dispersion_bits2;
    double v2 = mutual_info_and_dispersion(p_star, wtc.eve).dispersion_bits2;
    double vc = conditional_info_and_dispersion(p_up, coupling, wtc.legit.output_size(),
                                                wtc.eve.output_size())
                    .dispersion_bits2;

    double v_s = 0.0;
    if (wtc.semi_deterministic) {
        // the capacity is max_P H(Y|Z) = max_P I(X;Y|Z); by V = Y the
        // dispersion is that of the induced channel P_{Z|Y} at P_Y*
        c_s = c_s_upper;
        p_star = p_up;
        auto f = wtc.deterministic_map();
        const size_t ny = wtc.legit.output_size(), nz = wtc.eve.output_size();
        std::vector<double> py(ny, 0.0);
        std::vector<std::vector<double>> pzy(ny, std::vector<double>(nz, 0.0));
        for (size_t x = 0; x < nx; ++x) {
            py[f[x]] += p_up[x];
            for (size_t z = 0; z < nz; ++z) pzy[f[x]][z] += p_up[x] * wtc.eve(z, x);
        }
        std::vector<std::vector<double>> rows(ny, std::vector<double>(nz, 1.0 / nz));
        for (size_t y = 0; y < ny; ++y)
            if (py[y] > 0.0)
                for (size_t z = 0; z < nz; ++z) rows[y][z] = pzy[y][z] / py[y];
        auto p_y_dist = FiniteDist::normalized(py);
        v_s = mutual_info_and_dispersion(p_y_dist, DiscreteChannel(rows)).dispersion_bits2;
    }

    return {c_s,  c_s_upper, v1,  v2, vc, v_s, p_star, p_up, spread,
            non_unique, product_coupling};
}

struct ExpansionResult {
    double ach_rate_bits;
    double conv_rate_bits;        // meaningful only when eps + delta < 1
    bool strong_converse_regime;  // eps + delta < 1
    bool qinv_clamped;            // a Q^{-1} argument had to be pulled off {0,1}
};

namespace detail {

inline double clamped_q_inv(double p, bool& flag) {
    if (p <= 0.0 || p >= 1.0) {
        flag = true;
        p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    }
    return q_inv(p);
}

}  // namespace detail

/// sqrt(V/n) expansions for a general DM-WTC. For eps + delta < 1 both the
/// achievability and converse forms apply; beyond that threshold the strong
/// converse fails and only the legitimate-channel achievability expansion
/// remains.
inline ExpansionResult dmwtc_expansion(const WiretapSpec& wtc, const DispersionReport& rep,
                                       long long n, double eps, double delta) {
    if (!(n >= 1)) throw std::domain_error("dmwtc_expansion: blocklength must be positive");
    if (!(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0))
        throw std::domain_error("dmwtc_expansion: eps, delta must lie in (0,1)");
    bool clamped = false;
    double sn = std::sqrt(static_cast<double>(n));
    if (eps + delta < 1.0) {
        double ach = rep.c_s_bits - std::sqrt(rep.v1_bits2) / sn * q_inv(eps) -
                     std::sqrt(rep.v2_bits2) / sn * q_inv(delta);
        double conv = rep.c_s_upper_bits -
                      std::sqrt(rep.vc_bits2) / sn * detail::clamped_q_inv(eps + delta, clamped);
        return {ach, conv, true, clamped};
    }
    // strong converse fails: communicate over the legitimate channel alone at
    // relaxed error (eps + delta - 1)/delta. A single-output eavesdropper
    // turns the capacity optimizer into a plain channel-capacity search.
    auto opt = optimize_secrecy_capacity(
        WiretapSpec(wtc.legit, DiscreteChannel(std::vector<std::vector<double>>(
                                   wtc.legit.input_size(), std::vector<double>(1, 1.0)))),
        200);
    auto ld = mutual_info_and_dispersion(opt.optimizer_p, wtc.legit);
    double arg = (eps + delta - 1.0) / delta;
    double ach = ld.info_bits -
                 std::sqrt(ld.dispersion_bits2) / sn * detail::clamped_q_inv(arg, clamped);
    return {ach, kInf, false, clamped};
}

/// Exact second-order rate of a semi-deterministic DM-WTC:
/// C_S - sqrt(V_S/n) Qinv(delta/(1-eps)).
inline double semidet_expansion(const WiretapSpec& wtc, const DispersionReport& rep, long long n,
                                double eps, double delta) {
    if (!wtc.semi_deterministic)
        throw std::domain_error("semidet_expansion: requires the semi-deterministic tag");
    if (!(eps >= 0.0 && delta > 0.0 && eps + delta < 1.0))
        throw std::domain_error("semidet_expansion: requires eps + delta < 1");
    return rep.c_s_bits -
           std::sqrt(rep.v_s_bits2 / static_cast<double>(n)) * q_inv(delta / (1.0 - eps));
}

}  // namespace wiretap
