#pragma once

// Blocklength sweeps over the selected bounds, emitted as CSV or JSON rows.
// One row per (n, bound kind); byte-identical output for identical requests
// and seeds.

#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wiretap/bsc.hpp"
#include "wiretap/gaussian.hpp"
#include "wiretap/io.hpp"
#include "wiretap/secondorder.hpp"

namespace wiretap {

struct SweepRequest {
    ChannelDocument channel;
    long long n_min = 0;
    long long n_max = 0;
    long long n_step = 1;
    double eps = 0.0;
    double delta = 0.0;
    BscWtcParams::Metric metric = BscWtcParams::Metric::kAvg;
    std::set<std::string> bounds;  // subset of {ach, conv, approx, hayashi}
    McConfig mc;                   // gaussian only
    std::string out_path;          // empty: stdout only
    enum class Format { kCsv, kJson } format = Format::kCsv;
};

struct BoundPoint {
    long long n = 0;
    std::string kind;
    double rate_bits = 0.0;
    std::optional<double> ln_gamma_star;
    std::optional<double> tau_star;
    std::optional<long long> k_star;
    std::optional<double> mc_halfwidth;
    std::string flags;
};

struct SweepOutcome {
    std::vector<BoundPoint> points;
    bool all_infeasible = false;
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline void append_flag(std::string& flags, const std::string& f) {
    if (!flags.empty()) flags += ';';
    flags += f;
}

}  // namespace detail

inline void validate_request(const SweepRequest& req) {
    if (req.bounds.empty()) throw std::domain_error("sweep: empty bounds set");
    static const std::set<std::string> known = {"ach", "conv", "approx", "hayashi"};
    for (const auto& b : req.bounds)
        if (!known.count(b)) throw std::domain_error("sweep: unknown bound kind '" + b + "'");
    if (req.n_min < 1 || req.n_min > req.n_max)
        throw std::domain_error("sweep: need 1 <= n_min <= n_max");
    if (req.n_step < 1) throw std::domain_error("sweep: n_step must be >= 1");
    if (!(req.eps >= 0.0 && req.eps < 1.0 && req.delta >= 0.0 && req.delta <= 1.0))
        throw std::domain_error("sweep: eps in [0,1), delta in [0,1]");
    if (req.channel.kind == "dmc") {
        for (const auto& b : req.bounds)
            if (b != "approx")
                throw std::domain_error(
                    "sweep: dmc channels support only the 'approx' bounds (nonasymptotic "
                    "bounds need per-channel symmetry reductions)");
    }
}

inline SweepOutcome run_sweep_points(const SweepRequest& req) {
    validate_request(req);
    const bool sc_fails = req.eps + req.delta >= 1.0;
    std::vector<BoundPoint> points;

    auto flag_regime = [&](BoundPoint& pt) {
        if (sc_fails) detail::append_flag(pt.flags, "strong_converse_fails");
    };

    std::optional<DispersionReport> dmc_report;
    if (req.channel.kind == "dmc")
        dmc_report = optimize_secrecy_capacity(*req.channel.dmc);

    for (long long n = req.n_min; n <= req.n_max; n += req.n_step) {
        if (req.channel.kind == "bsc") {
            BscWiretap w(n, req.channel.bsc_p);
            for (const auto& b : req.bounds) {
                BoundPoint pt;
                pt.n = n;
                pt.kind = b;
                if (b == "ach") {
                    auto r = w.ach_rate(req.eps, req.delta, req.metric);
                    pt.rate_bits = r.rate_bits;
                    pt.ln_gamma_star = r.ln_gamma_star;
                    pt.k_star = r.k_star;
                    if (!r.feasible) detail::append_flag(pt.flags, "infeasible");
                    if (!r.monotone_ok) detail::append_flag(pt.flags, "nonmonotone_k_scan");
                } else if (b == "conv") {
                    auto r = w.converse_rate(req.eps, req.delta);
                    pt.rate_bits = r.rate_bits;
                    pt.ln_gamma_star = r.ln_gamma_star;
                    pt.k_star = r.k_star;
                    if (!r.feasible) detail::append_flag(pt.flags, "infeasible");
                    if (r.vacuous) detail::append_flag(pt.flags, "vacuous");
                } else if (b == "approx") {
                    if (req.eps + req.delta < 1.0 && req.delta > 0.0) {
                        pt.rate_bits = w.approx_rate(req.eps, req.delta);
                    } else {
                        pt.rate_bits = 0.0;
                        detail::append_flag(pt.flags, "infeasible");
                    }
                } else {  // hayashi
                    if (req.eps + req.delta < 1.0) {
                        auto r = w.bht_converse_rate(req.eps, req.delta);
                        pt.rate_bits = r.rate_bits_hayashi;
                        pt.tau_star = r.tau_star;
                    } else {
                        pt.rate_bits = 0.0;
                        detail::append_flag(pt.flags, "infeasible");
                    }
                }
                flag_regime(pt);
                points.push_back(std::move(pt));
            }
        } else if (req.channel.kind == "gaussian") {
            const auto& gp = *req.channel.gaussian;
            for (const auto& b : req.bounds) {
                if (b == "approx") {
                    if (req.eps + req.delta < 1.0 && req.eps > 0.0 && req.delta > 0.0) {
                        auto r = gaussian_approx(gp, n, req.eps, req.delta);
                        BoundPoint a;
                        a.n = n;
                        a.kind = "approx_ach";
                        a.rate_bits = r.ach_rate_bits;
                        BoundPoint c;
                        c.n = n;
                        c.kind = "approx_conv";
                        c.rate_bits = r.conv_rate_bits;
                        flag_regime(a);
                        flag_regime(c);
                        points.push_back(std::move(a));
                        points.push_back(std::move(c));
                    } else {
                        BoundPoint pt;
                        pt.n = n;
                        pt.kind = "approx_ach";
                        detail::append_flag(pt.flags, "infeasible");
                        flag_regime(pt);
                        points.push_back(std::move(pt));
                    }
                    continue;
                }
                BoundPoint pt;
                pt.n = n;
                pt.kind = b;
                if (b == "ach") {
                    auto r = mc_achievability(gp, n, req.eps, req.delta, req.mc);
                    pt.rate_bits = r.rate_bits;
                    pt.mc_halfwidth = r.halfwidth_bits;
                    pt.ln_gamma_star = r.ln_gamma_star;
                    if (!r.feasible) detail::append_flag(pt.flags, "infeasible");
                } else if (b == "conv" || b == "hayashi") {
                    if (req.eps + req.delta < 1.0) {
                        auto r = mc_beta_converse(gp, n, req.eps, req.delta, req.mc);
                        pt.rate_bits = b == "conv" ? r.rate_bits : r.rate_bits_hayashi;
                        pt.mc_halfwidth = r.halfwidth_bits;
                        pt.tau_star = r.tau_star;
                    } else {
                        pt.rate_bits = 0.0;
                        detail::append_flag(pt.flags, "infeasible");
                    }
                }
                flag_regime(pt);
                points.push_back(std::move(pt));
            }
        } else {  // dmc: approx expansions only
            const auto& wtc = *req.channel.dmc;
            if (req.eps > 0.0 && req.delta > 0.0 && req.eps < 1.0 && req.delta < 1.0) {
                auto r = dmwtc_expansion(wtc, *dmc_report, n, req.eps, req.delta);
                BoundPoint a;
                a.n = n;
                a.kind = "approx_ach";
                a.rate_bits = r.ach_rate_bits;
                if (r.qinv_clamped) detail::append_flag(a.flags, "qinv_clamped");
                flag_regime(a);
                points.push_back(std::move(a));
                if (r.strong_converse_regime) {
                    BoundPoint c;
                    c.n = n;
                    c.kind = "approx_conv";
                    c.rate_bits = r.conv_rate_bits;
                    flag_regime(c);
                    points.push_back(std::move(c));
                }
            }
            if (wtc.semi_deterministic && req.eps + req.delta < 1.0 && req.delta > 0.0) {
                BoundPoint s;
                s.n = n;
                s.kind = "approx";
                s.rate_bits = semidet_expansion(wtc, *dmc_report, n, req.eps, req.delta);
                points.push_back(std::move(s));
            }
        }
    }

    std::sort(points.begin(), points.end(), [](const BoundPoint& a, const BoundPoint& b) {
        return a.n != b.n ? a.n < b.n : a.kind < b.kind;
    });

    // cross-row sanity: an achievability above the matching converse at the
    // same n indicates a solver bug, not a tolerance issue
    for (const auto& a : points) {
        if (a.kind != "ach" || !a.flags.empty()) continue;
        for (const auto& c : points) {
            if (c.n != a.n || c.kind != "conv" || !c.flags.empty()) continue;
            double slack = 3.0 * (a.mc_halfwidth.value_or(0.0) + c.mc_halfwidth.value_or(0.0));
            if (a.rate_bits > c.rate_bits + slack + 1e-12)
                throw std::runtime_error(
                    "sweep: achievability " + detail::format_double(a.rate_bits) +
                    " exceeds converse " + detail::format_double(c.rate_bits) + " at n=" +
                    std::to_string(a.n));
        }
    }

    bool all_bad = !points.empty();
    for (const auto& p : points)
        if (p.flags.find("infeasible") == std::string::npos &&
            p.flags.find("vacuous") == std::string::npos)
            all_bad = false;
    return {std::move(points), all_bad};
}

inline std::string render_csv(const std::vector<BoundPoint>& points) {
    std::ostringstream os;
    os << "n,kind,rate_bits,gamma_star,tau_star,k_star,mc_halfwidth,flags\n";
    for (const auto& p : points) {
        os << p.n << ',' << p.kind << ',' << detail::format_double(p.rate_bits) << ',';
        if (p.ln_gamma_star) os << detail::format_double(*p.ln_gamma_star);
        os << ',';
        if (p.tau_star) os << detail::format_double(*p.tau_star);
        os << ',';
        if (p.k_star) os << *p.k_star;
        os << ',';
        if (p.mc_halfwidth) os << detail::format_double(*p.mc_halfwidth);
        os << ',' << p.flags << '\n';
    }
    return os.str();
}

inline std::string render_json(const std::vector<BoundPoint>& points) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : points) {
        nlohmann::json row;
        row["n"] = p.n;
        row["kind"] = p.kind;
        row["rate_bits"] = p.rate_bits;
        if (p.ln_gamma_star) row["gamma_star"] = *p.ln_gamma_star;
        if (p.tau_star) row["tau_star"] = *p.tau_star;
        if (p.k_star) row["k_star"] = *p.k_star;
        if (p.mc_halfwidth) row["mc_halfwidth"] = *p.mc_halfwidth;
        row["flags"] = p.flags;
        rows.push_back(std::move(row));
    }
    return rows.dump(2) + "\n";
}

/// Runs the sweep and writes the result to the requested destination.
/// Returns the emitted points.
inline SweepOutcome run_sweep(const SweepRequest& req) {
    auto outcome = run_sweep_points(req);
    std::string body = req.format == SweepRequest::Format::kCsv
                           ? render_csv(outcome.points)
                           : render_json(outcome.points);
    if (!req.out_path.empty()) {
        std::ofstream out(req.out_path, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot open output file " + req.out_path);
        out << body;
        if (!out) throw std::ios_base::failure("write failed for " + req.out_path);
    }
    return outcome;
}

}  // namespace wiretap
