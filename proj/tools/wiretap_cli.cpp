// Command-line front end: channel ingestion, blocklength sweeps over the
// secrecy bounds, and spec validation. Rates are emitted in bits per channel
// use; gamma diagnostics are natural logs.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "wiretap/io.hpp"
#include "wiretap/pa.hpp"
#include "wiretap/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

std::set<std::string> parse_bounds(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.insert(item);
    }
    return out;
}

struct SweepCliOptions {
    long long n_min = 0, n_max = 0, n_step = 1;
    double eps = 1e-3, delta = 1e-3;
    std::string metric = "avg";
    std::string bounds = "ach,conv";
    std::string out;
    std::string format = "csv";
};

void add_sweep_options(CLI::App* cmd, SweepCliOptions& o) {
    cmd->add_option("--n-min", o.n_min, "smallest blocklength")->required();
    cmd->add_option("--n-max", o.n_max, "largest blocklength")->required();
    cmd->add_option("--n-step", o.n_step, "blocklength step")->capture_default_str();
    cmd->add_option("--eps", o.eps, "error probability constraint")->capture_default_str();
    cmd->add_option("--delta", o.delta, "information leakage constraint")->capture_default_str();
    cmd->add_option("--metric", o.metric, "avg or max")->capture_default_str()
        ->check(CLI::IsMember({"avg", "max"}));
    cmd->add_option("--bounds", o.bounds, "comma list from {ach,conv,approx,hayashi}")->capture_default_str();
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "csv or json")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
}

int finish_sweep(wiretap::SweepRequest& req, const SweepCliOptions& o) {
    req.n_min = o.n_min;
    req.n_max = o.n_max;
    req.n_step = o.n_step;
    req.eps = o.eps;
    req.delta = o.delta;
    req.metric = o.metric == "max" ? wiretap::BscWtcParams::Metric::kMax
                                   : wiretap::BscWtcParams::Metric::kAvg;
    req.bounds = parse_bounds(o.bounds);
    req.out_path = o.out;
    req.format = o.format == "json" ? wiretap::SweepRequest::Format::kJson
                                    : wiretap::SweepRequest::Format::kCsv;
    auto outcome = wiretap::run_sweep(req);
    if (req.out_path.empty()) {
        std::cout << (req.format == wiretap::SweepRequest::Format::kCsv
                          ? wiretap::render_csv(outcome.points)
                          : wiretap::render_json(outcome.points));
    }
    return outcome.all_infeasible ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonasymptotic wiretap channel secrecy bounds"};
    app.require_subcommand(1);

    // bsc
    auto* bsc_cmd = app.add_subcommand("bsc", "binary symmetric wiretap channel sweep");
    double bsc_p = 0.11;
    SweepCliOptions bsc_opts;
    bsc_cmd->add_option("--p", bsc_p, "crossover probability")->capture_default_str();
    add_sweep_options(bsc_cmd, bsc_opts);

    // gaussian
    auto* g_cmd = app.add_subcommand("gaussian", "Gaussian wiretap channel sweep");
    double snr_legit = 3.0, snr_eve = -3.0;
    SweepCliOptions g_opts;
    uint64_t samples = 1000000;
    std::optional<uint64_t> seed;
    int workers = 1;
    g_cmd->add_option("--snr-legit-db", snr_legit, "legitimate SNR in dB")->capture_default_str();
    g_cmd->add_option("--snr-eve-db", snr_eve, "eavesdropper SNR in dB")->capture_default_str();
    g_cmd->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
    auto* seed_opt = g_cmd->add_option("--seed", seed, "Monte Carlo seed (required for MC bounds)");
    g_cmd->add_option("--workers", workers, "sampler threads")->capture_default_str();
    add_sweep_options(g_cmd, g_opts);

    // dmc
    auto* dmc_cmd = app.add_subcommand("dmc", "discrete memoryless wiretap channel expansions");
    std::string dmc_spec;
    SweepCliOptions dmc_opts;
    dmc_opts.bounds = "approx";
    dmc_cmd->add_option("--spec", dmc_spec, "channel spec JSON file")->required();
    add_sweep_options(dmc_cmd, dmc_opts);

    // pa
    auto* pa_cmd = app.add_subcommand("pa", "privacy amplification bounds for a joint");
    std::string pa_spec, pa_out;
    size_t key_size = 2;
    bool pa_oracle = false;
    pa_cmd->add_option("--spec", pa_spec, "JSON file with a p_xz matrix")->required();
    pa_cmd->add_option("--key-size", key_size, "key alphabet size")->capture_default_str();
    pa_cmd->add_flag("--oracle", pa_oracle, "also enumerate balanced hashes exhaustively");
    pa_cmd->add_option("--out", pa_out, "output path (default stdout)");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "validate a channel spec file");
    std::string val_path;
    val_cmd->add_option("--spec", val_path, "spec JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (bsc_cmd->parsed()) {
            wiretap::SweepRequest req;
            req.channel.kind = "bsc";
            req.channel.bsc_p = bsc_p;
            if (!(bsc_p > 0.0 && bsc_p < 0.5)) throw std::domain_error("bsc: p outside (0, 1/2)");
            return finish_sweep(req, bsc_opts);
        }
        if (g_cmd->parsed()) {
            wiretap::SweepRequest req;
            req.channel.kind = "gaussian";
            req.channel.gaussian = wiretap::GaussianWiretapParams::from_snr_db(snr_legit, snr_eve);
            auto bounds = parse_bounds(g_opts.bounds);
            bool needs_mc = bounds.count("ach") || bounds.count("conv") || bounds.count("hayashi");
            if (needs_mc && seed_opt->count() == 0)
                throw std::domain_error("gaussian: --seed is required for Monte Carlo bounds");
            req.mc.samples = samples;
            req.mc.seed = seed.value_or(0);
            req.mc.workers = workers;
            return finish_sweep(req, g_opts);
        }
        if (dmc_cmd->parsed()) {
            auto report = wiretap::validate_spec(dmc_spec);
            if (!report.ok) {
                for (const auto& issue : report.issues) std::cerr << issue.message << '\n';
                return kExitValidation;
            }
            std::ifstream in(dmc_spec);
            auto doc = nlohmann::json::parse(in);
            wiretap::SweepRequest req;
            req.channel = wiretap::channel_from_document(doc);
            if (req.channel.kind != "dmc")
                throw std::domain_error("dmc: spec file does not describe a dmc channel");
            return finish_sweep(req, dmc_opts);
        }
        if (pa_cmd->parsed()) {
            std::ifstream in(pa_spec);
            if (!in) throw std::ios_base::failure("cannot open " + pa_spec);
            auto doc = nlohmann::json::parse(in);
            std::vector<double> flat;
            size_t rows = 0, cols = 0;
            for (const auto& row : doc.at("p_xz")) {
                ++rows;
                size_t c = 0;
                for (const auto& v : row) {
                    flat.push_back(v.get<double>());
                    ++c;
                }
                cols = c;
            }
            wiretap::JointDist joint(flat, rows, cols);
            wiretap::PABoundInputs inputs(joint, key_size, joint.col_marginal());

            auto grid = wiretap::log_gamma_grid(-30.0, 30.0, 512);
            auto avg_min = wiretap::minimize_scalar(
                [&](double lg) { return wiretap::pa_avg_bound(inputs, std::exp(lg)).total; },
                grid);
            std::ostringstream os;
            os << "record,value,ln_gamma_star\n";
            os << "pa_avg_bound_min," << wiretap::detail::format_double(avg_min.min) << ','
               << wiretap::detail::format_double(avg_min.argmin) << '\n';
            bool balanced = rows % key_size == 0;
            if (balanced) {
                try {
                    auto max_min = wiretap::minimize_scalar(
                        [&](double lg) {
                            return wiretap::pa_max_bound(inputs, std::exp(lg)).total;
                        },
                        grid);
                    os << "pa_max_bound_min," << wiretap::detail::format_double(max_min.min)
                       << ',' << wiretap::detail::format_double(max_min.argmin) << '\n';
                } catch (const std::domain_error&) {
                    // non-uniform marginal: the max bound does not apply
                }
            }
            os << "pa_converse," << wiretap::detail::format_double(
                                        wiretap::pa_converse(joint, inputs.ratio_L))
               << ",\n";
            if (pa_oracle && balanced) {
                auto oracle = wiretap::exhaustive_hash_oracle(joint, key_size);
                os << "oracle_best_s_avg,"
                   << wiretap::detail::format_double(oracle.best_s_avg) << ",\n";
                os << "oracle_best_s_max,"
                   << wiretap::detail::format_double(oracle.best_s_max) << ",\n";
                for (size_t i = 0; i < oracle.per_hash.size(); ++i) {
                    os << "hash_" << i << ','
                       << wiretap::detail::format_double(oracle.per_hash[i].s_avg) << ','
                       << wiretap::detail::format_double(oracle.per_hash[i].s_max_tv) << '\n';
                }
            }
            if (pa_out.empty()) {
                std::cout << os.str();
            } else {
                std::ofstream out(pa_out, std::ios::binary);
                if (!out) throw std::ios_base::failure("cannot open " + pa_out);
                out << os.str();
            }
            return kExitOk;
        }
        if (val_cmd->parsed()) {
            auto report = wiretap::validate_spec(val_path);
            if (report.ok) {
                std::cout << "ok\n";
                return kExitOk;
            }
            for (const auto& issue : report.issues) std::cout << issue.message << '\n';
            return kExitValidation;
        }
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid request: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
