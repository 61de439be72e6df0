#pragma once

// JSON ingestion of channel specifications and the validation report used by
// the CLI `validate` subcommand.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wiretap/gaussian.hpp"
#include "wiretap/prob.hpp"
#include "wiretap/wiretap_spec.hpp"

namespace wiretap {

struct ValidationIssue {
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;

    void fail(std::string msg) {
        ok = false;
        issues.push_back({std::move(msg)});
    }
};

namespace detail {

inline void check_rows(const nlohmann::json& rows, const std::string& name,
                       ValidationReport& report) {
    if (!rows.is_array() || rows.empty()) {
        report.fail(name + ": expected a nonempty array of rows");
        return;
    }
    size_t width = 0;
    for (size_t x = 0; x < rows.size(); ++x) {
        const auto& row = rows[x];
        if (!row.is_array() || row.empty()) {
            report.fail(name + " row " + std::to_string(x) + ": expected a nonempty array");
            continue;
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            report.fail(name + " row " + std::to_string(x) + ": ragged width");
        double sum = 0.0;
        for (size_t z = 0; z < row.size(); ++z) {
            double v = row[z].is_number() ? row[z].get<double>() : -1.0;
            if (v < 0.0)
                report.fail(name + " row " + std::to_string(x) + ": negative or non-numeric mass at index " +
                            std::to_string(z));
            else
                sum += v;
        }
        if (std::abs(sum - 1.0) > kMassTol)
            report.fail(name + " row " + std::to_string(x) + ": mass defect " +
                        std::to_string(sum - 1.0));
    }
}

}  // namespace detail

inline FiniteDist finite_dist_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::domain_error("FiniteDist: expected a JSON array");
    std::vector<double> m;
    for (const auto& v : j) m.push_back(v.get<double>());
    return FiniteDist(std::move(m));
}

inline DiscreteChannel channel_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::domain_error("DiscreteChannel: expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : j) {
        std::vector<double> r;
        for (const auto& v : row) r.push_back(v.get<double>());
        rows.push_back(std::move(r));
    }
    return DiscreteChannel(std::move(rows));
}

/// A parsed channel document: exactly one of the three kinds.
struct ChannelDocument {
    std::string kind;  // "bsc" | "gaussian" | "dmc"
    double bsc_p = 0.0;
    std::optional<GaussianWiretapParams> gaussian;
    std::optional<WiretapSpec> dmc;
};

inline ChannelDocument channel_from_document(const nlohmann::json& doc) {
    ChannelDocument out;
    out.kind = doc.at("kind").get<std::string>();
    if (out.kind == "bsc") {
        out.bsc_p = doc.at("p").get<double>();
        if (!(out.bsc_p > 0.0 && out.bsc_p < 0.5))
            throw std::domain_error("bsc spec: p must lie in (0, 1/2)");
    } else if (out.kind == "gaussian") {
        if (doc.contains("snr_legit_db")) {
            out.gaussian = GaussianWiretapParams::from_snr_db(
                doc.at("snr_legit_db").get<double>(), doc.at("snr_eve_db").get<double>());
        } else {
            out.gaussian = GaussianWiretapParams(doc.at("power").get<double>(),
                                                 doc.at("n1").get<double>(),
                                                 doc.at("n2").get<double>());
        }
    } else if (out.kind == "dmc") {
        auto legit = channel_from_json(doc.at("legit"));
        auto eve = channel_from_json(doc.at("eve"));
        bool degraded = doc.value("degraded", false);
        bool semidet = doc.value("semi_deterministic", false);
        out.dmc = WiretapSpec(std::move(legit), std::move(eve), degraded, semidet);
    } else {
        throw std::domain_error("unknown channel kind '" + out.kind + "'");
    }
    return out;
}

/// Validates a channel-spec file without constructing the channel objects, so
/// every defect can be reported with its location.
inline ValidationReport validate_spec(const std::string& path) {
    ValidationReport report;
    std::ifstream in(path);
    if (!in) {
        report.fail("cannot open " + path);
        return report;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        report.fail(std::string("parse error: ") + e.what());
        return report;
    }
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        report.fail("missing string field 'kind'");
        return report;
    }
    std::string kind = doc["kind"].get<std::string>();
    if (kind == "bsc") {
        if (!doc.contains("p") || !doc["p"].is_number())
            report.fail("bsc: missing numeric field 'p'");
        else {
            double p = doc["p"].get<double>();
            if (!(p > 0.0 && p < 0.5)) report.fail("bsc: p outside (0, 1/2)");
        }
    } else if (kind == "gaussian") {
        bool has_snr = doc.contains("snr_legit_db") && doc.contains("snr_eve_db");
        bool has_raw = doc.contains("power") && doc.contains("n1") && doc.contains("n2");
        if (!has_snr && !has_raw)
            report.fail("gaussian: need snr_legit_db/snr_eve_db or power/n1/n2");
        if (report.ok) {
            try {
                channel_from_document(doc);
            } catch (const std::exception& e) {
                report.fail(e.what());
            }
        }
    } else if (kind == "dmc") {
        if (!doc.contains("legit") || !doc.contains("eve")) {
            report.fail("dmc: missing 'legit' or 'eve' transition matrix");
            return report;
        }
        detail::check_rows(doc["legit"], "legit", report);
        detail::check_rows(doc["eve"], "eve", report);
        if (report.ok) {
            try {
                channel_from_document(doc);
            } catch (const std::exception& e) {
                report.fail(e.what());  // tag contradictions, shape mismatches
            }
        }
    } else {
        report.fail("unknown channel kind '" + kind + "'");
    }
    return report;
}

}  // namespace wiretap
