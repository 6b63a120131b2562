#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tilekit/common.hpp"

namespace tilekit {

enum class MetricName { fd, fld, precision, recall, cosine_sim };

inline const char* metric_name_str(MetricName m) {
    switch (m) {
        case MetricName::fd: return "fd";
        case MetricName::fld: return "fld";
        case MetricName::precision: return "precision";
        case MetricName::recall: return "recall";
        case MetricName::cosine_sim: return "cosine_sim";
    }
    return "fd";
}

inline MetricName metric_name_from_str(const std::string& s) {
    if (s == "fd") return MetricName::fd;
    if (s == "fld") return MetricName::fld;
    if (s == "precision") return MetricName::precision;
    if (s == "recall") return MetricName::recall;
    if (s == "cosine_sim") return MetricName::cosine_sim;
    throw_usage("unknown metric '" + s + "'");
}

// Shortest-roundtrip formatting so report files are byte-stable and parse back
// to the exact double.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char probe[64];
            std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
            if (std::strtod(probe, nullptr) == v) return probe;
        }
    }
    return buf;
}

// One metric outcome. Serialized as a single tab-separated key=value line.
struct MetricReport {
    MetricName metric = MetricName::fd;
    double value = 0.0;
    std::string extractor_id;
    std::string reference_tag;
    std::string candidate_tag;
    std::optional<int64_t> seed;
    std::map<std::string, double> extras;

    void validate() const {
        if (!is_finite(value)) throw_numeric("MetricReport: non-finite value");
        if ((metric == MetricName::precision || metric == MetricName::recall) && (value < 0.0 || value > 1.0))
            throw_numeric("MetricReport: precision/recall outside [0,1]");
        if (metric == MetricName::cosine_sim && (value < -1.0 || value > 1.0))
            throw_numeric("MetricReport: cosine similarity outside [-1,1]");
        if (metric == MetricName::fd && value < 0.0) throw_numeric("MetricReport: negative Frechet distance");
    }

    std::string to_line() const {
        validate();
        std::ostringstream os;
        os << "metric=" << metric_name_str(metric);
        os << "\tvalue=" << format_double(value);
        os << "\textractor=" << extractor_id;
        os << "\tref=" << reference_tag;
        os << "\tcand=" << candidate_tag;
        os << "\tseed=" << (seed ? std::to_string(*seed) : std::string("none"));
        for (const auto& [k, v] : extras) os << '\t' << k << '=' << format_double(v);
        return os.str();
    }

    static MetricReport from_line(const std::string& line) {
        MetricReport rep;
        std::istringstream is(line);
        std::string tok;
        bool have_metric = false, have_value = false;
        while (std::getline(is, tok, '\t')) {
            size_t eq = tok.find('=');
            if (eq == std::string::npos) throw_data("MetricReport: bad token '" + tok + "'");
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "metric") {
                rep.metric = metric_name_from_str(val);
                have_metric = true;
            } else if (key == "value") {
                rep.value = std::strtod(val.c_str(), nullptr);
                have_value = true;
            } else if (key == "extractor") {
                rep.extractor_id = val;
            } else if (key == "ref") {
                rep.reference_tag = val;
            } else if (key == "cand") {
                rep.candidate_tag = val;
            } else if (key == "seed") {
                if (val != "none") rep.seed = std::strtoll(val.c_str(), nullptr, 10);
            } else {
                rep.extras[key] = std::strtod(val.c_str(), nullptr);
            }
        }
        if (!have_metric || !have_value) throw_data("MetricReport: line missing metric or value");
        return rep;
    }
};

}  // namespace tilekit
