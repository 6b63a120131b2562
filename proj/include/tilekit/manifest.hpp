#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/rng.hpp"

namespace tilekit {

enum class Split { train, val_in, val_out, guidance, other };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val_in: return "val_in";
        case Split::val_out: return "val_out";
        case Split::guidance: return "guidance";
        case Split::other: return "other";
    }
    return "other";
}

inline Split split_from_name(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val_in") return Split::val_in;
    if (s == "val_out") return Split::val_out;
    if (s == "guidance") return Split::guidance;
    if (s == "other") return Split::other;
    throw_data("unknown split '" + s + "'");
}

struct TileRecord {
    std::string tile_id;
    std::string slide_id;
    std::string group;  // stratification label (tissue-source-site role)
    int64_t x = 0;
    int64_t y = 0;
    int64_t width = 0;
    int64_t height = 0;
    double mpp = 0.0;
    Split split = Split::other;

    void validate() const {
        if (tile_id.empty()) throw_data("TileRecord: empty tile_id");
        if (width <= 0 || height <= 0) throw_data("TileRecord '" + tile_id + "': width and height must be > 0");
        if (!(mpp > 0.0)) throw_data("TileRecord '" + tile_id + "': mpp must be > 0");
    }
};

struct TileManifest {
    std::vector<TileRecord> entries;
    int schema_version = 1;

    void validate() const {
        std::unordered_set<std::string> seen;
        seen.reserve(entries.size());
        for (const auto& e : entries) {
            e.validate();
            if (!seen.insert(e.tile_id).second) throw_data("TileManifest: duplicate tile_id '" + e.tile_id + "'");
        }
    }
};

namespace manifest_format {
inline constexpr const char* kHeader = "tile_id\tslide_id\tgroup\tx\ty\twidth\theight\tmpp\tsplit";
}

inline void write_manifest(const TileManifest& manifest, std::ostream& out) {
    manifest.validate();
    out << manifest_format::kHeader << '\n';
    for (const auto& e : manifest.entries) {
        std::ostringstream line;
        line.precision(17);
        line << e.tile_id << '\t' << e.slide_id << '\t' << e.group << '\t' << e.x << '\t' << e.y << '\t' << e.width
             << '\t' << e.height << '\t' << e.mpp << '\t' << split_name(e.split);
        out << line.str() << '\n';
    }
    if (!out) throw_data("write_manifest: stream write failed");
}

namespace detail {
inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    for (;;) {
        size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline int64_t parse_i64(const std::string& s, const std::string& what, int line_no) {
    try {
        size_t pos = 0;
        int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw_data("manifest line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
    }
}

inline double parse_f64(const std::string& s, const std::string& what, int line_no) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw_data("manifest line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
    }
}
}  // namespace detail

inline TileManifest read_manifest(std::istream& in) {
    TileManifest manifest;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != manifest_format::kHeader)
                throw_data("manifest line " + std::to_string(line_no) + ": bad header, expected '" +
                           std::string(manifest_format::kHeader) + "'");
            header_seen = true;
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() != 9)
            throw_data("manifest line " + std::to_string(line_no) + ": expected 9 tab-separated fields, got " +
                       std::to_string(fields.size()));
        TileRecord rec;
        rec.tile_id = fields[0];
        rec.slide_id = fields[1];
        rec.group = fields[2];
        rec.x = detail::parse_i64(fields[3], "x", line_no);
        rec.y = detail::parse_i64(fields[4], "y", line_no);
        rec.width = detail::parse_i64(fields[5], "width", line_no);
        rec.height = detail::parse_i64(fields[6], "height", line_no);
        rec.mpp = detail::parse_f64(fields[7], "mpp", line_no);
        rec.split = split_from_name(fields[8]);
        manifest.entries.push_back(std::move(rec));
    }
    if (!header_seen) throw_data("manifest: missing header line");
    manifest.validate();
    return manifest;
}

inline void save_manifest(const TileManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw_data("save_manifest: cannot open " + path.string());
    write_manifest(manifest, out);
}

inline TileManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw_data("load_manifest: cannot open " + path.string());
    return read_manifest(in);
}

// Largest-remainder (Hamilton) apportionment of n over the group sizes, ties
// on the fractional remainder broken by lexicographic group id.
inline std::map<std::string, int64_t> apportion_largest_remainder(const std::map<std::string, int64_t>& group_sizes,
                                                                  int64_t n) {
    int64_t total = 0;
    for (const auto& [g, c] : group_sizes) total += c;
    if (n > total) throw_data("stratified_sample: n exceeds population size");

    std::map<std::string, int64_t> counts;
    std::vector<std::pair<double, std::string>> remainders;  // (-remainder, id) sorts ties lexicographically
    int64_t assigned = 0;
    for (const auto& [g, c] : group_sizes) {
        double quota = static_cast<double>(n) * static_cast<double>(c) / static_cast<double>(total);
        int64_t base = static_cast<int64_t>(quota);
        counts[g] = base;
        assigned += base;
        remainders.emplace_back(-(quota - static_cast<double>(base)), g);
    }
    std::sort(remainders.begin(), remainders.end());
    for (int64_t i = 0; i < n - assigned; ++i) counts[remainders[static_cast<size_t>(i)].second] += 1;

    for (const auto& [g, c] : counts) {
        if (c > group_sizes.at(g))
            throw_data("stratified_sample: quota " + std::to_string(c) + " exceeds size of group '" + g + "'");
    }
    return counts;
}

// Stratified subsample mirroring the per-group shares of the input manifest.
// Within each group the draw is uniform without replacement, seeded per group,
// so the result is a pure function of (manifest, n, seed). Output preserves
// the input entry order.
inline TileManifest stratified_sample(const TileManifest& manifest, int64_t n, uint64_t seed) {
    manifest.validate();
    if (n < 0) throw_usage("stratified_sample: n must be >= 0");
    std::map<std::string, std::vector<size_t>> group_rows;
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& g = manifest.entries[i].group;
        if (g.empty()) throw_data("stratified_sample: entry '" + manifest.entries[i].tile_id + "' has empty group");
        group_rows[g].push_back(i);
    }
    std::map<std::string, int64_t> group_sizes;
    for (const auto& [g, rows] : group_rows) group_sizes[g] = static_cast<int64_t>(rows.size());
    auto counts = apportion_largest_remainder(group_sizes, n);

    std::vector<char> selected(manifest.entries.size(), 0);
    for (const auto& [g, rows] : group_rows) {
        int64_t k = counts.at(g);
        Rng rng(seed, fnv1a64(g));
        for (int64_t idx : rng.sample_without_replacement(static_cast<int64_t>(rows.size()), k))
            selected[rows[static_cast<size_t>(idx)]] = 1;
    }
    TileManifest out;
    out.schema_version = manifest.schema_version;
    for (size_t i = 0; i < manifest.entries.size(); ++i)
        if (selected[i]) out.entries.push_back(manifest.entries[i]);
    return out;
}

}  // namespace tilekit
