#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tilekit/binio.hpp"
#include "tilekit/common.hpp"

namespace tilekit {

// N x D feature matrix plus provenance. The currency of every metric.
struct EmbeddingSet {
    int64_t rows = 0;
    int64_t dim = 0;
    std::vector<float> data;  // row-major, rows*dim
    std::string extractor_id;
    std::string source_tag;

    std::span<const float> row(int64_t i) const {
        return {data.data() + static_cast<size_t>(i) * static_cast<size_t>(dim), static_cast<size_t>(dim)};
    }

    void validate() const {
        if (rows < 1 || dim < 1) throw_data("EmbeddingSet: rows and dim must be >= 1");
        if (data.size() != static_cast<size_t>(rows) * static_cast<size_t>(dim))
            throw_data("EmbeddingSet: data length does not match rows*dim");
        for (int64_t i = 0; i < rows; ++i) {
            const float* r = data.data() + static_cast<size_t>(i) * static_cast<size_t>(dim);
            for (int64_t j = 0; j < dim; ++j) {
                if (!is_finite(r[j]))
                    throw_data("EmbeddingSet: non-finite value at row " + std::to_string(i) + ", col " +
                               std::to_string(j));
            }
        }
    }
};

namespace emb_format {
inline constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
inline constexpr uint32_t kVersion = 1;
}  // namespace emb_format

// Writes the EMB1 container. Returns the number of bytes written.
inline uint64_t write_embeddings(const EmbeddingSet& set, std::ostream& out) {
    set.validate();
    if (set.extractor_id.size() > 0xffff || set.source_tag.size() > 0xffff)
        throw_data("write_embeddings: metadata string longer than 65535 bytes");
    write_bytes(out, emb_format::kMagic, 4);
    write_le<uint32_t>(out, emb_format::kVersion);
    write_le<uint64_t>(out, static_cast<uint64_t>(set.rows));
    write_le<uint64_t>(out, static_cast<uint64_t>(set.dim));
    write_le<uint16_t>(out, static_cast<uint16_t>(set.extractor_id.size()));
    write_bytes(out, set.extractor_id.data(), set.extractor_id.size());
    write_le<uint16_t>(out, static_cast<uint16_t>(set.source_tag.size()));
    write_bytes(out, set.source_tag.data(), set.source_tag.size());
    for (float v : set.data) write_f32_le(out, v);
    if (!out) throw_data("write_embeddings: stream write failed");
    return 24ull + 2 + set.extractor_id.size() + 2 + set.source_tag.size() + 4ull * set.data.size();
}

inline EmbeddingSet read_embeddings(std::istream& in) {
    char magic[4];
    if (!read_bytes(in, magic, 4)) throw_data("read_embeddings: truncated header (magic)");
    if (std::memcmp(magic, emb_format::kMagic, 4) != 0) throw_data("read_embeddings: bad magic bytes");
    uint32_t version = 0;
    if (!read_le(in, version)) throw_data("read_embeddings: truncated header (version)");
    if (version != emb_format::kVersion)
        throw_data("read_embeddings: unsupported version " + std::to_string(version));
    uint64_t rows = 0, dim = 0;
    if (!read_le(in, rows) || !read_le(in, dim)) throw_data("read_embeddings: truncated header (shape)");
    if (rows < 1 || dim < 1) throw_data("read_embeddings: rows and dim must be >= 1");

    EmbeddingSet set;
    set.rows = static_cast<int64_t>(rows);
    set.dim = static_cast<int64_t>(dim);
    uint16_t len = 0;
    if (!read_le(in, len) || !read_string(in, len, set.extractor_id))
        throw_data("read_embeddings: truncated extractor_id");
    if (!read_le(in, len) || !read_string(in, len, set.source_tag))
        throw_data("read_embeddings: truncated source_tag");

    size_t count = static_cast<size_t>(rows) * static_cast<size_t>(dim);
    set.data.resize(count);
    for (size_t i = 0; i < count; ++i) {
        if (!read_f32_le(in, set.data[i]))
            throw_data("read_embeddings: truncated payload at element " + std::to_string(i) + " of " +
                       std::to_string(count));
        if (!is_finite(set.data[i]))
            throw_data("read_embeddings: non-finite value at row " + std::to_string(i / dim) + ", col " +
                       std::to_string(i % dim));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw_data("read_embeddings: trailing bytes after payload");
    return set;
}

inline uint64_t save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("save_embeddings: cannot open " + path.string());
    return write_embeddings(set, out);
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("load_embeddings: cannot open " + path.string());
    return read_embeddings(in);
}

}  // namespace tilekit
