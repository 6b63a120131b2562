#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/embedding.hpp"
#include "tilekit/parallel.hpp"

namespace tilekit {

// Exact Euclidean distances in 1024x1024 row tiles using the
// |a|^2 + |b|^2 - 2<a,b> expansion with double accumulators; cancellation
// can leave tiny negatives, which are clamped before the sqrt.
inline constexpr int64_t kDistanceBlock = 1024;

namespace detail {
inline std::vector<double> squared_norms(const EmbeddingSet& s) {
    std::vector<double> out(static_cast<size_t>(s.rows));
    for (int64_t i = 0; i < s.rows; ++i) {
        const float* r = s.data.data() + static_cast<size_t>(i) * static_cast<size_t>(s.dim);
        double acc = 0.0;
        for (int64_t j = 0; j < s.dim; ++j) acc += static_cast<double>(r[j]) * static_cast<double>(r[j]);
        out[static_cast<size_t>(i)] = acc;
    }
    return out;
}
}  // namespace detail

// Calls visit(i, row_distances) for every row i of `a`, where row_distances[j]
// is the exact distance from a-row i to b-row j. Rows are processed in blocks;
// each row's buffer is private to its visit call. The visitor must be safe to
// run concurrently for distinct i.
template <typename Visitor>
void for_each_distance_row(const EmbeddingSet& a, const EmbeddingSet& b, int threads, Visitor visit) {
    if (a.dim != b.dim) throw_data("pairwise distances: dimension mismatch");
    const int64_t d = a.dim;
    const std::vector<double> na = detail::squared_norms(a);
    const std::vector<double> nb = detail::squared_norms(b);

    const int64_t row_blocks = (a.rows + kDistanceBlock - 1) / kDistanceBlock;
    parallel_for(row_blocks, threads, [&](int64_t bi) {
        std::vector<double> dist(static_cast<size_t>(b.rows));
        const int64_t ilo = bi * kDistanceBlock, ihi = std::min(a.rows, ilo + kDistanceBlock);
        for (int64_t i = ilo; i < ihi; ++i) {
            const float* ra = a.data.data() + static_cast<size_t>(i) * static_cast<size_t>(d);
            for (int64_t jlo = 0; jlo < b.rows; jlo += kDistanceBlock) {
                const int64_t jhi = std::min(b.rows, jlo + kDistanceBlock);
                for (int64_t j = jlo; j < jhi; ++j) {
                    const float* rb = b.data.data() + static_cast<size_t>(j) * static_cast<size_t>(d);
                    double dot = 0.0;
                    for (int64_t k = 0; k < d; ++k) dot += static_cast<double>(ra[k]) * static_cast<double>(rb[k]);
                    double sq = na[static_cast<size_t>(i)] + nb[static_cast<size_t>(j)] - 2.0 * dot;
                    dist[static_cast<size_t>(j)] = std::sqrt(std::max(0.0, sq));
                }
            }
            visit(i, dist);
        }
    });
}

}  // namespace tilekit
