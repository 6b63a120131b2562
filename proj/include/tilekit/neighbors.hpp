#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/embedding.hpp"
#include "tilekit/pairwise.hpp"

namespace tilekit {

// Distance from each row to its k-th nearest neighbor (self excluded).
// Manifold radii for the improved precision/recall construction.
struct KnnRadii {
    int64_t k = 0;
    std::vector<double> radii;
};

inline KnnRadii knn_radii(const EmbeddingSet& set, int64_t k, int threads = 1) {
    set.validate();
    if (k < 1) throw_usage("knn_radii: k must be >= 1");
    if (k >= set.rows) throw_usage("knn_radii: k must be < number of rows");

    KnnRadii out;
    out.k = k;
    out.radii.assign(static_cast<size_t>(set.rows), 0.0);
    for_each_distance_row(set, set, threads, [&](int64_t i, const std::vector<double>& dist) {
        std::vector<double> others;
        others.reserve(dist.size() - 1);
        for (int64_t j = 0; j < set.rows; ++j)
            if (j != i) others.push_back(dist[static_cast<size_t>(j)]);
        std::nth_element(others.begin(), others.begin() + (k - 1), others.end());
        out.radii[static_cast<size_t>(i)] = others[static_cast<size_t>(k - 1)];
    });
    return out;
}

struct PrResult {
    double precision = 0.0;
    double recall = 0.0;
};

namespace detail {
// Fraction of query rows that fall inside the union of balls
// B(support_row, radius(support_row)).
inline double manifold_membership(const EmbeddingSet& query, const EmbeddingSet& support,
                                  const std::vector<double>& radii, int threads) {
    std::vector<char> inside(static_cast<size_t>(query.rows), 0);
    for_each_distance_row(query, support, threads, [&](int64_t i, const std::vector<double>& dist) {
        for (int64_t j = 0; j < support.rows; ++j) {
            if (dist[static_cast<size_t>(j)] <= radii[static_cast<size_t>(j)]) {
                inside[static_cast<size_t>(i)] = 1;
                break;
            }
        }
    });
    int64_t count = 0;
    for (char c : inside) count += c;
    return static_cast<double>(count) / static_cast<double>(query.rows);
}
}  // namespace detail

// Improved precision/recall: precision is the fraction of generated rows that
// land inside the real k-NN manifold, recall the symmetric quantity.
inline PrResult precision_recall(const EmbeddingSet& real, const EmbeddingSet& gen, int64_t k, int threads = 1) {
    real.validate();
    gen.validate();
    if (real.dim != gen.dim) throw_data("precision_recall: dimension mismatch");
    if (k >= std::min(real.rows, gen.rows)) throw_usage("precision_recall: k must be < min(N_real, N_gen)");

    KnnRadii real_radii = knn_radii(real, k, threads);
    KnnRadii gen_radii = knn_radii(gen, k, threads);
    PrResult out;
    out.precision = detail::manifold_membership(gen, real, real_radii.radii, threads);
    out.recall = detail::manifold_membership(real, gen, gen_radii.radii, threads);
    return out;
}

}  // namespace tilekit
