#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/embedding.hpp"
#include "tilekit/parallel.hpp"
#include "tilekit/rng.hpp"

namespace tilekit {

// Variability protocol: repeatedly subsample the synthetic pool (the real
// reference stays fixed and full-size inside the metric closure).
struct BootstrapSpec {
    int64_t subsample_size = 50000;
    int64_t replicates = 50;
    uint64_t seed = 0;

    void validate_against(const EmbeddingSet& pool) const {
        if (replicates < 1) throw_usage("bootstrap: replicates must be >= 1");
        if (subsample_size < 1) throw_usage("bootstrap: subsample_size must be >= 1");
        if (subsample_size > pool.rows) throw_usage("bootstrap: subsample_size exceeds pool size");
    }
};

struct BootstrapResult {
    double mean = 0.0;
    double std = 0.0;  // population std over replicates
    std::vector<double> replicate_values;
};

// Each replicate draws subsample_size rows without replacement from its own
// counter-based stream (seed XOR replicate index), evaluates the metric, and
// writes into its own slot; the result is bit-identical for any thread count.
inline BootstrapResult bootstrap(const std::function<double(const EmbeddingSet&)>& metric, const EmbeddingSet& pool,
                                 const BootstrapSpec& spec, int threads = 1) {
    pool.validate();
    spec.validate_against(pool);

    BootstrapResult out;
    out.replicate_values.assign(static_cast<size_t>(spec.replicates), 0.0);
    parallel_for(spec.replicates, threads, [&](int64_t r) {
        Rng rng(spec.seed ^ static_cast<uint64_t>(r));
        std::vector<int64_t> rows = rng.sample_without_replacement(pool.rows, spec.subsample_size);
        // canonical row order: replicate values depend on the chosen subset
        // only, and subsample == pool reproduces the pool bit-for-bit
        std::sort(rows.begin(), rows.end());
        EmbeddingSet sub;
        sub.rows = spec.subsample_size;
        sub.dim = pool.dim;
        sub.extractor_id = pool.extractor_id;
        sub.source_tag = pool.source_tag;
        sub.data.resize(static_cast<size_t>(sub.rows) * static_cast<size_t>(sub.dim));
        for (int64_t i = 0; i < sub.rows; ++i) {
            const float* src = pool.data.data() + static_cast<size_t>(rows[static_cast<size_t>(i)]) * static_cast<size_t>(pool.dim);
            std::copy(src, src + pool.dim, sub.data.begin() + static_cast<int64_t>(i) * pool.dim);
        }
        try {
            out.replicate_values[static_cast<size_t>(r)] = metric(sub);
        } catch (const Error& e) {
            throw Error(e.kind(), "bootstrap replicate " + std::to_string(r) + ": " + e.what());
        }
    });

    double sum = 0.0, sum_sq = 0.0;
    for (double v : out.replicate_values) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(spec.replicates);
    out.mean = sum / n;
    out.std = std::sqrt(std::max(0.0, sum_sq / n - out.mean * out.mean));
    return out;
}

}  // namespace tilekit
