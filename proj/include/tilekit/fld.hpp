#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/embedding.hpp"
#include "tilekit/parallel.hpp"
#include "tilekit/pairwise.hpp"

namespace tilekit {

struct FldOptions {
    int steps = 100;       // full-batch gradient-ascent steps on the fit set
    double lr = 0.5;       // step size on per-component log-variances
    double var_floor = 1e-6;
    int threads = 1;
};

namespace fld_detail {

// Squared distances fit-row-major: d2[i*M + j] = |fit_i - center_j|^2.
inline std::vector<float> squared_distance_table(const EmbeddingSet& fit, const EmbeddingSet& centers, int threads) {
    std::vector<float> d2(static_cast<size_t>(fit.rows) * static_cast<size_t>(centers.rows));
    for_each_distance_row(fit, centers, threads, [&](int64_t i, const std::vector<double>& dist) {
        float* rowp = d2.data() + static_cast<size_t>(i) * static_cast<size_t>(centers.rows);
        for (int64_t j = 0; j < centers.rows; ++j) {
            double v = dist[static_cast<size_t>(j)];
            rowp[j] = static_cast<float>(v * v);
        }
    });
    return d2;
}

struct RowLikelihood {
    double log_density = 0.0;  // log p(x) including all constants
    double lse = 0.0;          // logsumexp of the per-component exponents
};

// exponent_j(x) = -D/2 * s_j - d2_j / (2 exp(s_j)); log p adds -log M - D/2 log 2pi.
inline RowLikelihood row_likelihood(const float* d2_row, const std::vector<double>& logvars, int64_t dim) {
    const int64_t m = static_cast<int64_t>(logvars.size());
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(static_cast<size_t>(m));
    for (int64_t j = 0; j < m; ++j) {
        double s = logvars[static_cast<size_t>(j)];
        double t = -0.5 * static_cast<double>(dim) * s - static_cast<double>(d2_row[j]) / (2.0 * std::exp(s));
        terms[static_cast<size_t>(j)] = t;
        if (t > best) best = t;
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - best);
    RowLikelihood out;
    out.lse = best + std::log(acc);
    out.log_density = out.lse - std::log(static_cast<double>(m)) -
                      0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi);
    return out;
}

// Fits per-component log-variances of an isotropic Gaussian mixture with one
// component per center, by gradient ascent on the mean log-likelihood of the
// fit set. Initial variance is the squared distance from each center to its
// nearest fit row; when centers ARE the fit rows (self-calibration) the
// coincident index is excluded so the baseline keeps a data-scale bandwidth.
inline std::vector<double> fit_logvars(const EmbeddingSet& centers, const EmbeddingSet& fit, bool exclude_self,
                                       const FldOptions& opts) {
    const int64_t m = centers.rows, n = fit.rows, d = centers.dim;
    if (exclude_self && m != n) throw_data("fld: self-calibration requires centers == fit set");

    std::vector<float> d2 = squared_distance_table(fit, centers, opts.threads);
    std::vector<double> logvars(static_cast<size_t>(m));
    for (int64_t j = 0; j < m; ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int64_t i = 0; i < n; ++i) {
            if (exclude_self && i == j) continue;
            nearest = std::min(nearest, static_cast<double>(d2[static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(j)]));
        }
        logvars[static_cast<size_t>(j)] = std::log(std::max(opts.var_floor, nearest));
    }

    constexpr int64_t kRowBlock = 256;
    const int64_t blocks = (n + kRowBlock - 1) / kRowBlock;
    for (int step = 0; step < opts.steps; ++step) {
        std::vector<std::vector<double>> partials(static_cast<size_t>(blocks));
        parallel_for(blocks, opts.threads, [&](int64_t b) {
            std::vector<double> grad(static_cast<size_t>(m), 0.0);
            const int64_t lo = b * kRowBlock, hi = std::min(n, lo + kRowBlock);
            for (int64_t i = lo; i < hi; ++i) {
                const float* row = d2.data() + static_cast<size_t>(i) * static_cast<size_t>(m);
                RowLikelihood rl = row_likelihood(row, logvars, d);
                for (int64_t j = 0; j < m; ++j) {
                    double s = logvars[static_cast<size_t>(j)];
                    double t = -0.5 * static_cast<double>(d) * s - static_cast<double>(row[j]) / (2.0 * std::exp(s));
                    double resp = std::exp(t - rl.lse);
                    if (resp == 0.0) continue;
                    grad[static_cast<size_t>(j)] +=
                        resp * (-0.5 * static_cast<double>(d) + static_cast<double>(row[j]) / (2.0 * std::exp(s)));
                }
            }
            partials[static_cast<size_t>(b)] = std::move(grad);
        });
        std::vector<double> grad = tree_reduce(
            partials, std::vector<double>(static_cast<size_t>(m), 0.0), [](std::vector<double> a, const std::vector<double>& b) {
                for (size_t j = 0; j < a.size(); ++j) a[j] += b[j];
                return a;
            });
        for (int64_t j = 0; j < m; ++j) {
            logvars[static_cast<size_t>(j)] += opts.lr * grad[static_cast<size_t>(j)] / static_cast<double>(n);
            if (!is_finite(logvars[static_cast<size_t>(j)]))
                throw_numeric("fld: non-finite log-variance during optimization");
        }
    }
    return logvars;
}

inline double mixture_nll(const EmbeddingSet& centers, const std::vector<double>& logvars, const EmbeddingSet& eval,
                          int threads) {
    std::vector<double> logp(static_cast<size_t>(eval.rows));
    for_each_distance_row(eval, centers, threads, [&](int64_t i, const std::vector<double>& dist) {
        std::vector<float> d2(static_cast<size_t>(centers.rows));
        for (int64_t j = 0; j < centers.rows; ++j) {
            double v = dist[static_cast<size_t>(j)];
            d2[static_cast<size_t>(j)] = static_cast<float>(v * v);
        }
        logp[static_cast<size_t>(i)] = row_likelihood(d2.data(), logvars, eval.dim).log_density;
    });
    double acc = 0.0;
    for (double v : logp) {
        if (!is_finite(v)) throw_numeric("fld: non-finite likelihood on evaluation set");
        acc += v;
    }
    return -acc / static_cast<double>(eval.rows);
}

}  // namespace fld_detail

// Feature likelihood divergence: per-dimension gap between the test NLL under
// a mixture centered on generated rows and under the self-calibration mixture
// centered on the fit rows. Near zero for a fresh i.i.d. sample; verbatim
// copies of the fit set collapse their bandwidths and score high.
inline double fld(const EmbeddingSet& gen, const EmbeddingSet& real_fit, const EmbeddingSet& real_test,
                  const FldOptions& opts = {}) {
    gen.validate();
    real_fit.validate();
    real_test.validate();
    if (gen.rows < 2 || real_fit.rows < 2 || real_test.rows < 2) throw_data("fld: every set needs at least 2 rows");
    if (gen.dim != real_fit.dim || gen.dim != real_test.dim) throw_data("fld: dimension mismatch");

    std::vector<double> gen_logvars = fld_detail::fit_logvars(gen, real_fit, /*exclude_self=*/false, opts);
    std::vector<double> cal_logvars = fld_detail::fit_logvars(real_fit, real_fit, /*exclude_self=*/true, opts);
    double nll_gen = fld_detail::mixture_nll(gen, gen_logvars, real_test, opts.threads);
    double nll_cal = fld_detail::mixture_nll(real_fit, cal_logvars, real_test, opts.threads);
    return (nll_gen - nll_cal) / static_cast<double>(gen.dim);
}

}  // namespace tilekit
