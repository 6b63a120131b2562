#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/embedding.hpp"
#include "tilekit/parallel.hpp"

namespace tilekit {

// Mean + covariance fit of a feature distribution; the input to the Frechet
// distance. Covariance uses the unbiased n-1 divisor (recorded in reports).
struct GaussianSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    int64_t n = 0;

    int64_t dim() const { return mean.size(); }

    void validate() const {
        if (n < 2) throw_data("GaussianSummary: n must be >= 2");
        if (cov.rows() != mean.size() || cov.cols() != mean.size()) throw_data("GaussianSummary: shape mismatch");
        double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
        double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-10 * scale) throw_numeric("GaussianSummary: covariance not symmetric");
    }
};

// Column means and unbiased sample covariance, accumulated in double and
// explicitly symmetrized. Row blocks are reduced in a fixed tree order, so the
// result is identical for any thread count.
inline GaussianSummary fit_gaussian(const EmbeddingSet& set, int threads = 1) {
    set.validate();
    if (set.rows < 2) throw_data("fit_gaussian: need at least 2 rows");
    const int64_t n = set.rows, d = set.dim;

    constexpr int64_t kBlock = 4096;
    const int64_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<Eigen::VectorXd> sums(static_cast<size_t>(blocks));
    parallel_for(blocks, threads, [&](int64_t b) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
        const int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        for (int64_t i = lo; i < hi; ++i) {
            const float* r = set.data.data() + static_cast<size_t>(i) * static_cast<size_t>(d);
            for (int64_t j = 0; j < d; ++j) s[j] += static_cast<double>(r[j]);
        }
        sums[static_cast<size_t>(b)] = std::move(s);
    });
    Eigen::VectorXd mean = tree_reduce(sums, Eigen::VectorXd::Zero(d).eval(),
                                       [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a + b).eval(); }) /
                           static_cast<double>(n);

    std::vector<Eigen::MatrixXd> covs(static_cast<size_t>(blocks));
    parallel_for(blocks, threads, [&](int64_t b) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
        Eigen::VectorXd centered(d);
        const int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        for (int64_t i = lo; i < hi; ++i) {
            const float* r = set.data.data() + static_cast<size_t>(i) * static_cast<size_t>(d);
            for (int64_t j = 0; j < d; ++j) centered[j] = static_cast<double>(r[j]) - mean[j];
            c.selfadjointView<Eigen::Lower>().rankUpdate(centered);
        }
        covs[static_cast<size_t>(b)] = c.selfadjointView<Eigen::Lower>();
    });
    Eigen::MatrixXd cov = tree_reduce(covs, Eigen::MatrixXd::Zero(d, d).eval(),
                                      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a + b).eval(); }) /
                          static_cast<double>(n - 1);
    cov = ((cov + cov.transpose()) / 2.0).eval();

    GaussianSummary out{std::move(mean), std::move(cov), n};
    out.validate();
    return out;
}

struct SqrtmInfo {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool clamped_beyond_tol = false;  // an eigenvalue below -tol*lambda_max was clamped
};

// PSD square root by symmetric eigendecomposition with eigenvalues clamped at
// zero. Clamps beyond tol*lambda_max are surfaced through `info`, never hidden.
inline Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& m, SqrtmInfo* info = nullptr, double tol = 1e-6) {
    if (m.rows() != m.cols()) throw_data("sqrtm_psd: matrix must be square");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw_numeric("sqrtm_psd: input not symmetric within tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw_numeric("sqrtm_psd: eigendecomposition failed");
    Eigen::VectorXd ev = solver.eigenvalues();
    const double lambda_max = std::max(0.0, ev.maxCoeff());
    if (info) {
        info->min_eigenvalue = ev.minCoeff();
        info->max_eigenvalue = lambda_max;
        info->clamped_beyond_tol = ev.minCoeff() < -tol * std::max(lambda_max, 1e-300);
    }
    Eigen::VectorXd sqrt_ev = ev.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd r = solver.eigenvectors() * sqrt_ev.asDiagonal() * solver.eigenvectors().transpose();
    return ((r + r.transpose()) / 2.0).eval();
}

struct FrechetInfo {
    bool sqrtm_clamp_warning = false;
    double raw_value = 0.0;  // before the small-negative clamp
};

// Frechet distance between two Gaussian fits:
//   |mu_a - mu_b|^2 + tr(Sa) + tr(Sb) - 2 tr((Sa^1/2 Sb Sa^1/2)^1/2)
// using the symmetric inner product form, which stays real-valued.
inline double frechet_distance(const GaussianSummary& a, const GaussianSummary& b, FrechetInfo* info = nullptr) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) throw_data("frechet_distance: dimension mismatch");

    SqrtmInfo s1, s2;
    Eigen::MatrixXd root_a = sqrtm_psd(a.cov, &s1);
    Eigen::MatrixXd inner = root_a * b.cov * root_a;
    inner = ((inner + inner.transpose()) / 2.0).eval();
    Eigen::MatrixXd cross = sqrtm_psd(inner, &s2);

    double value = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * cross.trace();
    if (info) {
        info->raw_value = value;
        info->sqrtm_clamp_warning = s1.clamped_beyond_tol || s2.clamped_beyond_tol;
    }
    if (value < 0.0 && value > -1e-6) value = 0.0;
    return value;
}

}  // namespace tilekit
