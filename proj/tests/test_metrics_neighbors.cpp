#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tilekit/neighbors.hpp"
#include "tilekit/rng.hpp"

using namespace tilekit;

namespace {

EmbeddingSet random_set(int64_t n, int64_t d, uint64_t seed, double shift = 0.0) {
    EmbeddingSet s;
    s.rows = n;
    s.dim = d;
    s.extractor_id = "toy";
    s.source_tag = "rand";
    s.data.resize(static_cast<size_t>(n * d));
    Rng rng(seed);
    for (auto& v : s.data) v = static_cast<float>(rng.normal() + shift);
    return s;
}

// Independent O(N^2) oracle: plain unblocked loops and a full sort per row.
// Individual distances use the same norm-expansion arithmetic as the library
// kernel so "exact equality" is meaningful; selection and membership logic
// share nothing with the implementation.
double oracle_dist(const EmbeddingSet& a, int64_t i, const EmbeddingSet& b, int64_t j) {
    double na = 0.0, nb = 0.0, dot = 0.0;
    for (int64_t c = 0; c < a.dim; ++c) {
        double x = static_cast<double>(a.data[static_cast<size_t>(i * a.dim + c)]);
        double y = static_cast<double>(b.data[static_cast<size_t>(j * b.dim + c)]);
        na += x * x;
        nb += y * y;
        dot += x * y;
    }
    return std::sqrt(std::max(0.0, na + nb - 2.0 * dot));
}

std::vector<double> brute_knn_radii(const EmbeddingSet& s, int64_t k) {
    std::vector<double> radii(static_cast<size_t>(s.rows));
    for (int64_t i = 0; i < s.rows; ++i) {
        std::vector<double> dists;
        for (int64_t j = 0; j < s.rows; ++j) {
            if (j == i) continue;
            dists.push_back(oracle_dist(s, i, s, j));
        }
        std::sort(dists.begin(), dists.end());
        radii[static_cast<size_t>(i)] = dists[static_cast<size_t>(k - 1)];
    }
    return radii;
}

PrResult brute_precision_recall(const EmbeddingSet& real, const EmbeddingSet& gen, int64_t k) {
    std::vector<double> rr = brute_knn_radii(real, k);
    std::vector<double> gr = brute_knn_radii(gen, k);
    auto dist = [](const EmbeddingSet& a, int64_t i, const EmbeddingSet& b, int64_t j) {
        return oracle_dist(a, i, b, j);
    };
    int64_t p_hits = 0;
    for (int64_t g = 0; g < gen.rows; ++g)
        for (int64_t r = 0; r < real.rows; ++r)
            if (dist(gen, g, real, r) <= rr[static_cast<size_t>(r)]) {
                ++p_hits;
                break;
            }
    int64_t r_hits = 0;
    for (int64_t r = 0; r < real.rows; ++r)
        for (int64_t g = 0; g < gen.rows; ++g)
            if (dist(real, r, gen, g) <= gr[static_cast<size_t>(g)]) {
                ++r_hits;
                break;
            }
    return {static_cast<double>(p_hits) / static_cast<double>(gen.rows),
            static_cast<double>(r_hits) / static_cast<double>(real.rows)};
}

}  // namespace

TEST_CASE("knn radii of collinear points by hand") {
    // points at 0, 1, 3: nearest distances are 1, 1, 2
    EmbeddingSet s;
    s.rows = 3;
    s.dim = 1;
    s.extractor_id = "toy";
    s.source_tag = "line";
    s.data = {0.0f, 1.0f, 3.0f};
    KnnRadii r = knn_radii(s, 1);
    CHECK(r.radii[0] == Catch::Approx(1.0));
    CHECK(r.radii[1] == Catch::Approx(1.0));
    CHECK(r.radii[2] == Catch::Approx(2.0));
}

TEST_CASE("knn radii of identical rows are zero") {
    EmbeddingSet s;
    s.rows = 6;
    s.dim = 2;
    s.extractor_id = "toy";
    s.source_tag = "same";
    for (int i = 0; i < 6; ++i) {
        s.data.push_back(2.0f);
        s.data.push_back(-1.0f);
    }
    KnnRadii r = knn_radii(s, 1);
    for (double v : r.radii) CHECK(v == 0.0);
}

TEST_CASE("knn radii equal the brute-force oracle exactly") {
    EmbeddingSet s = random_set(200, 2, 5);
    KnnRadii fast = knn_radii(s, 3);
    std::vector<double> slow = brute_knn_radii(s, 3);
    for (size_t i = 0; i < slow.size(); ++i) CHECK(fast.radii[i] == slow[i]);
}

TEST_CASE("knn radii reject k >= N") {
    EmbeddingSet s = random_set(5, 2, 6);
    CHECK_THROWS(knn_radii(s, 5));
}

TEST_CASE("precision/recall trivial cases") {
    SECTION("identical sets of distinct points give (1,1)") {
        EmbeddingSet s = random_set(40, 3, 9);
        PrResult pr = precision_recall(s, s, 3);
        CHECK(pr.precision == 1.0);
        CHECK(pr.recall == 1.0);
    }
    SECTION("far-separated clusters give (0,0)") {
        EmbeddingSet real = random_set(40, 3, 10);
        EmbeddingSet gen = random_set(40, 3, 11, 1000.0);
        PrResult pr = precision_recall(real, gen, 3);
        CHECK(pr.precision == 0.0);
        CHECK(pr.recall == 0.0);
    }
    SECTION("k too large is a usage error") {
        EmbeddingSet s = random_set(10, 2, 12);
        CHECK_THROWS(precision_recall(s, s, 10));
    }
}

TEST_CASE("precision/recall equals the brute-force oracle exactly") {
    Rng rng(2026);
    for (int trial = 0; trial < 25; ++trial) {
        int64_t n_real = 20 + static_cast<int64_t>(rng.below(80));
        int64_t n_gen = 20 + static_cast<int64_t>(rng.below(80));
        int64_t d = 1 + static_cast<int64_t>(rng.below(8));
        int64_t k = std::vector<int64_t>{1, 3, 5}[trial % 3];
        if (k >= std::min(n_real, n_gen)) continue;
        EmbeddingSet real = random_set(n_real, d, 1000 + static_cast<uint64_t>(trial));
        EmbeddingSet gen = random_set(n_gen, d, 2000 + static_cast<uint64_t>(trial), 0.5);
        PrResult fast = precision_recall(real, gen, k, (trial % 2) ? 4 : 1);
        PrResult slow = brute_precision_recall(real, gen, k);
        CHECK(fast.precision == slow.precision);
        CHECK(fast.recall == slow.recall);
    }
}

TEST_CASE("precision and recall never decrease in k") {
    EmbeddingSet real = random_set(100, 2, 21);
    EmbeddingSet gen = random_set(100, 2, 22, 1.0);
    double prev_p = 0.0, prev_r = 0.0;
    for (int64_t k : {1, 2, 3, 5, 8}) {
        PrResult pr = precision_recall(real, gen, k);
        CHECK(pr.precision >= prev_p);
        CHECK(pr.recall >= prev_r);
        prev_p = pr.precision;
        prev_r = pr.recall;
    }
}
