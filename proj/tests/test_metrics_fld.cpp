#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tilekit/fld.hpp"
#include "tilekit/rng.hpp"

using namespace tilekit;

namespace {

EmbeddingSet gaussian_set(int64_t n, int64_t d, uint64_t seed, double shift = 0.0) {
    EmbeddingSet s;
    s.rows = n;
    s.dim = d;
    s.extractor_id = "toy";
    s.source_tag = "gauss";
    s.data.resize(static_cast<size_t>(n * d));
    Rng rng(seed);
    for (auto& v : s.data) v = static_cast<float>(rng.normal() + shift);
    return s;
}

}  // namespace

TEST_CASE("fld ordering on the canonical Gaussian rig") {
    // Smaller than the acceptance rig so the unit suite stays fast; the
    // orderings it checks are the same.
    const int64_t n = 400, d = 8;
    EmbeddingSet real_fit = gaussian_set(n, d, 1);
    EmbeddingSet real_test = gaussian_set(n, d, 2);
    EmbeddingSet fresh = gaussian_set(n, d, 3);
    EmbeddingSet shifted = gaussian_set(n, d, 4, 3.0);  // +3 sigma in every coordinate
    EmbeddingSet copies = real_fit;
    copies.source_tag = "copies";

    FldOptions opts;
    double fld_fresh = fld(fresh, real_fit, real_test, opts);
    double fld_shift = fld(shifted, real_fit, real_test, opts);
    double fld_copies = fld(copies, real_fit, real_test, opts);

    INFO("fresh=" << fld_fresh << " shifted=" << fld_shift << " copies=" << fld_copies);
    CHECK(std::abs(fld_fresh) <= 0.5);
    CHECK(fld_shift > fld_fresh);
    CHECK(fld_copies > fld_fresh);
}

TEST_CASE("fld is deterministic and thread-count invariant") {
    EmbeddingSet real_fit = gaussian_set(200, 4, 11);
    EmbeddingSet real_test = gaussian_set(200, 4, 12);
    EmbeddingSet gen = gaussian_set(200, 4, 13);
    FldOptions one;
    one.threads = 1;
    FldOptions four;
    four.threads = 4;
    double a = fld(gen, real_fit, real_test, one);
    double b = fld(gen, real_fit, real_test, four);
    CHECK(a == b);
}

TEST_CASE("fld rejects degenerate inputs") {
    EmbeddingSet tiny = gaussian_set(1, 4, 21);
    EmbeddingSet ok = gaussian_set(10, 4, 22);
    CHECK_THROWS(fld(tiny, ok, ok));
    CHECK_THROWS(fld(ok, tiny, ok));
    EmbeddingSet wrong_dim = gaussian_set(10, 3, 23);
    CHECK_THROWS(fld(wrong_dim, ok, ok));
}
