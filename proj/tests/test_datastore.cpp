#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tilekit/embedding.hpp"
#include "tilekit/manifest.hpp"
#include "tilekit/pairing.hpp"
#include "tilekit/rng.hpp"

using namespace tilekit;

namespace {

EmbeddingSet make_set(int64_t rows, int64_t dim, const std::vector<float>& data, std::string extractor = "toy",
                      std::string tag = "test") {
    EmbeddingSet s;
    s.rows = rows;
    s.dim = dim;
    s.data = data;
    s.extractor_id = std::move(extractor);
    s.source_tag = std::move(tag);
    return s;
}

TileManifest make_manifest(const std::vector<std::pair<std::string, int64_t>>& group_counts) {
    TileManifest m;
    int64_t id = 0;
    for (const auto& [group, count] : group_counts) {
        for (int64_t i = 0; i < count; ++i) {
            TileRecord r;
            r.tile_id = "t" + std::to_string(id++);
            r.slide_id = "s" + std::to_string(id % 7);
            r.group = group;
            r.x = 224 * i;
            r.y = 0;
            r.width = 224;
            r.height = 224;
            r.mpp = 0.5;
            r.split = Split::train;
            m.entries.push_back(r);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("embedding roundtrip is exact") {
    EmbeddingSet s = make_set(2, 3, {1, 2, 3, 4, 5, 6}, "inception", "val-out");
    std::stringstream buf;
    uint64_t bytes = write_embeddings(s, buf);
    CHECK(bytes == buf.str().size());
    EmbeddingSet back = read_embeddings(buf);
    CHECK(back.rows == 2);
    CHECK(back.dim == 3);
    CHECK(back.data == s.data);
    CHECK(back.extractor_id == "inception");
    CHECK(back.source_tag == "val-out");
}

TEST_CASE("embedding roundtrip property over random shapes") {
    Rng rng(20260809);
    for (int trial = 0; trial < 25; ++trial) {
        int64_t rows = 1 + static_cast<int64_t>(rng.below(40));
        int64_t dim = 1 + static_cast<int64_t>(rng.below(24));
        EmbeddingSet s;
        s.rows = rows;
        s.dim = dim;
        s.extractor_id = "ex" + std::to_string(rng.below(1000));
        s.source_tag = trial % 3 == 0 ? "" : "tag" + std::to_string(trial);
        s.data.resize(static_cast<size_t>(rows * dim));
        for (auto& v : s.data) v = static_cast<float>(rng.normal() * 100.0);
        std::stringstream buf;
        write_embeddings(s, buf);
        EmbeddingSet back = read_embeddings(buf);
        REQUIRE(back.rows == s.rows);
        REQUIRE(back.dim == s.dim);
        CHECK(back.data == s.data);  // bit-exact
        CHECK(back.extractor_id == s.extractor_id);
        CHECK(back.source_tag == s.source_tag);
    }
}

TEST_CASE("embedding read rejects corrupt inputs") {
    EmbeddingSet s = make_set(10, 2, std::vector<float>(20, 1.0f));
    std::stringstream buf;
    write_embeddings(s, buf);
    std::string bytes = buf.str();

    SECTION("bad magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        std::stringstream in(bad);
        CHECK_THROWS_WITH(read_embeddings(in), Catch::Matchers::ContainsSubstring("bad magic"));
    }
    SECTION("version mismatch") {
        std::string bad = bytes;
        bad[4] = 9;
        std::stringstream in(bad);
        CHECK_THROWS_WITH(read_embeddings(in), Catch::Matchers::ContainsSubstring("version"));
    }
    SECTION("header claims more rows than payload carries") {
        // drop the last row's bytes: 10 declared, 9 present
        std::string bad = bytes.substr(0, bytes.size() - 2 * 4);
        std::stringstream in(bad);
        CHECK_THROWS_WITH(read_embeddings(in), Catch::Matchers::ContainsSubstring("truncated payload"));
    }
    SECTION("NaN payload reports row and col") {
        EmbeddingSet nan_set = make_set(3, 2, {1, 2, 3, 4, 5, 6});
        std::stringstream ok;
        write_embeddings(nan_set, ok);
        std::string raw = ok.str();
        // element (2,1) is the last float
        uint32_t qnan = 0x7fc00000u;
        std::memcpy(raw.data() + raw.size() - 4, &qnan, 4);
        std::stringstream in(raw);
        CHECK_THROWS_WITH(read_embeddings(in),
                          Catch::Matchers::ContainsSubstring("row 2") && Catch::Matchers::ContainsSubstring("col 1"));
    }
    SECTION("trailing bytes rejected") {
        std::stringstream in(bytes + "x");
        CHECK_THROWS_WITH(read_embeddings(in), Catch::Matchers::ContainsSubstring("trailing"));
    }
}

TEST_CASE("manifest text roundtrip with comments") {
    TileManifest m = make_manifest({{"A", 3}, {"B", 2}});
    m.entries[1].split = Split::val_out;
    m.entries[2].mpp = 0.25;
    std::stringstream buf;
    write_manifest(m, buf);
    std::string with_comment = "# produced by a test\n" + buf.str();
    std::stringstream in(with_comment);
    TileManifest back = read_manifest(in);
    REQUIRE(back.entries.size() == m.entries.size());
    for (size_t i = 0; i < m.entries.size(); ++i) {
        CHECK(back.entries[i].tile_id == m.entries[i].tile_id);
        CHECK(back.entries[i].group == m.entries[i].group);
        CHECK(back.entries[i].mpp == m.entries[i].mpp);
        CHECK(back.entries[i].split == m.entries[i].split);
    }
}

TEST_CASE("manifest rejects bad rows") {
    std::string header(manifest_format::kHeader);
    SECTION("missing header") {
        std::stringstream in("t0\ts0\tA\t0\t0\t224\t224\t0.5\ttrain\n");
        CHECK_THROWS_WITH(read_manifest(in), Catch::Matchers::ContainsSubstring("header"));
    }
    SECTION("bad split") {
        std::stringstream in(header + "\nt0\ts0\tA\t0\t0\t224\t224\t0.5\tnope\n");
        CHECK_THROWS_WITH(read_manifest(in), Catch::Matchers::ContainsSubstring("split"));
    }
    SECTION("duplicate tile_id") {
        std::stringstream in(header + "\nt0\ts0\tA\t0\t0\t224\t224\t0.5\ttrain\nt0\ts0\tA\t0\t0\t224\t224\t0.5\ttrain\n");
        CHECK_THROWS_WITH(read_manifest(in), Catch::Matchers::ContainsSubstring("duplicate"));
    }
    SECTION("non-positive width") {
        std::stringstream in(header + "\nt0\ts0\tA\t0\t0\t0\t224\t0.5\ttrain\n");
        CHECK_THROWS(read_manifest(in));
    }
}

TEST_CASE("stratified sample: single group degenerates to plain subsample") {
    TileManifest m = make_manifest({{"A", 20}});
    TileManifest s = stratified_sample(m, 5, 7);
    REQUIRE(s.entries.size() == 5);
    for (const auto& e : s.entries) CHECK(e.group == "A");
}

TEST_CASE("stratified sample: hand-apportioned 60/40 split") {
    // hand oracle: quotas are 10*0.6=6.0 and 10*0.4=4.0, no remainders
    TileManifest m = make_manifest({{"A", 60}, {"B", 40}});
    TileManifest s = stratified_sample(m, 10, 3);
    std::map<std::string, int> counts;
    for (const auto& e : s.entries) counts[e.group]++;
    CHECK(counts["A"] == 6);
    CHECK(counts["B"] == 4);
}

TEST_CASE("stratified sample: remainder tie broken lexicographically") {
    // enumeration oracle: quotas 2/3 each, all floors 0, equal remainders;
    // the two lexicographically smallest groups win the two leftover seats
    TileManifest m = make_manifest({{"C", 1}, {"A", 1}, {"B", 1}});
    TileManifest s = stratified_sample(m, 2, 11);
    std::set<std::string> groups;
    for (const auto& e : s.entries) groups.insert(e.group);
    CHECK(groups == std::set<std::string>{"A", "B"});
}

TEST_CASE("stratified sample: exactness properties on random manifests") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<std::string, int64_t>> spec;
        int groups = 1 + static_cast<int>(rng.below(6));
        int64_t total = 0;
        for (int g = 0; g < groups; ++g) {
            int64_t c = 1 + static_cast<int64_t>(rng.below(30));
            spec.emplace_back(std::string(1, static_cast<char>('A' + g)), c);
            total += c;
        }
        TileManifest m = make_manifest(spec);
        int64_t n = static_cast<int64_t>(rng.below(static_cast<uint64_t>(total) + 1));
        TileManifest s = stratified_sample(m, n, 17 + trial);

        std::map<std::string, int64_t> counts;
        for (const auto& e : s.entries) counts[e.group]++;
        int64_t sum = 0;
        for (const auto& [g, size] : spec) {
            double share = static_cast<double>(n) * static_cast<double>(size) / static_cast<double>(total);
            CHECK(std::abs(static_cast<double>(counts[g]) - share) < 1.0 + 1e-9);
            sum += counts[g];
        }
        CHECK(sum == n);

        // same seed => identical output
        TileManifest s2 = stratified_sample(m, n, 17 + trial);
        REQUIRE(s2.entries.size() == s.entries.size());
        for (size_t i = 0; i < s.entries.size(); ++i) CHECK(s2.entries[i].tile_id == s.entries[i].tile_id);
    }
}

TEST_CASE("stratified sample rejects n beyond population") {
    TileManifest m = make_manifest({{"A", 4}});
    CHECK_THROWS_WITH(stratified_sample(m, 5, 0), Catch::Matchers::ContainsSubstring("exceeds population"));
}

TEST_CASE("pair_by_id identity and reversal") {
    EmbeddingSet ref = make_set(3, 2, {1, 0, 0, 1, 1, 1});
    std::vector<std::string> ids{"a", "b", "c"};

    PairedSets same = pair_by_id(ref, ids, ref, ids);
    CHECK(same.pairing == std::vector<int64_t>{0, 1, 2});

    EmbeddingSet cand = make_set(3, 2, {1, 1, 0, 1, 1, 0});
    std::vector<std::string> rev{"c", "b", "a"};
    PairedSets flipped = pair_by_id(ref, ids, cand, rev);
    CHECK(flipped.pairing == std::vector<int64_t>{2, 1, 0});
}

TEST_CASE("pair_by_id names the offending id") {
    EmbeddingSet ref = make_set(2, 2, {1, 0, 0, 1});
    EmbeddingSet cand = make_set(2, 2, {1, 0, 0, 1});
    CHECK_THROWS_WITH(pair_by_id(ref, {"a", "b"}, cand, {"a", "zz"}),
                      Catch::Matchers::ContainsSubstring("'zz'"));
    CHECK_THROWS_WITH(pair_by_id(ref, {"a", "a"}, cand, {"a", "b"}),
                      Catch::Matchers::ContainsSubstring("duplicate reference id"));
    CHECK_THROWS_WITH(pair_by_id(ref, {"a", "b"}, cand, {"a", "a"}),
                      Catch::Matchers::ContainsSubstring("duplicate candidate id"));
}

TEST_CASE("pairing composes to identity on the candidate index set") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        int64_t n = 2 + static_cast<int64_t>(rng.below(20));
        EmbeddingSet ref;
        ref.rows = n;
        ref.dim = 3;
        ref.extractor_id = "toy";
        ref.source_tag = "ref";
        ref.data.resize(static_cast<size_t>(3 * n));
        for (auto& v : ref.data) v = static_cast<float>(rng.normal());
        std::vector<std::string> ref_ids;
        for (int64_t i = 0; i < n; ++i) ref_ids.push_back("id" + std::to_string(i));

        // candidate = shuffled subset of reference ids
        std::vector<int64_t> pick = rng.sample_without_replacement(n, 1 + static_cast<int64_t>(rng.below(static_cast<uint64_t>(n))));
        EmbeddingSet cand;
        cand.rows = static_cast<int64_t>(pick.size());
        cand.dim = 3;
        cand.extractor_id = "toy";
        cand.source_tag = "cand";
        std::vector<std::string> cand_ids;
        for (int64_t r : pick) {
            auto row = ref.row(r);
            cand.data.insert(cand.data.end(), row.begin(), row.end());
            cand_ids.push_back(ref_ids[static_cast<size_t>(r)]);
        }
        PairedSets fwd = pair_by_id(ref, ref_ids, cand, cand_ids);
        // bijection onto its image
        std::set<int64_t> image(fwd.pairing.begin(), fwd.pairing.end());
        CHECK(image.size() == fwd.pairing.size());
        // swapped-argument pairing composes to identity on candidate indices
        PairedSets bwd = pair_by_id(cand, cand_ids, cand, cand_ids);
        for (size_t i = 0; i < fwd.pairing.size(); ++i) {
            CHECK(ref_ids[static_cast<size_t>(fwd.pairing[i])] == cand_ids[i]);
            CHECK(bwd.pairing[i] == static_cast<int64_t>(i));
        }
    }
}
