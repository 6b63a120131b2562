#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tilekit/resample.hpp"
#include "tilekit/rng.hpp"

using namespace tilekit;

TEST_CASE("weight rows form a partition of unity") {
    for (auto [in, out] : std::vector<std::pair<int64_t, int64_t>>{
             {16, 14}, {256, 224}, {224, 256}, {100, 7}, {7, 100}, {8, 8}, {5, 1}, {1, 5}}) {
        auto rows = bicubic_weight_rows(in, out);
        REQUIRE(rows.size() == static_cast<size_t>(out));
        for (const auto& r : rows) {
            double sum = 0.0;
            for (double w : r.w) sum += w;
            CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("same-size resize is the identity") {
    Rng rng(1);
    RasterImage img = RasterImage::make(17, 13, 3);
    for (auto& v : img.data) v = static_cast<uint8_t>(rng.below(256));
    RasterImage out = bicubic_resize(img, 17, 13);
    CHECK(out.data == img.data);  // 8-bit path: exact

    TokenGrid grid;
    grid.side = 9;
    grid.dim = 4;
    grid.data.resize(9 * 9 * 4);
    for (auto& v : grid.data) v = static_cast<float>(rng.normal());
    TokenGrid gout = bicubic_resize(grid, 9);
    for (size_t i = 0; i < grid.data.size(); ++i) CHECK(std::abs(gout.data[i] - grid.data[i]) <= 1e-6f);
}

TEST_CASE("constant images stay constant at any size") {
    RasterImage img = RasterImage::make(32, 32, 1, 137);
    for (auto [w, h] : std::vector<std::pair<int64_t, int64_t>>{{7, 7}, {15, 31}, {64, 64}, {33, 9}}) {
        RasterImage out = bicubic_resize(img, w, h);
        for (uint8_t v : out.data) CHECK(v == 137);
    }
}

TEST_CASE("16x16 -> 14x14 token ramp stays within 1e-3 of the ideal ramp") {
    // closed-form oracle: samples of the continuous ramp F(u) = u - 0.5 land at
    // output centers (r + 0.5) * 16/14, so ideal(r) = (r + 0.5) * 16/14 - 0.5
    TokenGrid grid;
    grid.side = 16;
    grid.dim = 2;
    grid.data.resize(16 * 16 * 2);
    for (int64_t r = 0; r < 16; ++r)
        for (int64_t c = 0; c < 16; ++c) {
            grid.at(r, c, 0) = static_cast<float>(r);  // vertical ramp
            grid.at(r, c, 1) = static_cast<float>(c);  // horizontal ramp
        }
    TokenGrid out = bicubic_resize(grid, 14);
    double worst = 0.0;
    for (int64_t r = 0; r < 14; ++r)
        for (int64_t c = 0; c < 14; ++c) {
            double ideal_r = (static_cast<double>(r) + 0.5) * 16.0 / 14.0 - 0.5;
            double ideal_c = (static_cast<double>(c) + 0.5) * 16.0 / 14.0 - 0.5;
            worst = std::max(worst, std::abs(out.at(r, c, 0) - ideal_r));
            worst = std::max(worst, std::abs(out.at(r, c, 1) - ideal_c));
        }
    INFO("max ramp deviation " << worst);
    CHECK(worst <= 1e-3);
}

TEST_CASE("downscale then upscale changes a smooth gradient by at most 2 code values") {
    RasterImage img = RasterImage::make(256, 256, 3);
    for (int64_t y = 0; y < 256; ++y)
        for (int64_t x = 0; x < 256; ++x) {
            img.at(x, y, 0) = static_cast<uint8_t>(x);
            img.at(x, y, 1) = static_cast<uint8_t>(y);
            img.at(x, y, 2) = static_cast<uint8_t>((x + y) / 2);
        }
    RasterImage down = bicubic_resize(img, 128, 128);
    RasterImage up = bicubic_resize(down, 256, 256);
    int worst = 0;
    for (size_t i = 0; i < img.data.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<int>(img.data[i]) - static_cast<int>(up.data[i])));
    CHECK(worst <= 2);
}

TEST_CASE("resize rejects empty targets") {
    RasterImage img = RasterImage::make(8, 8, 1);
    CHECK_THROWS(bicubic_resize(img, 0, 4));
    TokenGrid grid;
    grid.side = 4;
    grid.dim = 1;
    grid.data.assign(16, 0.0f);
    CHECK_THROWS(bicubic_resize(grid, 0));
}
