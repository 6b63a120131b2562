#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/image.hpp"

namespace tilekit {

// Catmull-Rom cubic (a = -0.5), support 2.
inline double cubic_kernel(double x) {
    constexpr double a = -0.5;
    x = std::fabs(x);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
    return 0.0;
}

struct WeightRow {
    std::vector<int32_t> idx;  // source sample indices, already clamped into range
    std::vector<double> w;
};

// Per-output-coordinate resampling weights for one axis. The kernel support is
// stretched by the scale factor when downscaling (anti-aliasing). Edge taps
// clamp to the border sample. Each row is normalized to sum to 1 and its first
// moment is matched to the output center, so constants and linear ramps are
// reproduced exactly; plain normalization alone leaves a few-1e-3 ramp bias at
// fractional scale factors.
inline std::vector<WeightRow> bicubic_weight_rows(int64_t in_size, int64_t out_size) {
    if (in_size < 1 || out_size < 1) throw_usage("bicubic_weight_rows: sizes must be >= 1");
    const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
    const double filterscale = std::max(scale, 1.0);
    const double support = 2.0 * filterscale;

    std::vector<WeightRow> rows(static_cast<size_t>(out_size));
    for (int64_t i = 0; i < out_size; ++i) {
        const double center = (static_cast<double>(i) + 0.5) * scale;
        const int64_t jmin = static_cast<int64_t>(std::ceil(center - support - 0.5));
        const int64_t jmax = static_cast<int64_t>(std::floor(center + support - 0.5));
        WeightRow& row = rows[static_cast<size_t>(i)];
        for (int64_t j = jmin; j <= jmax; ++j) {
            double wj = cubic_kernel((static_cast<double>(j) + 0.5 - center) / filterscale);
            int64_t q = std::clamp<int64_t>(j, 0, in_size - 1);
            row.idx.push_back(static_cast<int32_t>(q));
            row.w.push_back(wj);
        }

        const size_t m = row.w.size();
        double s0 = 0.0, s1 = 0.0, t1 = 0.0, t2 = 0.0;
        for (size_t k = 0; k < m; ++k) {
            double u = static_cast<double>(row.idx[k]) + 0.5 - center;
            s0 += row.w[k];
            s1 += row.w[k] * u;
            t1 += u;
            t2 += u * u;
        }
        double det = static_cast<double>(m) * t2 - t1 * t1;
        if (std::fabs(det) > 1e-12) {
            double alpha = ((1.0 - s0) * t2 + s1 * t1) / det;
            double beta = (-(1.0 - s0) * t1 - static_cast<double>(m) * s1) / det;
            for (size_t k = 0; k < m; ++k)
                row.w[k] += alpha + beta * (static_cast<double>(row.idx[k]) + 0.5 - center);
        } else {
            // every tap clamps to one sample; only normalization is possible
            for (size_t k = 0; k < m; ++k) row.w[k] /= s0;
        }
    }
    return rows;
}

namespace detail {

// Separable application on a double-valued plane, horizontal then vertical.
inline std::vector<double> resample_plane(const std::vector<double>& src, int64_t in_w, int64_t in_h, int64_t out_w,
                                          int64_t out_h) {
    const std::vector<WeightRow> wx = bicubic_weight_rows(in_w, out_w);
    const std::vector<WeightRow> wy = bicubic_weight_rows(in_h, out_h);

    std::vector<double> mid(static_cast<size_t>(out_w) * static_cast<size_t>(in_h));
    for (int64_t y = 0; y < in_h; ++y) {
        const double* srow = src.data() + static_cast<size_t>(y) * static_cast<size_t>(in_w);
        double* drow = mid.data() + static_cast<size_t>(y) * static_cast<size_t>(out_w);
        for (int64_t x = 0; x < out_w; ++x) {
            const WeightRow& r = wx[static_cast<size_t>(x)];
            double acc = 0.0;
            for (size_t k = 0; k < r.w.size(); ++k) acc += r.w[k] * srow[r.idx[k]];
            drow[x] = acc;
        }
    }
    std::vector<double> out(static_cast<size_t>(out_w) * static_cast<size_t>(out_h));
    for (int64_t y = 0; y < out_h; ++y) {
        const WeightRow& r = wy[static_cast<size_t>(y)];
        for (int64_t x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (size_t k = 0; k < r.w.size(); ++k)
                acc += r.w[k] * mid[static_cast<size_t>(r.idx[k]) * static_cast<size_t>(out_w) + static_cast<size_t>(x)];
            out[static_cast<size_t>(y) * static_cast<size_t>(out_w) + static_cast<size_t>(x)] = acc;
        }
    }
    return out;
}

inline uint8_t round_clamp_u8(double v) {
    double r = v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5);  // half away from zero
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<uint8_t>(r);
}

}  // namespace detail

inline RasterImage bicubic_resize(const RasterImage& img, int64_t out_w, int64_t out_h) {
    img.validate();
    if (out_w < 1 || out_h < 1) throw_usage("bicubic_resize: target dimensions must be >= 1");
    RasterImage out = RasterImage::make(out_w, out_h, img.channels);
    std::vector<double> plane(static_cast<size_t>(img.width) * static_cast<size_t>(img.height));
    for (int c = 0; c < img.channels; ++c) {
        for (int64_t y = 0; y < img.height; ++y)
            for (int64_t x = 0; x < img.width; ++x)
                plane[static_cast<size_t>(y) * static_cast<size_t>(img.width) + static_cast<size_t>(x)] =
                    static_cast<double>(img.at(x, y, c));
        std::vector<double> res = detail::resample_plane(plane, img.width, img.height, out_w, out_h);
        for (int64_t y = 0; y < out_h; ++y)
            for (int64_t x = 0; x < out_w; ++x)
                out.at(x, y, c) = detail::round_clamp_u8(
                    res[static_cast<size_t>(y) * static_cast<size_t>(out_w) + static_cast<size_t>(x)]);
    }
    return out;
}

// Token grids share the image resampler, per channel, without rounding.
inline TokenGrid bicubic_resize(const TokenGrid& grid, int64_t out_side) {
    grid.validate();
    if (out_side < 1) throw_usage("bicubic_resize: target side must be >= 1");
    TokenGrid out;
    out.side = out_side;
    out.dim = grid.dim;
    out.data.resize(static_cast<size_t>(out_side) * static_cast<size_t>(out_side) * static_cast<size_t>(grid.dim));
    std::vector<double> plane(static_cast<size_t>(grid.side) * static_cast<size_t>(grid.side));
    for (int64_t k = 0; k < grid.dim; ++k) {
        for (int64_t r = 0; r < grid.side; ++r)
            for (int64_t c = 0; c < grid.side; ++c)
                plane[static_cast<size_t>(r) * static_cast<size_t>(grid.side) + static_cast<size_t>(c)] =
                    static_cast<double>(grid.at(r, c, k));
        std::vector<double> res = detail::resample_plane(plane, grid.side, grid.side, out_side, out_side);
        for (int64_t r = 0; r < out_side; ++r)
            for (int64_t c = 0; c < out_side; ++c)
                out.at(r, c, k) =
                    static_cast<float>(res[static_cast<size_t>(r) * static_cast<size_t>(out_side) + static_cast<size_t>(c)]);
    }
    return out;
}

}  // namespace tilekit
