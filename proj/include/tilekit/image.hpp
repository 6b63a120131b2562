#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/manifest.hpp"

namespace tilekit {

// 8-bit interleaved raster, 1 or 3 channels, row-major.
struct RasterImage {
    int64_t width = 0;
    int64_t height = 0;
    int channels = 0;
    std::vector<uint8_t> data;

    static RasterImage make(int64_t w, int64_t h, int c, uint8_t fill = 0) {
        RasterImage img;
        img.width = w;
        img.height = h;
        img.channels = c;
        img.data.assign(static_cast<size_t>(w) * static_cast<size_t>(h) * static_cast<size_t>(c), fill);
        img.validate();
        return img;
    }

    uint8_t& at(int64_t x, int64_t y, int c) {
        return data[(static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)) *
                        static_cast<size_t>(channels) +
                    static_cast<size_t>(c)];
    }
    uint8_t at(int64_t x, int64_t y, int c) const {
        return data[(static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)) *
                        static_cast<size_t>(channels) +
                    static_cast<size_t>(c)];
    }

    void validate() const {
        if (width < 1 || height < 1) throw_data("RasterImage: empty dimensions");
        if (channels != 1 && channels != 3) throw_data("RasterImage: channels must be 1 or 3");
        if (data.size() != static_cast<size_t>(width) * static_cast<size_t>(height) * static_cast<size_t>(channels))
            throw_data("RasterImage: data length mismatch");
    }
};

// Square grid of real-valued feature tokens (g x g positions, dim channels),
// position-major.
struct TokenGrid {
    int64_t side = 0;
    int64_t dim = 0;
    std::vector<float> data;

    float& at(int64_t r, int64_t c, int64_t k) {
        return data[(static_cast<size_t>(r) * static_cast<size_t>(side) + static_cast<size_t>(c)) *
                        static_cast<size_t>(dim) +
                    static_cast<size_t>(k)];
    }
    float at(int64_t r, int64_t c, int64_t k) const {
        return data[(static_cast<size_t>(r) * static_cast<size_t>(side) + static_cast<size_t>(c)) *
                        static_cast<size_t>(dim) +
                    static_cast<size_t>(k)];
    }

    void validate() const {
        if (side < 1 || dim < 1) throw_data("TokenGrid: empty dimensions");
        if (data.size() != static_cast<size_t>(side) * static_cast<size_t>(side) * static_cast<size_t>(dim))
            throw_data("TokenGrid: data length mismatch");
        for (float v : data)
            if (!is_finite(v)) throw_data("TokenGrid: non-finite token value");
    }
};

// Symmetric coordinate expansion: the original record becomes the centered
// crop of the expanded one. Fails when any side leaves the slide.
inline TileRecord expand_tile_coords(const TileRecord& rec, int64_t margin, int64_t slide_w, int64_t slide_h) {
    rec.validate();
    if (margin < 0) throw_usage("expand_tile_coords: margin must be >= 0");
    TileRecord out = rec;
    out.x = rec.x - margin;
    out.y = rec.y - margin;
    out.width = rec.width + 2 * margin;
    out.height = rec.height + 2 * margin;
    if (out.x < 0) throw_data("expand_tile_coords: tile '" + rec.tile_id + "' overflows the left slide bound");
    if (out.y < 0) throw_data("expand_tile_coords: tile '" + rec.tile_id + "' overflows the top slide bound");
    if (out.x + out.width > slide_w)
        throw_data("expand_tile_coords: tile '" + rec.tile_id + "' overflows the right slide bound");
    if (out.y + out.height > slide_h)
        throw_data("expand_tile_coords: tile '" + rec.tile_id + "' overflows the bottom slide bound");
    return out;
}

// Center crop with floor((src-target)/2) offsets per axis.
inline RasterImage center_crop(const RasterImage& img, int64_t target_w, int64_t target_h) {
    img.validate();
    if (target_w < 1 || target_h < 1) throw_usage("center_crop: target must be positive");
    if (target_w > img.width || target_h > img.height)
        throw_data("center_crop: target " + std::to_string(target_w) + "x" + std::to_string(target_h) +
                   " exceeds source " + std::to_string(img.width) + "x" + std::to_string(img.height));
    const int64_t off_x = (img.width - target_w) / 2;
    const int64_t off_y = (img.height - target_h) / 2;
    RasterImage out = RasterImage::make(target_w, target_h, img.channels);
    const size_t row_bytes = static_cast<size_t>(target_w) * static_cast<size_t>(img.channels);
    for (int64_t y = 0; y < target_h; ++y) {
        const uint8_t* src = &img.data[((static_cast<size_t>(y + off_y)) * static_cast<size_t>(img.width) +
                                        static_cast<size_t>(off_x)) *
                                       static_cast<size_t>(img.channels)];
        std::copy(src, src + row_bytes, out.data.begin() + static_cast<int64_t>(static_cast<size_t>(y) * row_bytes));
    }
    return out;
}

}  // namespace tilekit
