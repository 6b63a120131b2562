#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/image.hpp"
#include "tilekit/manifest.hpp"
#include "tilekit/rng.hpp"

namespace tilekit {

// Synthetic "slide": an unbounded deterministic texture addressed by absolute
// pixel coordinates. Rendering a tile twice, or rendering an enlarged tile and
// cropping back, reproduces identical bytes by construction. Integer-only
// arithmetic keeps the pattern reproducible from other languages, which the
// codec reference tests rely on.

inline uint64_t sm64_mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace toyslide_detail {
inline uint8_t clamp_u8(int64_t v) { return static_cast<uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v)); }
}  // namespace toyslide_detail

// One pixel of the slide texture: per-slide color offsets, diagonal gradients,
// a 16-px checker, and hash noise.
inline void slide_pixel(uint64_t slide_seed, int64_t x, int64_t y, uint8_t rgb[3]) {
    using toyslide_detail::clamp_u8;
    uint64_t base = sm64_mix(slide_seed);
    int64_t roff = static_cast<int64_t>(base & 63);
    int64_t goff = static_cast<int64_t>((base >> 6) & 63);
    int64_t boff = static_cast<int64_t>((base >> 12) & 63);

    uint64_t h = sm64_mix(slide_seed * 0x100000001B3ull + (static_cast<uint64_t>(y) << 20) + static_cast<uint64_t>(x));
    int64_t nr = static_cast<int64_t>(h & 31) - 16;
    int64_t ng = static_cast<int64_t>((h >> 5) & 31) - 16;
    int64_t nb = static_cast<int64_t>((h >> 10) & 31) - 16;

    int64_t checker = (((x >> 4) ^ (y >> 4)) & 1) * 64;
    int64_t gx = (x >> 1) & 127;
    int64_t gy = (y >> 1) & 127;

    rgb[0] = clamp_u8(roff + gx + checker + nr);
    rgb[1] = clamp_u8(goff + gy + checker + ng);
    rgb[2] = clamp_u8(boff + (((x + y) >> 2) & 127) + nb);
}

inline RasterImage render_region(uint64_t slide_seed, int64_t x0, int64_t y0, int64_t w, int64_t h) {
    if (w < 1 || h < 1) throw_usage("render_region: empty region");
    if (x0 < 0 || y0 < 0) throw_data("render_region: negative coordinates");
    RasterImage img = RasterImage::make(w, h, 3);
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x) {
            uint8_t rgb[3];
            slide_pixel(slide_seed, x0 + x, y0 + y, rgb);
            img.at(x, y, 0) = rgb[0];
            img.at(x, y, 1) = rgb[1];
            img.at(x, y, 2) = rgb[2];
        }
    return img;
}

inline uint64_t slide_seed_for(const std::string& slide_id) { return sm64_mix(fnv1a64(slide_id)); }

inline RasterImage render_tile(const TileRecord& rec) {
    return render_region(slide_seed_for(rec.slide_id), rec.x, rec.y, rec.width, rec.height);
}

struct TileCorpusConfig {
    int64_t tiles = 100;
    int64_t tile_size = 224;
    int64_t slides = 8;
    int64_t slide_width = 4096;
    int64_t slide_height = 4096;
    int64_t margin_clearance = 16;  // keep expansion by this margin in bounds
    Split split = Split::val_out;
    uint64_t seed = 0;
};

// Deterministic manifest over the synthetic slides; coordinates leave room for
// the +/- margin expansion.
inline TileManifest make_tile_corpus(const TileCorpusConfig& cfg) {
    if (cfg.tiles < 1 || cfg.slides < 1) throw_usage("make_tile_corpus: need at least one tile and slide");
    const int64_t lo = cfg.margin_clearance;
    const int64_t hi_x = cfg.slide_width - cfg.tile_size - cfg.margin_clearance;
    const int64_t hi_y = cfg.slide_height - cfg.tile_size - cfg.margin_clearance;
    if (hi_x < lo || hi_y < lo) throw_usage("make_tile_corpus: slide too small for tile size and clearance");

    TileManifest m;
    Rng rng(cfg.seed, fnv1a64("tile-corpus"));
    for (int64_t i = 0; i < cfg.tiles; ++i) {
        TileRecord rec;
        rec.tile_id = "tile" + std::to_string(i);
        rec.slide_id = "slide" + std::to_string(static_cast<int64_t>(rng.below(static_cast<uint64_t>(cfg.slides))));
        rec.group = "G" + std::to_string(fnv1a64(rec.slide_id) % 4);
        rec.x = lo + static_cast<int64_t>(rng.below(static_cast<uint64_t>(hi_x - lo + 1)));
        rec.y = lo + static_cast<int64_t>(rng.below(static_cast<uint64_t>(hi_y - lo + 1)));
        rec.width = cfg.tile_size;
        rec.height = cfg.tile_size;
        rec.mpp = 0.5;
        rec.split = cfg.split;
        m.entries.push_back(rec);
    }
    return m;
}

}  // namespace tilekit
