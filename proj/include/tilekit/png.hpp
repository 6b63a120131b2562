#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/image.hpp"

namespace tilekit {

// Minimal PNG support for the lossless tile path: 8-bit grayscale and RGB,
// non-interlaced. The writer emits unfiltered rows; the reader handles all
// five standard row filters.

namespace png_detail {

inline void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline uint32_t get_u32_be(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

inline void write_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& payload) {
    put_u32_be(out, static_cast<uint32_t>(payload.size()));
    size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uint32_t crc = ::crc32(0L, out.data() + type_at, static_cast<uInt>(4 + payload.size()));
    put_u32_be(out, crc);
}

inline uint8_t paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<uint8_t>(a);
    if (pb <= pc) return static_cast<uint8_t>(b);
    return static_cast<uint8_t>(c);
}

inline const uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

}  // namespace png_detail

inline std::vector<uint8_t> png_encode(const RasterImage& img) {
    img.validate();
    std::vector<uint8_t> out(png_detail::kSignature, png_detail::kSignature + 8);

    std::vector<uint8_t> ihdr;
    png_detail::put_u32_be(ihdr, static_cast<uint32_t>(img.width));
    png_detail::put_u32_be(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(8);                                   // bit depth
    ihdr.push_back(img.channels == 1 ? 0 : 2);           // color type
    ihdr.push_back(0);                                   // compression
    ihdr.push_back(0);                                   // filter method
    ihdr.push_back(0);                                   // no interlace
    png_detail::write_chunk(out, "IHDR", ihdr);

    const size_t row_bytes = static_cast<size_t>(img.width) * static_cast<size_t>(img.channels);
    std::vector<uint8_t> raw;
    raw.reserve((row_bytes + 1) * static_cast<size_t>(img.height));
    for (int64_t y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter: none
        const uint8_t* src = img.data.data() + static_cast<size_t>(y) * row_bytes;
        raw.insert(raw.end(), src, src + row_bytes);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
        throw_numeric("png_encode: deflate failed");
    compressed.resize(bound);
    png_detail::write_chunk(out, "IDAT", compressed);
    png_detail::write_chunk(out, "IEND", {});
    return out;
}

inline RasterImage png_decode(const std::vector<uint8_t>& bytes) {
    using namespace png_detail;
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) throw_data("png_decode: bad signature");

    int64_t width = 0, height = 0;
    int channels = 0;
    std::vector<uint8_t> idat;
    size_t pos = 8;
    bool seen_ihdr = false, seen_iend = false;
    while (pos + 12 <= bytes.size()) {
        uint32_t len = get_u32_be(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) throw_data("png_decode: truncated chunk");
        std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        const uint8_t* payload = &bytes[pos + 8];
        uint32_t expect = ::crc32(0L, &bytes[pos + 4], 4 + len);
        if (expect != get_u32_be(&bytes[pos + 8 + len])) throw_data("png_decode: chunk crc mismatch in " + type);

        if (type == "IHDR") {
            if (len != 13) throw_data("png_decode: bad IHDR length");
            width = get_u32_be(payload);
            height = get_u32_be(payload + 4);
            int depth = payload[8], color = payload[9], interlace = payload[12];
            if (depth != 8) throw_data("png_decode: unsupported bit depth " + std::to_string(depth));
            if (color == 0)
                channels = 1;
            else if (color == 2)
                channels = 3;
            else
                throw_data("png_decode: unsupported color type " + std::to_string(color));
            if (interlace != 0) throw_data("png_decode: interlaced images unsupported");
            seen_ihdr = true;
        } else if (type == "IDAT") {
            idat.insert(idat.end(), payload, payload + len);
        } else if (type == "IEND") {
            seen_iend = true;
            break;
        }  // ancillary chunks ignored
        pos += 12 + len;
    }
    if (!seen_ihdr || !seen_iend) throw_data("png_decode: missing IHDR or IEND");

    const size_t row_bytes = static_cast<size_t>(width) * static_cast<size_t>(channels);
    const size_t raw_size = (row_bytes + 1) * static_cast<size_t>(height);
    std::vector<uint8_t> raw(raw_size);
    uLongf out_len = static_cast<uLongf>(raw_size);
    int rc = uncompress(raw.data(), &out_len, idat.data(), static_cast<uLong>(idat.size()));
    if (rc != Z_OK || out_len != raw_size) throw_data("png_decode: inflate failed");

    RasterImage img = RasterImage::make(width, height, channels);
    const int bpp = channels;  // bytes per pixel at depth 8
    std::vector<uint8_t> prev(row_bytes, 0);
    for (int64_t y = 0; y < height; ++y) {
        const uint8_t* src = raw.data() + static_cast<size_t>(y) * (row_bytes + 1);
        uint8_t filter = src[0];
        uint8_t* dst = img.data.data() + static_cast<size_t>(y) * row_bytes;
        for (size_t x = 0; x < row_bytes; ++x) {
            int a = x >= static_cast<size_t>(bpp) ? dst[x - static_cast<size_t>(bpp)] : 0;
            int b = prev[x];
            int c = x >= static_cast<size_t>(bpp) ? prev[x - static_cast<size_t>(bpp)] : 0;
            int v = src[1 + x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw_data("png_decode: unknown filter type " + std::to_string(filter));
            }
            dst[x] = static_cast<uint8_t>(v & 0xff);
        }
        std::memcpy(prev.data(), dst, row_bytes);
    }
    return img;
}

inline void save_png(const RasterImage& img, const std::filesystem::path& path) {
    std::vector<uint8_t> bytes = png_encode(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("save_png: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw_data("save_png: write failed for " + path.string());
}

inline RasterImage load_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("load_png: cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return png_decode(bytes);
}

}  // namespace tilekit
