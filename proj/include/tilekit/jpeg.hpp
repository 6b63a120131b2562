#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/image.hpp"

namespace tilekit {

enum class ChromaSubsampling { cs420, cs444 };

struct JpegConfig {
    int quality = 70;
    ChromaSubsampling subsampling = ChromaSubsampling::cs420;

    void validate() const {
        if (quality < 1 || quality > 100) throw_usage("JpegConfig: quality must be in 1..100");
    }
};

struct QuantTables {
    std::array<int, 64> luma;    // natural (row-major) order
    std::array<int, 64> chroma;
};

namespace jpeg_detail {

// ITU T.81 Annex K.1 example quantization tables.
inline constexpr std::array<int, 64> kBaseLuma = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr std::array<int, 64> kBaseChroma = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

inline constexpr std::array<int, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,   //
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,  //
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,  //
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// Annex K.3 typical Huffman tables (bits per code length 1..16, then symbols).
struct HuffSpec {
    const uint8_t* bits;  // 16 entries
    const uint8_t* vals;
    int n_vals;
};

inline constexpr uint8_t kDcLumaBits[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
inline constexpr uint8_t kDcVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
inline constexpr uint8_t kDcChromaBits[16] = {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};

inline constexpr uint8_t kAcLumaBits[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d};
inline constexpr uint8_t kAcLumaVals[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71,
    0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37,
    0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83,
    0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
    0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
    0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

inline constexpr uint8_t kAcChromaBits[16] = {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77};
inline constexpr uint8_t kAcChromaVals[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22,
    0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1,
    0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36,
    0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
    0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a,
    0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a,
    0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba,
    0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
    0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

inline HuffSpec dc_luma_spec() { return {kDcLumaBits, kDcVals, 12}; }
inline HuffSpec dc_chroma_spec() { return {kDcChromaBits, kDcVals, 12}; }
inline HuffSpec ac_luma_spec() { return {kAcLumaBits, kAcLumaVals, 162}; }
inline HuffSpec ac_chroma_spec() { return {kAcChromaBits, kAcChromaVals, 162}; }

// Orthonormal 8x8 DCT basis: T[u][x] = 0.5 c(u) cos((2x+1) u pi / 16).
struct DctBasis {
    double t[8][8];
    DctBasis() {
        for (int u = 0; u < 8; ++u)
            for (int x = 0; x < 8; ++x) {
                double cu = u == 0 ? 1.0 / std::numbers::sqrt2 : 1.0;
                t[u][x] = 0.5 * cu * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / 16.0);
            }
    }
};

inline const DctBasis& dct_basis() {
    static const DctBasis basis;
    return basis;
}

inline void fdct8x8(const double in[64], double out[64]) {
    const auto& T = dct_basis().t;
    double tmp[64];
    for (int u = 0; u < 8; ++u)
        for (int x = 0; x < 8; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += T[u][k] * in[k * 8 + x];
            tmp[u * 8 + x] = acc;
        }
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += tmp[u * 8 + k] * T[v][k];
            out[u * 8 + v] = acc;
        }
}

inline void idct8x8(const double in[64], double out[64]) {
    const auto& T = dct_basis().t;
    double tmp[64];
    for (int x = 0; x < 8; ++x)
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += T[k][x] * in[k * 8 + v];
            tmp[x * 8 + v] = acc;
        }
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += tmp[x * 8 + k] * T[k][y];
            out[x * 8 + y] = acc;
        }
}

inline int round_half_away(double v) {
    return v >= 0.0 ? static_cast<int>(std::floor(v + 0.5)) : static_cast<int>(std::ceil(v - 0.5));
}

struct HuffEncodeTable {
    uint16_t code[256];
    uint8_t len[256];
};

inline HuffEncodeTable build_encode_table(const HuffSpec& spec) {
    HuffEncodeTable table{};
    uint16_t code = 0;
    int k = 0;
    for (int l = 1; l <= 16; ++l) {
        for (int i = 0; i < spec.bits[l - 1]; ++i) {
            table.code[spec.vals[k]] = code;
            table.len[spec.vals[k]] = static_cast<uint8_t>(l);
            ++code;
            ++k;
        }
        code = static_cast<uint16_t>(code << 1);
    }
    return table;
}

class BitWriter {
public:
    explicit BitWriter(std::vector<uint8_t>& out) : out_(out) {}

    void put(uint32_t bits, int n) {
        acc_ = (acc_ << n) | (bits & ((1u << n) - 1));
        nbits_ += n;
        while (nbits_ >= 8) {
            uint8_t byte = static_cast<uint8_t>((acc_ >> (nbits_ - 8)) & 0xff);
            out_.push_back(byte);
            if (byte == 0xff) out_.push_back(0x00);
            nbits_ -= 8;
        }
    }

    void flush() {
        if (nbits_ > 0) put(0x7f, 8 - nbits_);  // pad with 1s
    }

private:
    std::vector<uint8_t>& out_;
    uint32_t acc_ = 0;
    int nbits_ = 0;
};

inline int bit_category(int v) {
    int a = v < 0 ? -v : v;
    int n = 0;
    while (a) {
        ++n;
        a >>= 1;
    }
    return n;
}

inline void encode_block(BitWriter& bw, const int coeffs[64], int& dc_pred, const HuffEncodeTable& dc,
                         const HuffEncodeTable& ac) {
    int zz[64];
    for (int i = 0; i < 64; ++i) zz[i] = coeffs[kZigzag[i]];

    int diff = zz[0] - dc_pred;
    dc_pred = zz[0];
    int cat = bit_category(diff);
    bw.put(dc.code[cat], dc.len[cat]);
    if (cat > 0) bw.put(static_cast<uint32_t>(diff < 0 ? diff - 1 : diff), cat);

    int run = 0;
    for (int i = 1; i < 64; ++i) {
        if (zz[i] == 0) {
            ++run;
            continue;
        }
        while (run >= 16) {
            bw.put(ac.code[0xf0], ac.len[0xf0]);  // ZRL
            run -= 16;
        }
        int acat = bit_category(zz[i]);
        int symbol = (run << 4) | acat;
        bw.put(ac.code[symbol], ac.len[symbol]);
        bw.put(static_cast<uint32_t>(zz[i] < 0 ? zz[i] - 1 : zz[i]), acat);
        run = 0;
    }
    if (run > 0) bw.put(ac.code[0x00], ac.len[0x00]);  // EOB
}

struct Plane {
    int64_t w = 0, h = 0;
    std::vector<double> v;
    double at(int64_t x, int64_t y) const { return v[static_cast<size_t>(y) * static_cast<size_t>(w) + static_cast<size_t>(x)]; }
    double& at(int64_t x, int64_t y) { return v[static_cast<size_t>(y) * static_cast<size_t>(w) + static_cast<size_t>(x)]; }
};

inline Plane pad_replicate(const Plane& p, int64_t w, int64_t h) {
    Plane out;
    out.w = w;
    out.h = h;
    out.v.resize(static_cast<size_t>(w) * static_cast<size_t>(h));
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x) out.at(x, y) = p.at(std::min(x, p.w - 1), std::min(y, p.h - 1));
    return out;
}

}  // namespace jpeg_detail

// IJG quality scaling over the Annex K base tables:
//   scale = 5000/q (q < 50) else 200 - 2q; entry = clamp((base*scale+50)/100, 1, 255)
inline QuantTables jpeg_quant_tables(int quality) {
    if (quality < 1 || quality > 100) throw_usage("jpeg_quant_tables: quality must be in 1..100");
    int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    QuantTables t;
    for (int i = 0; i < 64; ++i) {
        t.luma[static_cast<size_t>(i)] = std::clamp((jpeg_detail::kBaseLuma[static_cast<size_t>(i)] * scale + 50) / 100, 1, 255);
        t.chroma[static_cast<size_t>(i)] = std::clamp((jpeg_detail::kBaseChroma[static_cast<size_t>(i)] * scale + 50) / 100, 1, 255);
    }
    return t;
}

// Baseline sequential JFIF encoder, fixed Annex-K Huffman tables (no entropy
// optimization pass), so output bytes are a pure function of (pixels, config).
inline std::vector<uint8_t> jpeg_encode(const RasterImage& img, const JpegConfig& cfg) {
    using namespace jpeg_detail;
    img.validate();
    cfg.validate();
    if (img.channels != 3) throw_data("jpeg_encode: only 3-channel images are supported");

    const bool is420 = cfg.subsampling == ChromaSubsampling::cs420;
    const int64_t mcu = is420 ? 16 : 8;
    const int64_t padded_w = (img.width + mcu - 1) / mcu * mcu;
    const int64_t padded_h = (img.height + mcu - 1) / mcu * mcu;

    Plane yp, cbp, crp;
    yp.w = cbp.w = crp.w = img.width;
    yp.h = cbp.h = crp.h = img.height;
    yp.v.resize(static_cast<size_t>(img.width) * static_cast<size_t>(img.height));
    cbp.v.resize(yp.v.size());
    crp.v.resize(yp.v.size());
    for (int64_t y = 0; y < img.height; ++y)
        for (int64_t x = 0; x < img.width; ++x) {
            double r = img.at(x, y, 0), g = img.at(x, y, 1), b = img.at(x, y, 2);
            yp.at(x, y) = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
            cbp.at(x, y) = -0.168735892 * r - 0.331264108 * g + 0.5 * b;
            crp.at(x, y) = 0.5 * r - 0.418687589 * g - 0.081312411 * b;
        }
    yp = pad_replicate(yp, padded_w, padded_h);
    cbp = pad_replicate(cbp, padded_w, padded_h);
    crp = pad_replicate(crp, padded_w, padded_h);

    if (is420) {
        Plane cb2, cr2;
        cb2.w = cr2.w = padded_w / 2;
        cb2.h = cr2.h = padded_h / 2;
        cb2.v.resize(static_cast<size_t>(cb2.w) * static_cast<size_t>(cb2.h));
        cr2.v = cb2.v;
        for (int64_t y = 0; y < cb2.h; ++y)
            for (int64_t x = 0; x < cb2.w; ++x) {
                cb2.at(x, y) = 0.25 * (cbp.at(2 * x, 2 * y) + cbp.at(2 * x + 1, 2 * y) + cbp.at(2 * x, 2 * y + 1) +
                                       cbp.at(2 * x + 1, 2 * y + 1));
                cr2.at(x, y) = 0.25 * (crp.at(2 * x, 2 * y) + crp.at(2 * x + 1, 2 * y) + crp.at(2 * x, 2 * y + 1) +
                                       crp.at(2 * x + 1, 2 * y + 1));
            }
        cbp = std::move(cb2);
        crp = std::move(cr2);
    }

    QuantTables qt = jpeg_quant_tables(cfg.quality);
    std::vector<uint8_t> out;
    auto put16 = [&out](uint16_t v) {
        out.push_back(static_cast<uint8_t>(v >> 8));
        out.push_back(static_cast<uint8_t>(v & 0xff));
    };
    auto marker = [&](uint8_t m) {
        out.push_back(0xff);
        out.push_back(m);
    };

    marker(0xd8);  // SOI
    marker(0xe0);  // APP0 / JFIF
    put16(16);
    const char jfif[5] = {'J', 'F', 'I', 'F', 0};
    out.insert(out.end(), jfif, jfif + 5);
    out.push_back(1);
    out.push_back(1);  // version 1.1
    out.push_back(0);  // aspect-ratio units
    put16(1);
    put16(1);
    out.push_back(0);
    out.push_back(0);  // no thumbnail

    for (int id = 0; id < 2; ++id) {  // DQT
        marker(0xdb);
        put16(2 + 1 + 64);
        out.push_back(static_cast<uint8_t>(id));
        const auto& table = id == 0 ? qt.luma : qt.chroma;
        for (int i = 0; i < 64; ++i) out.push_back(static_cast<uint8_t>(table[static_cast<size_t>(kZigzag[i])]));
    }

    marker(0xc0);  // SOF0, baseline
    put16(8 + 3 * 3);
    out.push_back(8);
    put16(static_cast<uint16_t>(img.height));
    put16(static_cast<uint16_t>(img.width));
    out.push_back(3);
    out.push_back(1);
    out.push_back(is420 ? 0x22 : 0x11);
    out.push_back(0);  // Y
    out.push_back(2);
    out.push_back(0x11);
    out.push_back(1);  // Cb
    out.push_back(3);
    out.push_back(0x11);
    out.push_back(1);  // Cr

    auto write_dht = [&](uint8_t cls_id, const HuffSpec& spec) {
        marker(0xc4);
        put16(static_cast<uint16_t>(2 + 1 + 16 + spec.n_vals));
        out.push_back(cls_id);
        for (int i = 0; i < 16; ++i) out.push_back(spec.bits[i]);
        for (int i = 0; i < spec.n_vals; ++i) out.push_back(spec.vals[i]);
    };
    write_dht(0x00, dc_luma_spec());
    write_dht(0x10, ac_luma_spec());
    write_dht(0x01, dc_chroma_spec());
    write_dht(0x11, ac_chroma_spec());

    marker(0xda);  // SOS
    put16(6 + 2 * 3);
    out.push_back(3);
    out.push_back(1);
    out.push_back(0x00);
    out.push_back(2);
    out.push_back(0x11);
    out.push_back(3);
    out.push_back(0x11);
    out.push_back(0);
    out.push_back(63);
    out.push_back(0);

    HuffEncodeTable dcl = build_encode_table(dc_luma_spec());
    HuffEncodeTable acl = build_encode_table(ac_luma_spec());
    HuffEncodeTable dcc = build_encode_table(dc_chroma_spec());
    HuffEncodeTable acc = build_encode_table(ac_chroma_spec());

    BitWriter bw(out);
    int pred[3] = {0, 0, 0};
    auto code_block = [&](const Plane& p, int64_t bx, int64_t by, const std::array<int, 64>& q, int comp) {
        double block[64], freq[64];
        for (int yy = 0; yy < 8; ++yy)
            for (int xx = 0; xx < 8; ++xx) block[yy * 8 + xx] = p.at(bx * 8 + xx, by * 8 + yy);
        fdct8x8(block, freq);
        int coeffs[64];
        for (int i = 0; i < 64; ++i) coeffs[i] = round_half_away(freq[i] / q[static_cast<size_t>(i)]);
        encode_block(bw, coeffs, pred[comp], comp == 0 ? dcl : dcc, comp == 0 ? acl : acc);
    };

    const int64_t mcus_x = padded_w / mcu, mcus_y = padded_h / mcu;
    for (int64_t my = 0; my < mcus_y; ++my)
        for (int64_t mx = 0; mx < mcus_x; ++mx) {
            if (is420) {
                for (int by = 0; by < 2; ++by)
                    for (int bx = 0; bx < 2; ++bx) code_block(yp, 2 * mx + bx, 2 * my + by, qt.luma, 0);
                code_block(cbp, mx, my, qt.chroma, 1);
                code_block(crp, mx, my, qt.chroma, 2);
            } else {
                code_block(yp, mx, my, qt.luma, 0);
                code_block(cbp, mx, my, qt.chroma, 1);
                code_block(crp, mx, my, qt.chroma, 2);
            }
        }
    bw.flush();
    marker(0xd9);  // EOI
    return out;
}

namespace jpeg_detail {

struct HuffDecodeTable {
    // standard mincode/maxcode/valptr decode structure
    int32_t mincode[17] = {};
    int32_t maxcode[17] = {};
    int32_t valptr[17] = {};
    std::vector<uint8_t> vals;
    bool present = false;
};

inline HuffDecodeTable build_decode_table(const uint8_t bits[16], const std::vector<uint8_t>& vals) {
    HuffDecodeTable t;
    t.vals = vals;
    t.present = true;
    int code = 0, k = 0;
    for (int l = 1; l <= 16; ++l) {
        t.valptr[l] = k;
        t.mincode[l] = code;
        code += bits[l - 1];
        k += bits[l - 1];
        t.maxcode[l] = code - 1;
        if (bits[l - 1] == 0) t.maxcode[l] = -1;
        code <<= 1;
    }
    return t;
}

class BitReader {
public:
    BitReader(const std::vector<uint8_t>& data, size_t pos) : data_(data), pos_(pos) {}

    int bit() {
        if (nbits_ == 0) {
            if (pos_ >= data_.size()) throw_data("jpeg_decode: scan data exhausted");
            uint8_t byte = data_[pos_++];
            if (byte == 0xff) {
                if (pos_ >= data_.size()) throw_data("jpeg_decode: dangling 0xFF in scan");
                uint8_t next = data_[pos_++];
                if (next == 0x00) {
                    // stuffed byte
                } else if (next == 0xd9) {
                    throw_data("jpeg_decode: scan ended before all MCUs were read");
                } else {
                    throw_data("jpeg_decode: unexpected marker inside scan");
                }
            }
            acc_ = byte;
            nbits_ = 8;
        }
        --nbits_;
        return (acc_ >> nbits_) & 1;
    }

    int bits(int n) {
        int v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | bit();
        return v;
    }

    size_t pos() const { return pos_; }

private:
    const std::vector<uint8_t>& data_;
    size_t pos_;
    uint8_t acc_ = 0;
    int nbits_ = 0;
};

inline int decode_symbol(BitReader& br, const HuffDecodeTable& t) {
    int code = br.bit();
    for (int l = 1; l <= 16; ++l) {
        if (t.maxcode[l] >= 0 && code <= t.maxcode[l])
            return t.vals[static_cast<size_t>(t.valptr[l] + code - t.mincode[l])];
        code = (code << 1) | br.bit();
    }
    throw_data("jpeg_decode: invalid Huffman code");
}

inline int extend_value(int v, int cat) {
    // T.81 EXTEND: map the `cat` raw bits to the signed coefficient
    if (cat == 0) return 0;
    return v < (1 << (cat - 1)) ? v - (1 << cat) + 1 : v;
}

}  // namespace jpeg_detail

inline RasterImage jpeg_decode(const std::vector<uint8_t>& bytes) {
    using namespace jpeg_detail;
    if (bytes.size() < 4 || bytes[0] != 0xff || bytes[1] != 0xd8) throw_data("jpeg_decode: missing SOI marker");

    std::array<std::array<int, 64>, 4> qtables{};
    std::array<bool, 4> q_present{};
    HuffDecodeTable dc_tables[4], ac_tables[4];
    int64_t width = 0, height = 0;
    struct Comp {
        int id = 0, h = 1, v = 1, tq = 0, dc_sel = 0, ac_sel = 0;
    };
    std::vector<Comp> comps;
    size_t pos = 2;
    size_t scan_start = 0;

    while (pos + 4 <= bytes.size()) {
        if (bytes[pos] != 0xff) throw_data("jpeg_decode: expected marker");
        uint8_t m = bytes[pos + 1];
        if (m == 0xd8 || m == 0x01 || (m >= 0xd0 && m <= 0xd7)) {
            pos += 2;
            continue;
        }
        uint16_t len = static_cast<uint16_t>((bytes[pos + 2] << 8) | bytes[pos + 3]);
        const uint8_t* seg = &bytes[pos + 4];
        size_t seg_len = static_cast<size_t>(len) - 2;
        if (pos + 2 + len > bytes.size()) throw_data("jpeg_decode: truncated segment");

        if (m == 0xdb) {  // DQT
            size_t p = 0;
            while (p < seg_len) {
                int prec = seg[p] >> 4, id = seg[p] & 0x0f;
                if (prec != 0) throw_data("jpeg_decode: 16-bit quant tables unsupported");
                if (id > 3) throw_data("jpeg_decode: bad quant table id");
                ++p;
                for (int i = 0; i < 64; ++i) qtables[static_cast<size_t>(id)][static_cast<size_t>(kZigzag[i])] = seg[p + static_cast<size_t>(i)];
                q_present[static_cast<size_t>(id)] = true;
                p += 64;
            }
        } else if (m == 0xc4) {  // DHT
            size_t p = 0;
            while (p + 17 <= seg_len) {
                int cls = seg[p] >> 4, id = seg[p] & 0x0f;
                if (id > 3) throw_data("jpeg_decode: bad Huffman table id");
                const uint8_t* bits = seg + p + 1;
                int total = 0;
                for (int i = 0; i < 16; ++i) total += bits[i];
                std::vector<uint8_t> vals(seg + p + 17, seg + p + 17 + total);
                if (cls == 0)
                    dc_tables[id] = build_decode_table(bits, vals);
                else
                    ac_tables[id] = build_decode_table(bits, vals);
                p += 17 + static_cast<size_t>(total);
            }
        } else if (m == 0xc0 || m == 0xc1) {  // SOF0/1 baseline
            if (seg[0] != 8) throw_data("jpeg_decode: only 8-bit precision supported");
            height = (seg[1] << 8) | seg[2];
            width = (seg[3] << 8) | seg[4];
            int nc = seg[5];
            if (nc != 3) throw_data("jpeg_decode: only 3-component images supported");
            for (int c = 0; c < nc; ++c) {
                Comp comp;
                comp.id = seg[6 + 3 * c];
                comp.h = seg[7 + 3 * c] >> 4;
                comp.v = seg[7 + 3 * c] & 0x0f;
                comp.tq = seg[8 + 3 * c];
                comps.push_back(comp);
            }
        } else if (m == 0xc2) {
            throw_data("jpeg_decode: progressive JPEG unsupported");
        } else if (m == 0xdd) {
            throw_data("jpeg_decode: restart intervals unsupported");
        } else if (m == 0xda) {  // SOS
            int ns = seg[0];
            if (ns != static_cast<int>(comps.size())) throw_data("jpeg_decode: SOS component count mismatch");
            for (int c = 0; c < ns; ++c) {
                int cid = seg[1 + 2 * c];
                for (auto& comp : comps)
                    if (comp.id == cid) {
                        comp.dc_sel = seg[2 + 2 * c] >> 4;
                        comp.ac_sel = seg[2 + 2 * c] & 0x0f;
                    }
            }
            scan_start = pos + 2 + len;
            break;
        }  // APPn/COM skipped
        pos += 2 + len;
    }
    if (scan_start == 0 || comps.size() != 3 || width < 1 || height < 1)
        throw_data("jpeg_decode: missing SOF/SOS headers");

    const bool is420 = comps[0].h == 2 && comps[0].v == 2 && comps[1].h == 1 && comps[2].h == 1;
    const bool is444 = comps[0].h == 1 && comps[0].v == 1 && comps[1].h == 1 && comps[2].h == 1;
    if (!is420 && !is444) throw_data("jpeg_decode: unsupported sampling layout");
    for (const auto& c : comps)
        if (!q_present[static_cast<size_t>(c.tq)]) throw_data("jpeg_decode: missing quant table");

    const int64_t mcu = is420 ? 16 : 8;
    const int64_t padded_w = (width + mcu - 1) / mcu * mcu;
    const int64_t padded_h = (height + mcu - 1) / mcu * mcu;
    Plane planes[3];
    for (int c = 0; c < 3; ++c) {
        int64_t cw = c == 0 || is444 ? padded_w : padded_w / 2;
        int64_t ch = c == 0 || is444 ? padded_h : padded_h / 2;
        planes[c].w = cw;
        planes[c].h = ch;
        planes[c].v.assign(static_cast<size_t>(cw) * static_cast<size_t>(ch), 0.0);
    }

    BitReader br(bytes, scan_start);
    int pred[3] = {0, 0, 0};
    auto decode_block = [&](int c, int64_t bx, int64_t by) {
        const Comp& comp = comps[static_cast<size_t>(c)];
        const auto& dct = dc_tables[comp.dc_sel];
        const auto& act = ac_tables[comp.ac_sel];
        if (!dct.present || !act.present) throw_data("jpeg_decode: missing Huffman table");
        const auto& q = qtables[static_cast<size_t>(comp.tq)];

        int zz[64] = {};
        int cat = decode_symbol(br, dct);
        pred[c] += extend_value(br.bits(cat), cat);
        zz[0] = pred[c];
        for (int k = 1; k < 64;) {
            int sym = decode_symbol(br, act);
            if (sym == 0x00) break;  // EOB
            int run = sym >> 4, acat = sym & 0x0f;
            if (acat == 0) {
                if (run != 15) throw_data("jpeg_decode: bad AC symbol");
                k += 16;
                continue;
            }
            k += run;
            if (k > 63) throw_data("jpeg_decode: AC run overflows block");
            zz[k] = extend_value(br.bits(acat), acat);
            ++k;
        }
        double freq[64], px[64];
        for (int i = 0; i < 64; ++i) freq[static_cast<size_t>(kZigzag[i])] = 0.0;
        for (int i = 0; i < 64; ++i)
            freq[static_cast<size_t>(kZigzag[i])] = static_cast<double>(zz[i]) * q[static_cast<size_t>(kZigzag[i])];
        idct8x8(freq, px);
        Plane& plane = planes[c];
        for (int yy = 0; yy < 8; ++yy)
            for (int xx = 0; xx < 8; ++xx) plane.at(bx * 8 + xx, by * 8 + yy) = px[yy * 8 + xx];
    };

    const int64_t mcus_x = padded_w / mcu, mcus_y = padded_h / mcu;
    for (int64_t my = 0; my < mcus_y; ++my)
        for (int64_t mx = 0; mx < mcus_x; ++mx) {
            if (is420) {
                for (int by = 0; by < 2; ++by)
                    for (int bx = 0; bx < 2; ++bx) decode_block(0, 2 * mx + bx, 2 * my + by);
                decode_block(1, mx, my);
                decode_block(2, mx, my);
            } else {
                decode_block(0, mx, my);
                decode_block(1, mx, my);
                decode_block(2, mx, my);
            }
        }

    // chroma upsampling (4:2:0): sample replication, the exact right-inverse of
    // the encoder's 2x2 box downsample, which keeps repeated roundtrips stable
    auto chroma_at = [&](const Plane& p, int64_t x, int64_t y) -> double {
        if (!is420) return p.at(x, y);
        return p.at(x / 2, y / 2);
    };

    RasterImage img = RasterImage::make(width, height, 3);
    auto clamp_u8 = [](double v) {
        int r = v >= 0.0 ? static_cast<int>(v + 0.5) : 0;
        return static_cast<uint8_t>(std::clamp(r, 0, 255));
    };
    for (int64_t y = 0; y < height; ++y)
        for (int64_t x = 0; x < width; ++x) {
            double Y = planes[0].at(x, y) + 128.0;
            double cb = chroma_at(planes[1], x, y);
            double cr = chroma_at(planes[2], x, y);
            img.at(x, y, 0) = clamp_u8(Y + 1.402 * cr);
            img.at(x, y, 1) = clamp_u8(Y - 0.344136286 * cb - 0.714136286 * cr);
            img.at(x, y, 2) = clamp_u8(Y + 1.772 * cb);
        }
    return img;
}

// Encode-then-decode at the configured settings; dimensions are preserved.
inline RasterImage jpeg_roundtrip(const RasterImage& img, const JpegConfig& cfg) {
    RasterImage out = jpeg_decode(jpeg_encode(img, cfg));
    if (out.width != img.width || out.height != img.height) throw_numeric("jpeg_roundtrip: dimension drift");
    return out;
}

inline double psnr(const RasterImage& a, const RasterImage& b) {
    a.validate();
    b.validate();
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw_data("psnr: image shapes differ");
    double sq = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sq += d * d;
    }
    double mse = sq / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace tilekit
