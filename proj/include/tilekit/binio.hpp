#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tilekit/common.hpp"

namespace tilekit {

// Little-endian primitives for the binary file formats. All formats in this
// project are explicitly LE regardless of host byte order.

inline void write_bytes(std::ostream& out, const void* p, size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_le(std::ostream& out, T v) {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff);
    write_bytes(out, buf, sizeof(T));
}

inline void write_f32_le(std::ostream& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_le<uint32_t>(out, bits);
}

inline bool read_bytes(std::istream& in, void* p, size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    return static_cast<size_t>(in.gcount()) == n;
}

template <typename T>
bool read_le(std::istream& in, T& v) {
    unsigned char buf[sizeof(T)];
    if (!read_bytes(in, buf, sizeof(T))) return false;
    uint64_t acc = 0;
    for (size_t i = 0; i < sizeof(T); ++i) acc |= static_cast<uint64_t>(buf[i]) << (8 * i);
    v = static_cast<T>(acc);
    return true;
}

inline bool read_f32_le(std::istream& in, float& v) {
    uint32_t bits;
    if (!read_le<uint32_t>(in, bits)) return false;
    std::memcpy(&v, &bits, 4);
    return true;
}

inline bool read_string(std::istream& in, size_t n, std::string& s) {
    s.resize(n);
    return n == 0 || read_bytes(in, s.data(), n);
}

}  // namespace tilekit
