#!/usr/bin/env python3
"""Reference-codec PSNR oracle for the JPEG roundtrip tests.

Rebuilds the synthetic fixture tile (same integer arithmetic as
include/tilekit/toyslide.hpp), roundtrips it through libjpeg via Pillow at the
settings under test, and prints the PSNR values that are frozen into
tests/test_preprocess_jpeg.cpp. Rerun after changing the fixture formula.
"""

import io

import numpy as np
from PIL import Image

MASK = (1 << 64) - 1


def sm64_mix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fnv1a64(s: str) -> int:
    h = 0xCBF29CE484222325
    for b in s.encode():
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


def slide_pixel(seed: int, x: int, y: int):
    base = sm64_mix(seed)
    roff = base & 63
    goff = (base >> 6) & 63
    boff = (base >> 12) & 63
    h = sm64_mix((seed * 0x100000001B3 + (y << 20) + x) & MASK)
    nr = (h & 31) - 16
    ng = ((h >> 5) & 31) - 16
    nb = ((h >> 10) & 31) - 16
    checker = (((x >> 4) ^ (y >> 4)) & 1) * 64
    gx = (x >> 1) & 127
    gy = (y >> 1) & 127
    clamp = lambda v: max(0, min(255, v))
    return (
        clamp(roff + gx + checker + nr),
        clamp(goff + gy + checker + ng),
        clamp(boff + (((x + y) >> 2) & 127) + nb),
    )


def fixture_tile(x0=512, y0=768, size=256):
    seed = sm64_mix(fnv1a64("fixture-slide"))
    img = np.zeros((size, size, 3), dtype=np.uint8)
    for y in range(size):
        for x in range(size):
            img[y, x] = slide_pixel(seed, x0 + x, y0 + y)
    return img


def psnr(a, b):
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    return 10.0 * np.log10(255.0**2 / mse)


def roundtrip(img, quality, subsampling):
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="JPEG", quality=quality, subsampling=subsampling)
    return np.asarray(Image.open(io.BytesIO(buf.getvalue())).convert("RGB"))


def main():
    img = fixture_tile()
    print(f"fixture checksum: {int(img.astype(np.uint64).sum())}")
    for quality, sub, name in [(70, 2, "4:2:0"), (90, 2, "4:2:0"), (70, 0, "4:4:4"), (100, 0, "4:4:4")]:
        out = roundtrip(img, quality, sub)
        print(f"quality {quality:3d} {name}: psnr = {psnr(img, out):.4f} dB")


if __name__ == "__main__":
    main()
