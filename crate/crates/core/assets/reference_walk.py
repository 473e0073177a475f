#!/usr/bin/env python3
"""Standalone reference walk for the demo pipeline.

Regenerates synthetic64.pgm and the golden outputs under golden/ using plain
Python, sharing no code with the Rust crate. Run from this directory:

    python3 reference_walk.py
"""
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def synthetic64():
    img = []
    for y in range(64):
        row = []
        for x in range(64):
            if (x - 36) ** 2 + (y - 28) ** 2 <= 14 ** 2:
                row.append(224)
            else:
                row.append((2 * x + y) * 160 // 189)
        img.append(row)
    return img


def write_pgm(path, img):
    h, w = len(img), len(img[0])
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(bytes(p for row in img for p in row))


def q(v):
    return int(math.floor(min(max(v, 0.0), 255.0) + 0.5))


def at(img, x, y):
    h, w = len(img), len(img[0])
    return img[min(max(y, 0), h - 1)][min(max(x, 0), w - 1)]


def correlate(img, k, norm):
    h, w = len(img), len(img[0])
    out = []
    for y in range(h):
        row = []
        for x in range(w):
            s = 0
            for j in range(3):
                for i in range(3):
                    s += k[j][i] * at(img, x + i - 1, y + j - 1)
            row.append(s / norm)
        out.append(row)
    return out


def crop(img, x0, y0, w, h):
    return [row[x0:x0 + w] for row in img[y0:y0 + h]]


def denoise(img, method):
    if method == "mean":
        k, n = [[1] * 3] * 3, 9.0
    else:
        k, n = [[1, 2, 1], [2, 4, 2], [1, 2, 1]], 16.0
    return [[q(v) for v in row] for row in correlate(img, k, n)]


def resample(img, s):
    h, w = len(img), len(img[0])
    nh, nw = max(1, math.floor(h * s)), max(1, math.floor(w * s))
    return [[img[min(math.floor(y / s), h - 1)][min(math.floor(x / s), w - 1)]
             for x in range(nw)] for y in range(nh)]


def edge(img, method):
    if method == "prewitt":
        gx = correlate(img, [[-1, 0, 1]] * 3, 1.0)
        gy = correlate(img, [[-1] * 3, [0] * 3, [1] * 3], 1.0)
        return [[q(math.hypot(a, b)) for a, b in zip(ra, rb)] for ra, rb in zip(gx, gy)]
    lap = correlate(img, [[0, 1, 0], [1, -4, 1], [0, 1, 0]], 1.0)
    return [[q(abs(v)) for v in row] for row in lap]


CASES = {
    "default": ((8, 8, 48, 48), "gaussian3", 2.0, "prewitt"),
    "mean_laplacian": ((4, 10, 50, 40), "mean", 1.5, "laplacian"),
}


def main():
    src = synthetic64()
    write_pgm(os.path.join(HERE, "synthetic64.pgm"), src)
    for name, (box, dn, scale, ed) in CASES.items():
        processed = resample(denoise(crop(src, *box), dn), scale)
        final = edge(processed, ed)
        write_pgm(os.path.join(HERE, "golden", name + "_processed.pgm"), processed)
        write_pgm(os.path.join(HERE, "golden", name + "_final.pgm"), final)


if __name__ == "__main__":
    main()
