#!/usr/bin/env python3
"""Build the bundled MNIST subset in IDX format.

Reads per-digit JSON dumps (flat arrays of n*784 grayscale values in [0,1],
as shipped by the npm `mnist` package) and emits a balanced, deterministically
shuffled train/test split in the classic big-endian IDX layout:

    train-images-idx3-ubyte   train-labels-idx1-ubyte
    test-images-idx3-ubyte    test-labels-idx1-ubyte

Usage:
    python3 scripts/make_mnist_subset.py <digits-dir> <out-dir> \
        [--train 5000] [--test 1000] [--seed 20260816]

Pixel values are quantized back to bytes with round(x * 255); the source
package stores normalized floats, so this recovers the original 0..255
grayscale levels up to the package's own truncation.
"""

import argparse
import json
import random
import struct
import sys
from pathlib import Path

ROWS = COLS = 28
DIM = ROWS * COLS


def load_digit(path: Path) -> list[bytes]:
    with open(path) as fh:
        flat = json.load(fh)["data"]
    if len(flat) % DIM:
        raise SystemExit(f"{path}: length {len(flat)} is not a multiple of {DIM}")
    out = []
    for i in range(0, len(flat), DIM):
        px = bytes(min(255, max(0, round(v * 255))) for v in flat[i : i + DIM])
        out.append(px)
    return out


def write_idx(images: list[bytes], labels: list[int], out_dir: Path, prefix: str) -> None:
    with open(out_dir / f"{prefix}-images-idx3-ubyte", "wb") as fh:
        fh.write(struct.pack(">iiii", 0x803, len(images), ROWS, COLS))
        for img in images:
            fh.write(img)
    with open(out_dir / f"{prefix}-labels-idx1-ubyte", "wb") as fh:
        fh.write(struct.pack(">ii", 0x801, len(labels)))
        fh.write(bytes(labels))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=Path)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--train", type=int, default=5000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20260816)
    args = ap.parse_args()

    pool = []  # (label, pixels)
    for digit in range(10):
        for px in load_digit(args.digits_dir / f"{digit}.json"):
            pool.append((digit, px))
    need = args.train + args.test
    if len(pool) < need:
        raise SystemExit(f"only {len(pool)} images available, need {need}")

    # Per-class counts proportional to the request, so both splits stay
    # roughly balanced no matter how lopsided the source dump is.
    rng = random.Random(args.seed)
    rng.shuffle(pool)
    by_class: dict[int, list[bytes]] = {d: [] for d in range(10)}
    for label, px in pool:
        by_class[label].append(px)

    train, test = [], []
    for digit in range(10):
        per_train = args.train // 10
        per_test = args.test // 10
        avail = by_class[digit]
        if len(avail) < per_train + per_test:
            raise SystemExit(f"digit {digit}: only {len(avail)} images")
        train += [(digit, px) for px in avail[:per_train]]
        test += [(digit, px) for px in avail[per_train : per_train + per_test]]
    rng.shuffle(train)
    rng.shuffle(test)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx([px for _, px in train], [d for d, _ in train], args.out_dir, "train")
    write_idx([px for _, px in test], [d for d, _ in test], args.out_dir, "test")
    print(f"wrote {len(train)} train / {len(test)} test images to {args.out_dir}")


if __name__ == "__main__":
    sys.exit(main())
