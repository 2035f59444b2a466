"""Synthetic test images, so the benchmark runs without external data."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .imageio import SampleGrid, save_pgm

__all__ = ["KINDS", "LABELS", "screen_content", "gradient", "photo_like", "noise", "generate", "write_corpus"]


def screen_content(rng: np.random.Generator, h: int = 64, w: int = 64, bit_depth: int = 8) -> SampleGrid:
    """Flat background with sharp-edged boxes, rules and text-like glyph rows.

    About half the images get a black background (terminal-like), the rest
    a random one.
    """
    top = (1 << bit_depth) - 1
    palette = rng.choice(top + 1, size=6, replace=False)
    if rng.random() < 0.5:
        palette[0] = 0
    a = np.full((h, w), palette[0], np.int64)
    for _ in range(rng.integers(2, 6)):
        y0, x0 = rng.integers(0, h), rng.integers(0, w)
        a[y0 : y0 + rng.integers(2, h // 2 + 2), x0 : x0 + rng.integers(2, w // 2 + 2)] = rng.choice(palette[1:])
    # glyph rows: short dark runs on a regular pitch
    ink = palette[-1]
    for y in range(rng.integers(1, 4), h - 4, 8):
        for x in range(2, w - 3, 4):
            if rng.random() < 0.6:
                glyph = rng.random((5, 3)) < 0.45
                a[y : y + 5, x : x + 3][glyph] = ink
    for y in rng.integers(0, h, size=2):
        a[y, :] = palette[1]
    return SampleGrid(w, h, bit_depth, a)


def gradient(rng: np.random.Generator, h: int = 64, w: int = 64, bit_depth: int = 8) -> SampleGrid:
    top = (1 << bit_depth) - 1
    y, x = np.mgrid[0:h, 0:w] / max(h, w)
    gx, gy, q = rng.uniform(-1, 1, 3)
    f = gx * x + gy * y + q * (x - 0.5) * (y - 0.5)
    f = (f - f.min()) / (np.ptp(f) or 1.0)
    return SampleGrid(w, h, bit_depth, np.rint(f * top).astype(np.int64))


def photo_like(rng: np.random.Generator, h: int = 64, w: int = 64, bit_depth: int = 8) -> SampleGrid:
    """Smooth random field (a few low-frequency cosines) plus Gaussian noise."""
    top = (1 << bit_depth) - 1
    y, x = np.mgrid[0:h, 0:w].astype(float)
    f = np.zeros((h, w))
    for _ in range(6):
        fy, fx = rng.uniform(0, 0.15, 2)
        f += rng.uniform(0.3, 1) * np.cos(2 * np.pi * (fy * y + fx * x) + rng.uniform(0, 2 * np.pi))
    f = (f - f.min()) / (np.ptp(f) or 1.0) * 0.8 + 0.1
    f = f * top + rng.normal(0, top * 0.015, (h, w))
    return SampleGrid(w, h, bit_depth, np.clip(np.rint(f), 0, top).astype(np.int64))


def noise(rng: np.random.Generator, h: int = 64, w: int = 64, bit_depth: int = 8) -> SampleGrid:
    return SampleGrid(w, h, bit_depth, rng.integers(0, 1 << bit_depth, (h, w)))


KINDS = {"screen": screen_content, "gradient": gradient, "photo": photo_like, "noise": noise}
LABELS = {"screen": "nonphoto", "gradient": "nonphoto", "photo": "photo", "noise": "photo"}


def generate(kind: str, seed: int, size: int = 64, bit_depth: int = 8) -> SampleGrid:
    return KINDS[kind](np.random.default_rng(seed), size, size, bit_depth)


def write_corpus(directory, per_kind: int = 2, size: int = 64, seed: int = 0, kinds=tuple(KINDS)) -> Path:
    """Write PGMs plus a ``manifest.csv`` (``path,label`` lines); returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for k, kind in enumerate(kinds):
        for i in range(per_kind):
            name = f"{kind}_{i:02d}.pgm"
            save_pgm(generate(kind, seed * 1000 + 100 * k + i, size), directory / name)
            lines.append(f"{name},{LABELS[kind]}")
    manifest = directory / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
