"""Seeded synthetic detection windows for demos, tests and benchmarks."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .image_ops import WINDOW_HEIGHT, WINDOW_WIDTH, GrayWindow, save_image
from .manifest import ManifestEntry, write_manifest


def draw_clutter(img: Image.Image, rng: np.random.Generator, n: int, angularity: float) -> None:
    """Background clutter: jittered polygons (round to jagged) and the odd bar."""
    d = ImageDraw.Draw(img, "L")
    w, h = img.size
    sides = int(3 + (1 - angularity) * 5 + angularity * 20)
    for _ in range(n):
        fill = int(rng.integers(40, 240))
        if rng.random() < 0.25:
            x0, y0 = rng.uniform(-10, w), rng.uniform(-10, h)
            d.rectangle([x0, y0, x0 + rng.uniform(3, 30), y0 + rng.uniform(3, 30)], fill=fill)
            continue
        cx, cy = rng.uniform(0, w), rng.uniform(0, h)
        r = rng.uniform(w / 12, w / 3)
        step = 2 * math.pi / sides
        pts = [
            (cx + rr * math.cos(a), cy + rr * math.sin(a))
            for a, rr in (
                (k * step + rng.random() * 0.2 * angularity, r * (0.7 + 0.6 * rng.random() * angularity))
                for k in range(sides)
            )
        ]
        d.polygon(pts, fill=fill)


def draw_figure(img: Image.Image, rng: np.random.Generator, fill: int) -> None:
    """Upright pedestrian silhouette: head, torso, arms, two legs."""
    d = ImageDraw.Draw(img, "L")
    w, h = img.size
    cx = w / 2 + rng.uniform(-4, 4)
    top = 8 + rng.uniform(-3, 3)
    head_r = rng.uniform(6, 8)
    d.ellipse([cx - head_r, top, cx + head_r, top + 2 * head_r], fill=fill)

    neck = top + 2 * head_r
    shoulders = rng.uniform(9, 12)
    hips = rng.uniform(7, 9)
    waist = neck + rng.uniform(40, 48)
    d.polygon([(cx - shoulders, neck + 2), (cx + shoulders, neck + 2), (cx + hips, waist), (cx - hips, waist)], fill=fill)

    arm = int(rng.integers(3, 5))
    swing = rng.uniform(-6, 6)
    d.line([(cx - shoulders, neck + 4), (cx - shoulders - 3 + swing, waist + 4)], fill=fill, width=arm)
    d.line([(cx + shoulders, neck + 4), (cx + shoulders + 3 - swing, waist + 4)], fill=fill, width=arm)

    foot = h - 6 + rng.uniform(-3, 2)
    stride = rng.uniform(2, 9)
    leg = int(rng.integers(6, 9))
    d.line([(cx - hips / 2, waist), (cx - hips / 2 - stride, foot)], fill=fill, width=leg)
    d.line([(cx + hips / 2, waist), (cx + hips / 2 + stride, foot)], fill=fill, width=leg)


def synth_window(label: int, rng: np.random.Generator) -> GrayWindow:
    background = int(rng.integers(60, 200))
    img = Image.new("L", (WINDOW_WIDTH, WINDOW_HEIGHT), background)
    if label:
        contrast = int(rng.integers(50, 110)) * (1 if rng.random() < 0.5 else -1)
        draw_figure(img, rng, int(np.clip(background + contrast, 0, 255)))
    else:
        draw_clutter(img, rng, n=int(rng.integers(3, 10)), angularity=rng.random())
    pixels = np.array(img, dtype=np.float64)
    pixels += rng.normal(0.0, 4.0, size=pixels.shape)
    return GrayWindow.from_array(np.clip(np.rint(pixels), 0, 255).astype(np.uint8))


def write_dataset(out_dir: str | Path, count: int, seed: int = 0) -> Path:
    """Write `count` P5 windows, alternating person / non-person, plus manifest.txt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(count):
        label = 1 if i % 2 == 0 else 0
        window = synth_window(label, rng)
        path = out / f"{'pos' if label else 'neg'}_{i:04d}.pgm"
        save_image(window, path)
        entries.append(ManifestEntry(path, label))
    manifest = out / "manifest.txt"
    write_manifest(manifest, entries)
    return manifest
