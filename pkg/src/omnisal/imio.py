"""Raster file I/O (PNG/TIFF via Pillow)."""
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DomainError
from .saliency2d import load_map  # noqa: F401  (re-exported)


def read_rgb(path):
    """Read an image as ``uint8`` RGB, shape ``(H, W, 3)``."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def write_rgb(path, img):
    img = np.asarray(img)
    if img.dtype != np.uint8:
        img = np.clip(np.round(np.asarray(img, float) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(img, mode="RGB").save(path)


def to_uint16(m):
    return np.round(np.clip(np.asarray(m, float), 0.0, 1.0) * 65535.0).astype(np.uint16)


def write_map(path, m, bits=16):
    """Write a [0, 1] map as a single-channel 16-bit (default) or 8-bit image."""
    m = np.clip(np.asarray(m, float), 0.0, 1.0)
    if m.ndim != 2:
        raise DomainError("saliency maps are single-channel")
    if bits == 16:
        Image.fromarray(to_uint16(m)).save(path)
    elif bits == 8:
        Image.fromarray(np.round(m * 255.0).astype(np.uint8), mode="L").save(path)
    else:
        raise DomainError("bits must be 8 or 16")


def heat(m):
    """Black-red-yellow-white colour ramp for a [0, 1] map."""
    m = np.clip(np.asarray(m, float), 0.0, 1.0)
    return np.stack([np.clip(3 * m, 0, 1), np.clip(3 * m - 1, 0, 1), np.clip(3 * m - 2, 0, 1)], -1)


def overlay(img, m, opacity=0.5):
    """Blend an RGB image with the heat-coloured saliency map."""
    base = np.asarray(img, float)
    if base.max() > 1.0:
        base = base / 255.0
    top = heat(m / m.max() if m.max() > 0 else m)
    return (1.0 - opacity) * base + opacity * top


def list_maps(directory):
    exts = {".png", ".tif", ".tiff", ".npy", ".bmp"}
    return sorted(p for p in Path(directory).iterdir() if p.suffix.lower() in exts)
