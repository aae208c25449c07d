"""2D saliency backends for conventional (rectilinear) rasters.

A backend is any callable ``backend(raster, branch=None, orientation=None)``
returning a float map in ``[0, 1]`` with the raster's height and width.  The
``branch``/``orientation`` keywords only matter to :class:`ExternalBackend`,
which looks up precomputed maps by name.
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from skimage.color import rgb2lab

from .errors import DomainError, MapNotFoundError

LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])


def _to_unit_rgb(img):
    img = np.asarray(img)
    if img.dtype == np.uint8:
        img = img.astype(np.float64) / 255.0
    elif img.dtype == np.uint16:
        img = img.astype(np.float64) / 65535.0
    else:
        img = img.astype(np.float64)
    if img.ndim == 2:
        img = np.repeat(img[..., None], 3, axis=-1)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DomainError(f"expected an RGB raster, got shape {img.shape}")
    return np.clip(img, 0.0, 1.0)


@dataclass(frozen=True)
class BmsParams:
    """Boolean Map Saliency settings.

    ``delta`` is the threshold step on the 0-255 channel scale, ``opening``
    and ``dilation`` are disk radii in pixels, and ``sigma`` is the final blur
    width in pixels (``None`` means ``0.03 * max(H, W)``).
    """

    delta: float = 8.0
    opening: int = 5
    dilation: int = 7
    sigma: float | None = None

    def __post_init__(self):
        if not 1 <= self.delta <= 128:
            raise DomainError("BMS threshold step must lie in [1, 128]")
        if self.opening < 0 or self.dilation < 0 or (self.sigma is not None and self.sigma < 0):
            raise DomainError("BMS radii must be non-negative")

    def blur_sigma(self, shape):
        return 0.03 * max(shape[:2]) if self.sigma is None else self.sigma


def _disk(radius):
    r = int(radius)
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    return xx * xx + yy * yy <= r * r


def _symmetric_blur_1d(x, sigma, axis):
    # Sums mirrored taps pairwise so that flipping the input flips the output bit-for-bit.
    radius = int(np.ceil(4.0 * sigma))
    if radius == 0:
        return x
    k = np.arange(1, radius + 1)
    w = np.exp(-0.5 * (k / sigma) ** 2)
    norm = 1.0 + 2.0 * w.sum()
    w0 = 1.0 / norm
    w = w / norm
    pad = [(0, 0)] * x.ndim
    pad[axis] = (radius, radius)
    xp = np.pad(x, pad, mode="symmetric")
    n = x.shape[axis]
    out = w0 * x
    for i, wi in enumerate(w, start=1):
        lo = np.take(xp, np.arange(radius - i, radius - i + n), axis=axis)
        hi = np.take(xp, np.arange(radius + i, radius + i + n), axis=axis)
        out = out + wi * (lo + hi)
    return out


def _gaussian_blur(x, sigma):
    if sigma <= 0:
        return x
    return _symmetric_blur_1d(_symmetric_blur_1d(x, sigma, 0), sigma, 1)


def _attention_map(bmap, opening):
    """Surrounded regions of one boolean map, opened and L2-normalised."""
    labels, n = ndimage.label(bmap, structure=np.ones((3, 3), bool))
    if n == 0:
        return None
    border = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    att = (labels > 0) & ~np.isin(labels, border)
    if opening > 0 and att.any():
        att = ndimage.binary_opening(att, structure=_disk(opening))
    count = int(att.sum())
    if count == 0:
        return None
    return att.astype(np.float64) / np.sqrt(count)


def lab_channels(img):
    """CIE Lab (D65) channels of an RGB raster, each stretched to 0-255.

    Channels whose Lab range is below one 8-bit unit are treated as flat and
    dropped, so numerically tiny chroma noise cannot be amplified.
    """
    lab = rgb2lab(_to_unit_rgb(img))
    # 8-bit Lab scale: L in [0, 100] -> [0, 255], a/b offsets irrelevant after stretching
    lab[..., 0] *= 255.0 / 100.0
    chans = []
    for c in range(3):
        ch = lab[..., c]
        lo, hi = ch.min(), ch.max()
        if hi - lo >= 1.0:
            chans.append((ch - lo) * (255.0 / (hi - lo)))
    if not chans:
        return np.zeros(lab.shape[:2] + (0,))
    return np.stack(chans, axis=-1)


def bms_channels(channels, p=BmsParams()):
    """Boolean Map Saliency on precomputed feature channels (``H x W x C``, 0-255 scale)."""
    channels = np.asarray(channels, dtype=np.float64)
    if channels.ndim == 2:
        channels = channels[..., None]
    shape = channels.shape[:2]
    acc = np.zeros(shape)
    thresholds = np.arange(p.delta, 256.0, p.delta)
    n_maps = 0
    for c in range(channels.shape[2]):
        ch = channels[..., c]
        for t in thresholds:
            b = ch > t
            for bm in (b, ~b):
                n_maps += 1
                att = _attention_map(bm, p.opening)
                if att is not None:
                    acc += att
    if n_maps == 0 or not acc.any():
        return np.zeros(shape)
    mean = acc / n_maps
    if p.dilation > 0:
        mean = ndimage.grey_dilation(mean, footprint=_disk(p.dilation))
    mean = _gaussian_blur(mean, p.blur_sigma(shape))
    lo, hi = mean.min(), mean.max()
    if hi <= lo:
        return np.zeros(shape)
    return (mean - lo) / (hi - lo)


def bms(img, p=BmsParams()):
    """Boolean Map Saliency of an RGB raster; a flat image gives an all-zero map."""
    img = np.asarray(img)
    if img.size == 0:
        raise DomainError("bms needs a non-empty raster")
    return bms_channels(lab_channels(img), p)


def luminance_backend(img):
    """Per-pixel relative luminance (Rec. 709 weights) of an RGB raster, in [0, 1]."""
    return _to_unit_rgb(img) @ LUMA_WEIGHTS


class Backend:
    """Named saliency backend wrapping a plain function."""

    name = "backend"

    def __call__(self, raster, branch=None, orientation=None):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class BmsBackend(Backend):
    name = "bms"

    def __init__(self, params=None):
        self.params = params or BmsParams()

    def __call__(self, raster, branch=None, orientation=None):
        return bms(raster, self.params)


class LuminanceBackend(Backend):
    name = "luminance"

    def __call__(self, raster, branch=None, orientation=None):
        return luminance_backend(raster)


class ExternalBackend(Backend):
    """Serve precomputed maps (e.g. from a CNN run elsewhere) from disk.

    ``pattern`` is a path template with ``{branch}`` and ``{orientation}``
    fields, typically ``"maps/<stem>__{branch}__{orientation}.png"``.  PNG/TIFF
    maps are scaled by their integer range (255 or 65535); ``.npy`` maps are
    taken as-is.  Either way the result must lie in [0, 1].
    """

    name = "external"

    def __init__(self, pattern):
        self.pattern = str(pattern)

    def path_for(self, branch, orientation):
        return Path(self.pattern.format(branch=branch, orientation=orientation))

    def __call__(self, raster, branch=None, orientation=None):
        key = f"{branch}__{orientation}"
        path = self.path_for(branch, orientation)
        if not path.exists():
            raise MapNotFoundError(key, path)
        m = load_map(path)
        if m.shape != np.asarray(raster).shape[:2]:
            raise DomainError(
                f"stored map {path} is {m.shape}, raster is {np.asarray(raster).shape[:2]}")
        return m


def external_backend(map_path_pattern):
    return ExternalBackend(map_path_pattern)


def load_map(path):
    """Read a single-channel saliency map and scale it to [0, 1]."""
    path = Path(path)
    if path.suffix == ".npy":
        m = np.load(path).astype(np.float64)
    else:
        from PIL import Image

        with Image.open(path) as im:
            if im.mode in ("I;16", "I;16B", "I;16L", "I"):
                m = np.asarray(im, dtype=np.float64) / 65535.0
            else:
                m = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    if m.ndim != 2:
        raise DomainError(f"{path} is not a single-channel map")
    if not np.all(np.isfinite(m)) or m.min() < 0.0 or m.max() > 1.0:
        raise DomainError(f"{path} has values outside [0, 1]")
    return m


BACKENDS = {"bms": BmsBackend, "luminance": LuminanceBackend}


def make_backend(name, **kwargs):
    if name == "external":
        return ExternalBackend(kwargs["pattern"])
    try:
        return BACKENDS[name](**kwargs)
    except KeyError:
        raise DomainError(f"unknown backend {name!r}") from None
