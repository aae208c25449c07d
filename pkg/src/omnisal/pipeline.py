"""End-to-end saliency prediction for ERP images.

Four stages: an ERP branch (yaw-rotated equatorial bands plus polar faces),
a cube-map branch (six faces under several sphere rotations), fusion with a
latitude prior, and seeded smoothing on the sphere-sampled grid.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
import os

import numpy as np

from . import projection as proj
from .errors import DomainError
from .saliency2d import BmsBackend
from .smoother import build_seed_mask, smooth
from .sphere_geom import Rotation3, row_latitudes

DEFAULT_ROTATIONS = (
    Rotation3(0, 0, 0),
    Rotation3(45, 0, 0),
    Rotation3(0, 45, 0),
    Rotation3(0, 0, 45),
    Rotation3(45, 45, 0),
)


@dataclass
class PipelineConfig:
    erp_backend: object = field(default_factory=BmsBackend)
    cmp_backend: object = field(default_factory=BmsBackend)
    orientations: int = 8
    orientation_step: float = 45.0
    rotations: tuple = DEFAULT_ROTATIONS
    w: float = 0.7
    raw_bias: bool = False
    smooth: bool = True
    K: float = 10.0
    n_seeds: int | None = None
    lam: float = 1.0
    tol: float = 1e-6
    max_iter: int | None = None
    literal_data_term: bool = False
    face_size: int | None = None
    threads: int | None = None

    def validate(self):
        if self.orientations < 1 or abs(self.orientations * self.orientation_step - 360.0) > 1e-9:
            raise DomainError("orientation step x count must equal 360 degrees")
        if not 0.0 <= self.w <= 1.0:
            raise DomainError("bias weight w must lie in [0, 1]")
        if len(self.rotations) == 0:
            raise DomainError("CMP rotation list is empty")
        if self.lam <= 0 or self.tol <= 0 or self.K <= 0:
            raise DomainError("lam, tol and K must be positive")
        return self

    def workers(self):
        n = self.threads or int(os.environ.get("OMNISAL_THREADS", 0)) or os.cpu_count() or 1
        return max(1, n)


@dataclass
class BiasProfile:
    """Mean saliency per ERP row (row 0 is north)."""

    values: np.ndarray
    source: str = "file"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        if self.values.size == 0 or np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise DomainError("bias profile must be non-empty, finite and non-negative")

    def __len__(self):
        return self.values.size

    def resampled(self, H):
        """Linear resampling onto ``H`` rows (matching row-centre latitudes)."""
        n = len(self)
        if n == H:
            return BiasProfile(self.values.copy(), self.source)
        x_old = (np.arange(n) + 0.5) / n
        x_new = (np.arange(H) + 0.5) / H
        return BiasProfile(np.interp(x_new, x_old, self.values), self.source)

    def save(self, path):
        Path(path).write_text("".join(f"{v:.10g}\n" for v in self.values))

    @classmethod
    def load(cls, path):
        lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
        try:
            vals = [float(ln) for ln in lines if ln]
        except ValueError as exc:
            raise DomainError(f"bad bias profile {path}: {exc}") from None
        return cls(vals, source=f"file:{path}")


def default_bias_profile(H):
    """Raised-cosine latitude prior, 1 at the equator and 0 at the poles.

    A parametric stand-in for a profile measured on eye-tracking data.
    """
    lat = np.deg2rad(row_latitudes(H))
    return BiasProfile(0.5 * (1.0 + np.cos(2.0 * lat)), source="raised-cosine")


def normalize_max(m):
    m = np.asarray(m, dtype=np.float64)
    top = m.max() if m.size else 0.0
    return m / top if top > 0 else m.copy()


def _annotate(exc, note):
    """Attach stage context to an exception before re-raising it."""
    if hasattr(exc, "add_note"):
        exc.add_note(note)
    elif exc.args and isinstance(exc.args[0], str):
        exc.args = (f"{exc.args[0]} [{note}]",) + exc.args[1:]
    else:
        exc.args = exc.args + (note,)


def _check_erp(img):
    img = np.asarray(img)
    if img.ndim < 2 or img.shape[1] != 2 * img.shape[0]:
        raise DomainError(f"ERP image must have width = 2 x height, got {img.shape[:2]}")
    if img.shape[0] % 2:
        raise DomainError("ERP height must be even")
    return img


def _map(cfg, fn, items):
    if cfg.workers() == 1 or len(items) == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(cfg.workers()) as ex:
        return list(ex.map(fn, items))


def erp_branch(img, backend=None, cfg=None):
    """Saliency from yaw-rotated copies of the equatorial band plus the polar faces."""
    cfg = (cfg or PipelineConfig()).validate()
    backend = backend or cfg.erp_backend
    img = _check_erp(img)
    H, W = img.shape[:2]
    rows = proj.middle_rows(H)
    band = slice(rows[0], rows[-1] + 1)

    def one(k):
        deg = k * cfg.orientation_step
        shifted = proj.yaw_shift(img, deg)
        try:
            sal = backend(shifted[band], branch="erp", orientation=f"yaw{deg:03.0f}")
        except Exception as exc:
            _annotate(exc, f"ERP branch, yaw {deg:g} deg")
            raise
        return proj.yaw_shift(sal, -deg)

    middle = _map(cfg, one, list(range(cfg.orientations)))
    fused = middle[0]
    for m in middle[1:]:
        fused = np.maximum(fused, m)

    F = cfg.face_size or H // 2
    edges = {}
    for face in ("top", "bottom"):
        raster = proj.extract_face(img, face, proj.IDENTITY, F)
        try:
            edges[face] = np.asarray(backend(raster, branch="erp", orientation=face), float)
        except Exception as exc:
            _annotate(exc, f"ERP branch, {face} face")
            raise
    # One shared scale so the brightest edge-portion pixel equals the band maximum.
    # Measured on the re-projected polar rows, a yaw-invariant region, not the
    # full faces whose corners dip into the band.
    out = proj.assemble_split(fused, edges["top"], edges["bottom"], W, H)
    polar = np.ones(H, dtype=bool)
    polar[band] = False
    edge_max = out[polar].max() if polar.any() else 0.0
    scale = fused.max() / edge_max if edge_max > 0 else 0.0
    out[polar] *= scale
    return out


def cmp_branch(img, backend=None, cfg=None):
    """Mean over sphere rotations of the re-projected six-face saliency."""
    cfg = (cfg or PipelineConfig()).validate()
    backend = backend or cfg.cmp_backend
    img = _check_erp(img)
    H, W = img.shape[:2]
    F = cfg.face_size or H // 2

    def one(r):
        faces = {}
        for face in proj.FACES:
            raster = proj.extract_face(img, face, r, F)
            try:
                faces[face] = np.asarray(
                    backend(raster, branch="cmp", orientation=f"{r.label()}_{face}"), float)
            except Exception as exc:
                _annotate(exc, f"CMP branch, rotation {r.as_tuple()}, face {face}")
                raise
        return proj.faces_to_erp(faces, r, W, H)

    maps = _map(cfg, one, list(cfg.rotations))
    acc = np.zeros((H, W))
    for m in maps:
        acc += m
    return acc / len(maps)


def combine_branches(erp_sal, cmp_sal):
    erp_sal = np.asarray(erp_sal, float)
    cmp_sal = np.asarray(cmp_sal, float)
    if erp_sal.shape != cmp_sal.shape:
        raise DomainError(f"branch maps differ in shape: {erp_sal.shape} vs {cmp_sal.shape}")
    return 0.5 * (normalize_max(erp_sal) + normalize_max(cmp_sal))


def apply_equator_bias(s, b, w=0.7, raw=False):
    """Blend a saliency map with a row-broadcast latitude prior.

    ``w * s + (1 - w) * bias``, both operands scaled to maximum 1 unless
    ``raw`` is set.
    """
    s = np.asarray(s, float)
    values = b.values if isinstance(b, BiasProfile) else np.asarray(b, float).ravel()
    if values.size != s.shape[0]:
        raise DomainError(f"bias profile has {values.size} rows, map has {s.shape[0]}")
    if not 0.0 <= w <= 1.0:
        raise DomainError("bias weight w must lie in [0, 1]")
    bias = np.broadcast_to(values[:, None], s.shape)
    if not raw:
        s = normalize_max(s)
        bias = normalize_max(bias)
    return w * s + (1.0 - w) * bias


def predict_stages(img, cfg=None, bias=None):
    """Run the full pipeline, returning every intermediate map in a dict.

    Keys: ``erp``, ``cmp``, ``combined``, ``biased``, ``smoothed`` (the last
    equals ``biased`` when smoothing is disabled).
    """
    cfg = (cfg or PipelineConfig()).validate()
    img = _check_erp(img)
    H, W = img.shape[:2]
    if bias is None:
        bias = default_bias_profile(H)
    elif len(bias) != H:
        bias = bias.resampled(H)
    stages = {}
    stages["erp"] = erp_branch(img, cfg.erp_backend, cfg)
    stages["cmp"] = cmp_branch(img, cfg.cmp_backend, cfg)
    stages["combined"] = combine_branches(stages["erp"], stages["cmp"])
    stages["biased"] = apply_equator_bias(stages["combined"], bias, cfg.w, cfg.raw_bias)
    if cfg.smooth:
        mask = build_seed_mask(H, W, cfg.K, cfg.n_seeds)
        out = smooth(stages["biased"], mask, cfg.lam, cfg.tol, cfg.max_iter,
                     literal=cfg.literal_data_term)
        # the solver stops at a finite residual; keep the map non-negative
        stages["smoothed"] = np.clip(out, 0.0, None)
    else:
        stages["smoothed"] = stages["biased"]
    return stages


def predict(img, cfg=None, bias=None):
    """Saliency map of an ERP image (same height and width as ``img``)."""
    return predict_stages(img, cfg, bias)["smoothed"]
