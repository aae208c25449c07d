"""Saliency evaluation metrics and the latitude prior estimator.

Fixations are ``(u, v)`` pixel coordinates (column, row).  NSS and AUC-Judd
count each distinct fixated pixel once, as a binary fixation map would.
"""
from pathlib import Path

import numpy as np

from .errors import DomainError, UndefinedMetricError
from .pipeline import BiasProfile

EPS = 1e-12


def _pair(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise DomainError(f"map shapes differ: {pred.shape} vs {gt.shape}")
    return pred, gt


def kld(pred, gt):
    """KL divergence of the ground-truth distribution from the prediction."""
    pred, gt = _pair(pred, gt)
    p = pred + EPS
    q = gt + EPS
    p = p / p.sum()
    q = q / q.sum()
    return float(np.sum(q * np.log(q / p)))


def cc(pred, gt):
    """Pearson correlation between two maps."""
    pred, gt = _pair(pred, gt)
    a = pred - pred.mean()
    b = gt - gt.mean()
    na = np.sqrt(np.sum(a * a))
    nb = np.sqrt(np.sum(b * b))
    if na == 0 or nb == 0:
        raise UndefinedMetricError("correlation is undefined for a constant map")
    return float(np.sum(a * b) / (na * nb))


def fixation_mask(fix, shape):
    """Boolean map of the distinct fixated pixels."""
    fix = np.asarray(fix, dtype=np.intp).reshape(-1, 2)
    if fix.shape[0] == 0:
        raise DomainError("fixation set is empty")
    H, W = shape
    u, v = fix[:, 0], fix[:, 1]
    if np.any(u < 0) or np.any(u >= W) or np.any(v < 0) or np.any(v >= H):
        raise DomainError(f"fixation outside the {W}x{H} raster")
    mask = np.zeros(shape, dtype=bool)
    mask[v, u] = True
    return mask


def nss(pred, fix):
    pred = np.asarray(pred, dtype=np.float64)
    mask = fixation_mask(fix, pred.shape)
    sd = pred.std()
    if sd == 0:
        raise UndefinedMetricError("NSS is undefined for a constant map")
    z = (pred - pred.mean()) / sd
    return float(z[mask].mean())


def auc_judd(pred, fix):
    """Area under the ROC curve thresholded at the fixated saliency values."""
    pred = np.asarray(pred, dtype=np.float64)
    mask = fixation_mask(fix, pred.shape)
    pos = np.sort(pred[mask])
    neg = np.sort(pred[~mask])
    thresholds = np.unique(pos)[::-1]
    tpr = (pos.size - np.searchsorted(pos, thresholds, side="left")) / pos.size
    if neg.size:
        fpr = (neg.size - np.searchsorted(neg, thresholds, side="left")) / neg.size
    else:
        fpr = np.zeros_like(tpr)
    x = np.concatenate([[0.0], fpr, [1.0]])
    y = np.concatenate([[0.0], tpr, [1.0]])
    return float(np.sum((x[1:] - x[:-1]) * (y[1:] + y[:-1]) / 2.0))


METRICS = ("kld", "cc", "nss", "auc_judd")


def evaluate(pred, gt=None, fix=None, which=METRICS):
    """Dict of the requested metrics; map metrics need ``gt``, fixation metrics need ``fix``."""
    out = {}
    for name in which:
        if name in ("kld", "cc"):
            if gt is None:
                raise DomainError(f"{name} needs a ground-truth map")
            out[name] = kld(pred, gt) if name == "kld" else cc(pred, gt)
        elif name in ("nss", "auc_judd"):
            if fix is None:
                raise DomainError(f"{name} needs fixations")
            out[name] = nss(pred, fix) if name == "nss" else auc_judd(pred, fix)
        else:
            raise DomainError(f"unknown metric {name!r}")
    return out


def equator_bias_profile(gt_maps, H_out=None):
    """Mean saliency per row over all columns and all maps, as a :class:`BiasProfile`."""
    maps = [np.asarray(m, dtype=np.float64) for m in gt_maps]
    if not maps:
        raise DomainError("need at least one ground-truth map")
    shape = maps[0].shape
    if any(m.shape != shape for m in maps) or len(shape) != 2:
        raise DomainError("ground-truth maps must share one 2D shape")
    acc = np.zeros(shape[0])
    for m in maps:
        acc += m.mean(axis=1)
    prof = BiasProfile(acc / len(maps), source="dataset")
    if H_out is not None and H_out != shape[0]:
        prof = prof.resampled(H_out)
    return prof


def load_fixations(path, shape=None):
    """Read ``u,v`` lines (zero-based, truncated toward zero) into an ``(n, 2)`` int array."""
    pts = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            u, v = (float(x) for x in line.split(","))
        except ValueError:
            raise DomainError(f"{path}:{lineno}: expected 'u,v', got {line!r}") from None
        pts.append((int(u), int(v)))
    fix = np.array(pts, dtype=np.intp).reshape(-1, 2)
    if shape is not None:
        fixation_mask(fix, shape)
    return fix


def save_fixations(path, fix):
    Path(path).write_text("".join(f"{int(u)},{int(v)}\n" for u, v in np.asarray(fix)))
