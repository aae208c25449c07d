"""Brute-force reference implementations used only by the tests.

These deliberately avoid the package's code paths: plain Python loops for
the metrics, an explicitly assembled dense (or sparse) system for the smoother.
"""
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from omnisal.sphere_geom import erp_pixel_to_direction


def kld_bf(pred, gt, eps=1e-12):
    p = [float(x) + eps for x in np.ravel(pred)]
    q = [float(x) + eps for x in np.ravel(gt)]
    sp_, sq = math.fsum(p), math.fsum(q)
    return math.fsum((qi / sq) * math.log((qi / sq) / (pi / sp_)) for pi, qi in zip(p, q))


def cc_bf(a, b):
    a = [float(x) for x in np.ravel(a)]
    b = [float(x) for x in np.ravel(b)]
    n = len(a)
    ma, mb = math.fsum(a) / n, math.fsum(b) / n
    cov = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = math.fsum((x - ma) ** 2 for x in a)
    vb = math.fsum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


def _distinct(fix):
    return sorted({(int(u), int(v)) for u, v in fix})


def nss_bf(pred, fix):
    H, W = pred.shape
    vals = [float(pred[v, u]) for v in range(H) for u in range(W)]
    n = len(vals)
    mean = math.fsum(vals) / n
    sd = math.sqrt(math.fsum((x - mean) ** 2 for x in vals) / n)
    pts = _distinct(fix)
    return math.fsum((float(pred[v, u]) - mean) / sd for u, v in pts) / len(pts)


def auc_judd_bf(pred, fix):
    H, W = pred.shape
    pts = set(_distinct(fix))
    pos = [float(pred[v, u]) for (u, v) in pts]
    neg = [float(pred[v, u]) for v in range(H) for u in range(W) if (u, v) not in pts]
    curve = [(0.0, 0.0)]
    for th in sorted(set(pos), reverse=True):
        tpr = sum(1 for x in pos if x >= th) / len(pos)
        fpr = sum(1 for x in neg if x >= th) / len(neg) if neg else 0.0
        curve.append((fpr, tpr))
    curve.append((1.0, 1.0))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(curve, curve[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def smoothing_system(target, mask, lam, literal=False, sparse=False):
    """Assemble the normal equations of the seeded smoothing objective pixel by pixel.

    Objective: sum_p m_p (f_p - t_p)^2 + lam * sum_p sum_{q in N(p)} (f_p - f_q)^2,
    N(p) = left/right (wrapping) and up/down (absent at the first/last row).
    Setting the gradient to zero gives, per pixel p,
    m_p f_p + 2 lam sum_{q in N(p)} (f_p - f_q) = m_p t_p.
    """
    H, W = target.shape
    N = H * W
    idx = lambda v, u: v * W + u  # noqa: E731
    rows, cols, vals = [], [], []
    b = np.zeros(N)
    for v in range(H):
        for u in range(W):
            p = idx(v, u)
            m = 1.0 if (literal or mask[v, u]) else 0.0
            t = target[v, u] if mask[v, u] else 0.0
            rows.append(p); cols.append(p); vals.append(m)
            b[p] = m * t
            nbrs = [(v, (u - 1) % W), (v, (u + 1) % W)]
            if v > 0:
                nbrs.append((v - 1, u))
            if v < H - 1:
                nbrs.append((v + 1, u))
            for (qv, qu) in nbrs:
                q = idx(qv, qu)
                rows += [p, p]; cols += [p, q]; vals += [2 * lam, -2 * lam]
    A = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    return (A if sparse else A.toarray()), b


def smooth_direct(target, mask, lam, literal=False):
    """Reference minimiser by a direct solve (dense for small, sparse LU for larger rasters)."""
    H, W = target.shape
    if H * W <= 4096:
        A, b = smoothing_system(target, mask, lam, literal)
        return np.linalg.solve(A, b).reshape(H, W)
    A, b = smoothing_system(target, mask, lam, literal, sparse=True)
    return spla.spsolve(A.tocsc(), b).reshape(H, W)


def sphere_image(H, seed=0, n=24, kappa=8.0):
    """RGB ERP fixture that is smooth on the sphere: a sum of von Mises-Fisher bumps."""
    W = 2 * H
    rng = np.random.default_rng(seed)
    vv, uu = np.mgrid[0:H, 0:W]
    d = erp_pixel_to_direction(uu, vv, W, H)
    centres = rng.normal(size=(n, 3))
    centres /= np.linalg.norm(centres, axis=1, keepdims=True)
    amps = rng.random((n, 3))
    img = np.zeros((H, W, 3))
    for c, a in zip(centres, amps):
        img += np.exp(kappa * (d @ c - 1.0))[..., None] * a
    return img / img.max()
