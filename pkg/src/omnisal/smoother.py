"""Seeded quadratic smoothing of ERP saliency maps.

Minimises

    J(f) = sum_p m_p (f_p - t_p)^2 + lam * sum_p sum_{q in N(p)} (f_p - f_q)^2

over the ERP grid, where ``N(p)`` are the 4-neighbours (columns wrap, rows
are clamped at the poles) and ``m`` selects the data-term support.  By default
only seed pixels carry a data term (``t = S_E`` there), which turns the solve
into seeded harmonic interpolation.  ``literal=True`` instead applies the data
term to every pixel with ``t`` zeroed off-seed.

Because the neighbour sum is over ordered pairs, every edge appears twice, so
the normal equations read ``(M + 2 lam L) f = M t`` with ``L`` the graph
Laplacian.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import blas

from .errors import DomainError, SolverError
from .sphere_geom import direction_to_erp_pixel, sample_count, spiral_samples


@dataclass
class SeedMask:
    mask: np.ndarray
    n: int

    @property
    def shape(self):
        return self.mask.shape


def build_seed_mask(H, W, K, n=None):
    """Mark the ERP pixels nearest to ``n`` spiral samples on the sphere.

    ``n`` defaults to ``sample_count(H, W, K)``.  Samples falling on the same
    pixel collapse into one seed.
    """
    if n is None:
        n = sample_count(H, W, K)
    pts = spiral_samples(n)
    u, v = direction_to_erp_pixel(pts, W, H)
    col = np.floor(u + 0.5).astype(np.intp) % W
    row = np.clip(np.floor(v + 0.5).astype(np.intp), 0, H - 1)
    mask = np.zeros((H, W), dtype=bool)
    mask[row, col] = True
    return SeedMask(mask, int(n))


def _as_mask(mask):
    return mask.mask if isinstance(mask, SeedMask) else np.asarray(mask, dtype=bool)


def laplacian(f):
    """Graph Laplacian of the wrapped/clamped 4-neighbour grid applied to ``f``."""
    out = 2.0 * f - np.roll(f, 1, axis=1) - np.roll(f, -1, axis=1)
    d = f[:-1] - f[1:]
    out[:-1] += d
    out[1:] -= d
    return out


def neighbour_sum(f, out):
    """Sum of the 4-neighbours of every pixel, written into ``out``."""
    out[:, 1:] = f[:, :-1]
    out[:, 0] = f[:, -1]
    out[:, :-1] += f[:, 1:]
    out[:, -1] += f[:, 0]
    out[:-1] += f[1:]
    out[1:] += f[:-1]
    return out


def degree(shape):
    H, W = shape
    deg = np.full((H, W), 4.0)
    deg[0] -= 1.0
    deg[-1] -= 1.0
    return deg


def _weights_and_target(s_e, mask, literal):
    m = mask.astype(np.float64)
    t = np.where(mask, s_e, 0.0)
    if literal:
        return np.ones_like(m), t
    return m, t


def objective(f, s_e, mask, lam, literal=False):
    """Value of J at ``f``; ordered neighbour pairs, so each edge counts twice."""
    mask = _as_mask(mask)
    w, t = _weights_and_target(np.asarray(s_e, float), mask, literal)
    f = np.asarray(f, float)
    dh = f - np.roll(f, -1, axis=1)
    dv = f[:-1] - f[1:]
    return float(np.sum(w * (f - t) ** 2) + 2.0 * lam * (np.sum(dh * dh) + np.sum(dv * dv)))


@dataclass
class SolveInfo:
    iterations: int
    residual: float
    residuals: list = field(default_factory=list)
    objectives: list = field(default_factory=list)


def pcg(apply_a, b, diag, x0=None, tol=1e-6, max_iter=1000, callback=None):
    """Jacobi-preconditioned conjugate gradients for an SPD operator.

    Works on flat float64 vectors; ``apply_a(v, out)`` must write ``A v``
    into ``out``.  Stops when ``||b - A x|| <= tol * ||b||``.  ``callback(x, r)``
    sees every iterate and its residual vector.  Returns ``(x, iterations,
    relative_residual)``; raises :class:`SolverError` if ``max_iter`` runs out.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    bnorm = blas.dnrm2(b)
    if bnorm == 0.0:
        return np.zeros_like(b), 0, 0.0
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    ap = np.empty_like(b)
    r = b - apply_a(x, ap)
    inv_d = 1.0 / diag
    z = inv_d * r
    p = z.copy()
    rz = blas.ddot(r, z)
    rel = blas.dnrm2(r) / bnorm
    if callback is not None:
        callback(x, r)
    it = 0
    while rel > tol:
        if it >= max_iter:
            raise SolverError("conjugate gradients did not converge", rel, it)
        apply_a(p, ap)
        pap = blas.ddot(p, ap)
        if pap <= 0.0 or rz == 0.0:
            # breakdown: the residual has underflowed
            break
        alpha = rz / pap
        blas.daxpy(p, x, a=alpha)
        blas.daxpy(ap, r, a=-alpha)
        it += 1
        rel = blas.dnrm2(r) / bnorm
        if callback is not None:
            callback(x, r)
        np.multiply(inv_d, r, out=z)
        rz_new = blas.ddot(r, z)
        p *= rz_new / rz
        p += z
        rz = rz_new
    return x, it, rel


def smooth(s_e, mask, lam=1.0, tol=1e-6, max_iter=None, literal=False, record=False):
    """Minimise the seeded smoothing objective for map ``s_e``.

    Parameters
    ----------
    s_e : (H, W) array
        Map to smooth; only its values at seed pixels enter the data term.
    mask : SeedMask or bool array
        Seed pixels.
    lam : float
        Smoothness weight, > 0.
    tol : float
        Relative residual at which the solver stops.
    max_iter : int, optional
        Defaults to ``10 * sqrt(H * W)``.
    literal : bool
        Put the data term on every pixel (off-seed target 0).
    record : bool
        Also return a :class:`SolveInfo` with residual and objective per iterate.
    """
    s_e = np.asarray(s_e, dtype=np.float64)
    mask = _as_mask(mask)
    if mask.shape != s_e.shape:
        raise DomainError(f"mask {mask.shape} does not match map {s_e.shape}")
    if not mask.any():
        raise DomainError("seed mask is empty")
    if lam <= 0 or tol <= 0:
        raise DomainError("lam and tol must be positive")
    H, W = s_e.shape
    if max_iter is None:
        max_iter = int(np.ceil(10.0 * np.sqrt(H * W)))
    # the minimiser is linear in the seed values; solve at unit scale
    scale = float(np.abs(s_e[mask]).max())
    if scale == 0.0:
        f = np.zeros_like(s_e)
        return (f, SolveInfo(0, 0.0)) if record else f
    s_e = s_e / scale
    w, t = _weights_and_target(s_e, mask, literal)
    b = (w * t).ravel()
    diag = (w + 2.0 * lam * degree(s_e.shape)).ravel()
    w = w.ravel()
    nb = np.empty((H, W))
    c = -2.0 * lam

    def apply_a(v, out):
        neighbour_sum(v.reshape(H, W), nb)
        np.multiply(diag, v, out=out)
        blas.daxpy(nb.ravel(), out, a=c)
        return out

    info = SolveInfo(0, 0.0)
    callback = None
    if record:
        bnorm = np.linalg.norm(b)
        const = float(np.sum(w * t.ravel() ** 2))

        def callback(x, r):
            # A x = b - r, so J(x) = x.A x - 2 b.x + t.W t = const - x.(b + r)
            info.residuals.append(float(np.linalg.norm(r) / bnorm))
            j = const - float(blas.ddot(x, b)) - float(blas.ddot(x, r))
            info.objectives.append(j * scale * scale)

    # start from the seed mean: exact for constant seeds, close for smooth maps
    x0 = np.full_like(b, s_e[mask].mean())
    f, it, rel = pcg(apply_a, b, diag, x0=x0, tol=tol, max_iter=max_iter, callback=callback)
    f = f.reshape(H, W) * scale
    info.iterations = it
    info.residual = rel
    if record:
        return f, info
    return f
