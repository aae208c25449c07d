"""Resampling between ERP rasters and rectilinear cube faces.

Rasters are numpy arrays of shape ``(H, W)`` (saliency maps) or
``(H, W, C)`` (images).  Interpolation is bilinear everywhere, wrapping
horizontally across the ERP seam and clamping at the poles and at face edges.
"""
import numpy as np

from .errors import DomainError
from .sphere_geom import Rotation3, direction_to_erp_pixel, erp_pixel_to_direction, rotate

FACES = ("front", "right", "back", "left", "top", "bottom")

# (centre, image-right, image-up) axes of each face, viewed from inside the sphere
_FACE_AXES = {
    "front": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "right": ((0, 1, 0), (-1, 0, 0), (0, 0, 1)),
    "back": ((-1, 0, 0), (0, -1, 0), (0, 0, 1)),
    "left": ((0, -1, 0), (1, 0, 0), (0, 0, 1)),
    "top": ((0, 0, 1), (0, 1, 0), (-1, 0, 0)),
    "bottom": ((0, 0, -1), (0, 1, 0), (1, 0, 0)),
}

IDENTITY = Rotation3()


def _face_axes(face):
    try:
        c, r, u = _FACE_AXES[face]
    except KeyError:
        raise DomainError(f"unknown face {face!r}; expected one of {FACES}") from None
    return np.array(c, float), np.array(r, float), np.array(u, float)


def _as_float(src):
    src = np.asarray(src)
    if src.dtype == np.uint8:
        return src.astype(np.float64) / 255.0
    if src.dtype == np.uint16:
        return src.astype(np.float64) / 65535.0
    return src.astype(np.float64, copy=False)


def sample_erp(src, u, v):
    """Bilinear lookup of ``src`` at continuous ERP coordinates ``(u, v)``.

    Columns wrap modulo ``W``; rows are clamped to ``[0, H - 1]``.
    """
    src = _as_float(src)
    H, W = src.shape[:2]
    u = np.mod(np.asarray(u, dtype=float), W)
    v = np.clip(np.asarray(v, dtype=float), 0.0, H - 1.0)
    u0 = np.floor(u).astype(np.intp)
    v0 = np.floor(v).astype(np.intp)
    fu = u - u0
    fv = v - v0
    u0 %= W
    u1 = (u0 + 1) % W
    v1 = np.minimum(v0 + 1, H - 1)
    if src.ndim == 3:
        fu = fu[..., None]
        fv = fv[..., None]
    top = src[v0, u0] * (1.0 - fu) + src[v0, u1] * fu
    bot = src[v1, u0] * (1.0 - fu) + src[v1, u1] * fu
    return top * (1.0 - fv) + bot * fv


def _sample_face(face_img, a, b):
    """Bilinear lookup on a square face raster with edge clamping."""
    F = face_img.shape[0]
    a = np.clip(a, 0.0, F - 1.0)
    b = np.clip(b, 0.0, F - 1.0)
    a0 = np.minimum(np.floor(a).astype(np.intp), F - 2) if F > 1 else np.zeros_like(a, np.intp)
    b0 = np.minimum(np.floor(b).astype(np.intp), F - 2) if F > 1 else np.zeros_like(b, np.intp)
    fa = a - a0
    fb = b - b0
    a1 = np.minimum(a0 + 1, F - 1)
    b1 = np.minimum(b0 + 1, F - 1)
    if face_img.ndim == 3:
        fa = fa[..., None]
        fb = fb[..., None]
    top = face_img[b0, a0] * (1.0 - fa) + face_img[b0, a1] * fa
    bot = face_img[b1, a0] * (1.0 - fa) + face_img[b1, a1] * fa
    return top * (1.0 - fb) + bot * fb


def face_directions(face, F, r=IDENTITY):
    """World-space unit rays through every pixel of a ``F x F`` face."""
    c, right, up = _face_axes(face)
    s = 2.0 * (np.arange(F) + 0.5) / F - 1.0
    ss, tt = np.meshgrid(s, s)
    rays = c + ss[..., None] * right - tt[..., None] * up
    rays /= np.linalg.norm(rays, axis=-1, keepdims=True)
    if not r.is_identity():
        rays = rotate(rays, r)
    return rays


def extract_face(src, face, r=IDENTITY, F=None):
    """Rectilinear 90-degree view of ``src`` through one cube face.

    Each face ray is rotated by ``r`` before the ERP lookup.  ``F`` defaults
    to ``H // 2``.
    """
    src = _as_float(src)
    H, W = src.shape[:2]
    if F is None:
        F = H // 2
    if F < 2:
        raise DomainError("face side must be at least 2 px")
    u, v = direction_to_erp_pixel(face_directions(face, F, r), W, H)
    return sample_erp(src, u, v)


def extract_faces(src, r=IDENTITY, F=None):
    """All six faces as a ``{face: raster}`` dict."""
    return {face: extract_face(src, face, r, F) for face in FACES}


def _erp_face_lookup(W, H, r):
    """Per ERP pixel: owning face ordinal and continuous face coordinates (s, t)."""
    vv, uu = np.mgrid[0:H, 0:W]
    d = erp_pixel_to_direction(uu, vv, W, H)
    if not r.is_identity():
        d = rotate(d, r, inverse=True)
    # dot products with every face centre; the owner is the largest, first wins ties
    centres = np.array([_FACE_AXES[f][0] for f in FACES], float)
    dots = d @ centres.T
    owner = np.argmax(dots, axis=-1)
    return d, dots, owner


def _face_coords(d, face, F):
    c, right, up = _face_axes(face)
    depth = d @ c
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (d @ right) / depth
        t = -(d @ up) / depth
    a = (s + 1.0) * F / 2.0 - 0.5
    b = (t + 1.0) * F / 2.0 - 0.5
    return a, b


def project_face_to_erp(face_img, face, r=IDENTITY, W=None, H=None):
    """Paint one face back onto an ERP raster.

    Returns ``(erp, coverage)`` where ``coverage`` is true at every ERP pixel
    whose inverse-rotated direction belongs to ``face``.  Directions on a face
    seam belong to the face listed first in ``FACES``.  Uncovered pixels are 0.
    """
    face_img = _as_float(face_img)
    if H is None:
        H = W // 2 if W is not None else 2 * face_img.shape[0]
    if W is None:
        W = 2 * H
    if W != 2 * H:
        raise DomainError(f"ERP raster must have W = 2H, got {W}x{H}")
    F = face_img.shape[0]
    if face_img.shape[1] != F:
        raise DomainError("face raster must be square")
    d, _, owner = _erp_face_lookup(W, H, r)
    coverage = owner == FACES.index(face)
    out = np.zeros((H, W) + face_img.shape[2:], dtype=np.float64)
    a, b = _face_coords(d[coverage], face, F)
    out[coverage] = _sample_face(face_img, a, b)
    return out, coverage


def faces_to_erp(faces, r=IDENTITY, W=None, H=None):
    """Composite six face rasters onto one ERP raster using the coverage partition."""
    out = None
    for face in FACES:
        proj, cov = project_face_to_erp(faces[face], face, r, W, H)
        if out is None:
            out = proj
        else:
            out[cov] = proj[cov]
    return out


def yaw_shift(src, degrees):
    """Rotate an ERP raster about the vertical axis by ``degrees``.

    Content moves right by ``degrees * W / 360`` columns, wrapping around.
    Integer column shifts are exact (``np.roll``, dtype preserved); other
    amounts are resampled bilinearly.
    """
    src = np.asarray(src)
    W = src.shape[1]
    shift = degrees * W / 360.0
    k = round(shift)
    if abs(shift - k) < 1e-9:
        return np.roll(src, k % W, axis=1)
    srcf = _as_float(src)
    H = srcf.shape[0]
    vv, uu = np.mgrid[0:H, 0:W]
    return sample_erp(srcf, uu - shift, vv)


def middle_rows(H):
    """Row indices of the band whose centre latitude satisfies ``|lat| <= 45``."""
    v = np.arange(H)
    return v[2 * np.abs(2 * v + 1 - H) <= H]


def split_erp(src, F=None):
    """Split an ERP raster into the equatorial band and the two polar faces.

    Returns ``(middle, top, bottom)``.  ``middle`` holds the rows with
    ``|lat| <= 45`` degrees (``H / 2`` rows when ``H`` is a multiple of 4);
    ``top`` and ``bottom`` are un-rotated cube faces of side ``F``.
    """
    src = np.asarray(src)
    H = src.shape[0]
    if H % 2:
        raise DomainError("split_erp needs an even ERP height")
    rows = middle_rows(H)
    middle = src[rows[0]:rows[-1] + 1]
    top = extract_face(src, "top", IDENTITY, F)
    bottom = extract_face(src, "bottom", IDENTITY, F)
    return middle, top, bottom


def assemble_split(middle_sal, top_sal, bottom_sal, W, H):
    """Inverse of :func:`split_erp` for saliency maps.

    Equatorial rows come from ``middle_sal``; every other row is filled by
    re-projecting the polar faces (all such directions hit a polar face).
    """
    if W != 2 * H:
        raise DomainError(f"ERP raster must have W = 2H, got {W}x{H}")
    rows = middle_rows(H)
    middle_sal = np.asarray(middle_sal, dtype=np.float64)
    if middle_sal.shape[:2] != (len(rows), W):
        raise DomainError(
            f"middle map is {middle_sal.shape[:2]}, expected {(len(rows), W)}")
    top_sal = np.asarray(top_sal, dtype=np.float64)
    bottom_sal = np.asarray(bottom_sal, dtype=np.float64)
    if top_sal.shape != bottom_sal.shape or top_sal.shape[0] != top_sal.shape[1]:
        raise DomainError("polar face maps must be square and equally sized")
    F = top_sal.shape[0]
    out = np.zeros((H, W) + middle_sal.shape[2:], dtype=np.float64)
    out[rows[0]:rows[-1] + 1] = middle_sal
    for face, face_map, sel in (("top", top_sal, slice(0, rows[0])),
                                ("bottom", bottom_sal, slice(rows[-1] + 1, H))):
        vv, uu = np.mgrid[sel, 0:W]
        if vv.size == 0:
            continue
        d = erp_pixel_to_direction(uu, vv, W, H)
        a, b = _face_coords(d, face, F)
        out[sel] = _sample_face(face_map, a, b)
    return out
