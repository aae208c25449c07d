"""Coordinate maths on the unit sphere.

Equirectangular (ERP) convention used throughout the package: column ``u``
maps to longitude ``lon = ((u + 0.5) / W - 0.5) * 360`` degrees and row ``v``
maps to latitude ``lat = (0.5 - (v + 0.5) / H) * 180`` degrees, so row 0 is
the north pole side.  A direction is ``(cos lat cos lon, cos lat sin lon,
sin lat)``: +x looks at the image centre, +z is up.

All functions accept scalars or numpy arrays and broadcast.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class Rotation3:
    """Sphere orientation as rotation angles (degrees) about X, Y and Z.

    Angles are stored modulo 360.  The rotation is extrinsic and applied in
    the order X, then Y, then Z, i.e. ``R = Rz @ Ry @ Rx``.
    """

    ax: float = 0.0
    ay: float = 0.0
    az: float = 0.0

    def __post_init__(self):
        for name in ("ax", "ay", "az"):
            object.__setattr__(self, name, float(getattr(self, name)) % 360.0)

    @classmethod
    def parse(cls, text):
        """Build from a ``"ax,ay,az"`` string."""
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 3:
            raise DomainError(f"rotation needs three comma-separated angles, got {text!r}")
        return cls(*(float(p) for p in parts))

    def as_tuple(self):
        return (self.ax, self.ay, self.az)

    def is_identity(self):
        return self.ax == 0.0 and self.ay == 0.0 and self.az == 0.0

    def matrix(self):
        return rotation_matrix(self)

    def label(self):
        return "r{:g}_{:g}_{:g}".format(*self.as_tuple())


def rotation_matrix(r):
    """3x3 matrix of ``r`` (extrinsic X -> Y -> Z, right-handed)."""
    ax, ay, az = np.deg2rad(r.as_tuple())
    cx, sx = np.cos(ax), np.sin(ax)
    cy, sy = np.cos(ay), np.sin(ay)
    cz, sz = np.cos(az), np.sin(az)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry @ rx


def rotate(d, r, inverse=False):
    """Rotate direction(s) ``d`` (shape ``(..., 3)``) by ``r``.

    With ``inverse=True`` the transposed matrix is applied, undoing ``r``.
    """
    m = rotation_matrix(r)
    if inverse:
        m = m.T
    d = np.asarray(d, dtype=float)
    return d @ m.T


def lonlat_to_direction(lon, lat):
    """Unit vectors from longitude/latitude in radians."""
    lon = np.asarray(lon, dtype=float)
    lat = np.asarray(lat, dtype=float)
    c = np.cos(lat)
    return np.stack([c * np.cos(lon), c * np.sin(lon), np.sin(lat)], axis=-1)


def erp_pixel_lonlat(u, v, W, H):
    """Longitude and latitude (radians) of ERP pixel centres."""
    lon = ((np.asarray(u, dtype=float) + 0.5) / W - 0.5) * 2.0 * np.pi
    lat = (0.5 - (np.asarray(v, dtype=float) + 0.5) / H) * np.pi
    return lon, lat


def row_latitudes(H):
    """Latitude in degrees of every row centre of an ``H``-row ERP raster."""
    return (0.5 - (np.arange(H) + 0.5) / H) * 180.0


def erp_pixel_to_direction(u, v, W, H):
    """Unit direction through the centre of ERP pixel ``(u, v)``.

    Raises ``DomainError`` for pixels outside the ``W x H`` raster or when
    ``W != 2 H``.
    """
    if W != 2 * H:
        raise DomainError(f"ERP raster must have W = 2H, got {W}x{H}")
    u_arr = np.asarray(u)
    v_arr = np.asarray(v)
    if np.any(u_arr < 0) or np.any(u_arr >= W) or np.any(v_arr < 0) or np.any(v_arr >= H):
        raise DomainError(f"pixel outside the {W}x{H} raster")
    lon, lat = erp_pixel_lonlat(u_arr, v_arr, W, H)
    return lonlat_to_direction(lon, lat)


def direction_to_erp_pixel(d, W, H):
    """Continuous ERP coordinates ``(u, v)`` of direction(s) ``d``.

    ``u`` is wrapped into ``[0, W)``.  ``v`` is clamped into ``[0, H - 1]``;
    at the poles longitude is meaningless and ``u = W / 2`` is returned.
    """
    d = np.asarray(d, dtype=float)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    rho = np.hypot(x, y)
    lon = np.arctan2(y, x)
    lat = np.arctan2(z, rho)
    u = (lon / (2.0 * np.pi) + 0.5) * W - 0.5
    u = np.mod(u, W)
    u = np.where(rho == 0.0, W / 2.0, u)
    v = (0.5 - lat / np.pi) * H - 0.5
    v = np.clip(v, 0.0, H - 1.0)
    return u, v


def spiral_samples(n):
    """Golden-angle spiral of ``n`` quasi-uniform points on the unit sphere.

    Point ``i`` has ``z = 1 - 2 (i + 0.5) / n`` and azimuth ``i * golden_angle``.
    Returns an ``(n, 3)`` array.
    """
    n = int(n)
    if n < 1:
        raise DomainError("spiral_samples needs n >= 1")
    i = np.arange(n, dtype=float)
    z = 1.0 - 2.0 * (i + 0.5) / n
    theta = i * GOLDEN_ANGLE
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=-1)


def sample_count(H, W, K):
    """Number of sphere samples for an ``H x W`` raster at density divisor ``K``.

    ``n = max(1, round(H * W / K))``: larger ``K`` gives sparser seeds.
    """
    if H <= 0 or W <= 0 or K <= 0:
        raise DomainError("sample_count needs positive H, W and K")
    return max(1, int(np.floor(H * W / K + 0.5)))
