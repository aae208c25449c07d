"""Propagate sparse seeds over the sphere with the graph smoother."""
import numpy as np

from omnisal.smoother import build_seed_mask, objective, smooth

H, W = 64, 128
lat = np.linspace(90, -90, H)[:, None] * np.ones((1, W))
target = np.exp(-(lat / 30) ** 2)  # a band of saliency around the equator

mask = build_seed_mask(H, W, K=10)
print(f"{mask.n} seeds on a {W}x{H} raster")

for lam in (0.1, 1.0, 10.0):
    f, info = smooth(target, mask, lam, record=True)
    print(f"lam={lam:>4}: {info.iterations:3d} iterations, J={objective(f, target, mask, lam):.4f}, "
          f"range [{f.min():.3f}, {f.max():.3f}]")
