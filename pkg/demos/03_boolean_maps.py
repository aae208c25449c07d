"""The planar saliency backend on a toy scene."""
import numpy as np

from omnisal.saliency2d import BmsParams, bms

img = np.full((96, 128, 3), 40, np.uint8)
img[30:60, 70:100] = (220, 60, 40)    # a red patch in the middle
img[0:20, 0:128] = (200, 200, 200)   # a bright band touching the border

s = bms(img, BmsParams())
inside = s[30:60, 70:100].sum() / s.sum()
print(f"saliency range [{s.min():.2f}, {s.max():.2f}]")
print(f"share of saliency on the red patch: {inside:.1%}")
print(f"share on the border band: {s[0:20].sum() / s.sum():.1%}")
