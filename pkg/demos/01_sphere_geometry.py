"""Walk through the ERP pixel convention and rotations on the sphere."""
import numpy as np

from omnisal.sphere_geom import (Rotation3, direction_to_erp_pixel, erp_pixel_to_direction,
                                 rotate, sample_count, spiral_samples)

W, H = 16, 8

# pixel centres map to unit directions and back without loss
d = erp_pixel_to_direction(0, 0, W, H)
print("top-left pixel centre ->", np.round(d, 4))
print("and back ->", direction_to_erp_pixel(d, W, H))

# pixel centres sit half a pixel off the axes, so this lands just beside +x
print("pixel (W/2, H/2) ->", np.round(erp_pixel_to_direction(W // 2, H // 2, W, H), 4))

r = Rotation3.parse("0,0,90")
ahead = np.array([1.0, 0.0, 0.0])
print(f"rotating +x by {r.label()} ->", np.round(rotate(ahead, r), 6))
print("inverse brings it back ->", np.round(rotate(rotate(ahead, r), r, inverse=True), 6))

n = sample_count(1024, 2048, 100)
pts = spiral_samples(n)
print(f"{n} spiral samples for a 2048x1024 raster, mean z = {pts[:, 2].mean():+.2e}")
