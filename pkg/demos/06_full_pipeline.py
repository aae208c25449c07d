"""Run the whole predictor on a synthetic panorama and keep every stage."""
import sys
import time
from pathlib import Path

import numpy as np

from omnisal import imio
from omnisal.pipeline import PipelineConfig, predict_stages

H = 128
rng = np.random.default_rng(2)
img = np.full((H, 2 * H, 3), 60, np.uint8)
# keep the blocks well inside the mid-latitude band so no region touches its edge
for _ in range(6):
    v, u = rng.integers(3 * H // 8, 5 * H // 8 - 10), rng.integers(0, 2 * H - 12)
    img[v:v + 10, u:u + 12] = rng.integers(120, 255, 3)

t0 = time.perf_counter()
stages = predict_stages(img, PipelineConfig())
print(f"predicted in {time.perf_counter() - t0:.1f}s")
for name, m in stages.items():
    print(f"{name:>9}: mean {m.mean():.3f}, max {m.max():.3f}")

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
if out is not None:
    out.mkdir(parents=True, exist_ok=True)
    for name, m in stages.items():
        imio.write_map(out / f"{name}.png", m / max(m.max(), 1e-12))
    print("stages written to", out)
