"""Score a prediction against a density map and fixations."""
import numpy as np

from omnisal.metrics import evaluate

H, W = 32, 64
yy, xx = np.mgrid[0:H, 0:W]
gt = np.exp(-((xx - 40) ** 2 + (yy - 16) ** 2) / 50.0)
good = np.exp(-((xx - 38) ** 2 + (yy - 15) ** 2) / 60.0)
bad = np.exp(-((xx - 10) ** 2 + (yy - 16) ** 2) / 50.0)
fix = np.array([[40, 16], [41, 15], [39, 17], [42, 16]])

for name, pred in (("close", good), ("far", bad)):
    scores = evaluate(pred, gt, fix)
    print(f"{name:>5}: " + "  ".join(f"{k}={v:.3f}" for k, v in scores.items()))
