"""Group total-variation denoising on a tiny panel.

Two sequences share a jump at t=5; the third only has noise. A single
penalty fuses all rows, so the shared jump survives while the noise
is flattened.
"""
import numpy as np

from eraseg.segment import SegmenterConfig, group_tv_denoise, lambda_max, segment, standardize

# closed form: two points (0, 4) move towards each other by lam/2 each
for lam in (1.0, 2.0, 4.5):
    print(f"lam={lam}:", group_tv_denoise(np.array([[0.0, 4.0]]), SegmenterConfig(lam=lam)).Y[0])

rng = np.random.default_rng(1)
T = 12
X = np.vstack([
    np.r_[np.zeros(5), np.ones(T - 5)] * 3,
    np.r_[np.zeros(5), -np.ones(T - 5)] * 2,
    np.zeros(T),
]) + 0.2 * rng.standard_normal((3, T))
Z, _ = standardize(X)
top = lambda_max(Z)
print(f"lambda_max = {top:.3f}")
for frac in (0.05, 0.3, 0.9):
    seg = segment(Z, SegmenterConfig(lam=frac * top))
    print(f"lam = {frac:.2f} * lambda_max: change points {seg.change_points}")
