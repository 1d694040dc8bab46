"""Teacher-student supervision and the seven-column evaluation protocol.

Run:  python demos/04_distillation_and_metrics.py
"""

import numpy as np

from depthedge.losses import distill_loss, gradient_loss
from depthedge.metrics import (
    MetricsReport,
    compute_metrics,
    lsq_align_inverse,
    median_align,
)

rng = np.random.default_rng(2)

# --- distillation: students match a teacher's relative inverse depth.
proxy = rng.random((1, 1, 32, 32)).astype(np.float32)  # the teacher's map
student_full = np.clip(proxy + rng.normal(0, 0.05, proxy.shape), 0, 1)
student_half = np.clip(  # a coarser pyramid level, upsampled inside the loss
    proxy.reshape(1, 1, 16, 2, 16, 2).mean(axis=(3, 5)) + rng.normal(0, 0.05, (1, 1, 16, 16)),
    0, 1,
)
loss = distill_loss([student_full, student_half], proxy, alpha_l=1.0, alpha_s0=0.5)
print(f"distill loss (two scales)        : {loss:.4f}")
print(f"distill loss (perfect student)   : {distill_loss([proxy.copy()], proxy):.4f}")
print(f"gradient term ignores DC offsets : {gradient_loss(proxy + 0.3, proxy):.2e}")

# --- evaluation: a monocular net knows depth only up to scale (and shift),
# so predictions are aligned before scoring.
gt = rng.uniform(2.0, 60.0, (64, 64))
pred_scaled = 0.37 * gt * (1 + rng.normal(0, 0.03, gt.shape))  # scale-free depth

raw = compute_metrics(pred_scaled, gt, cap=80.0)
aligned = compute_metrics(median_align(pred_scaled, gt), gt, cap=80.0)
print("\n" + MetricsReport.CSV_HEADER)
print("unaligned :", raw.csv_row())
print("median    :", aligned.csv_row())

# affine-invariant students need scale AND shift, fitted in inverse depth
pred_inv = 0.5 / gt + 0.02
s, b = lsq_align_inverse(pred_inv, gt)
depth_from_inv = 1.0 / (s * pred_inv + b)
print("lsq(s,b)  :", compute_metrics(depth_from_inv, gt, cap=80.0).csv_row(),
      f"   (s={s:.3f}, b={b:.3f})")
