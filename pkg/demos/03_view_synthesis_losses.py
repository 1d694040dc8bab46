"""Self-supervision signals: warp a source view onto the reference camera,
then score the reconstruction.

Run:  python demos/03_view_synthesis_losses.py
"""

import numpy as np

from depthedge.losses import (
    CameraIntrinsics,
    RelativePose,
    per_pixel_min_with_automask,
    photometric_error,
    smoothness_loss,
    ssim,
    warp,
)

rng = np.random.default_rng(1)
H, W = 48, 64
K = CameraIntrinsics(fx=120.0, fy=120.0, cx=(W - 1) / 2, cy=(H - 1) / 2)

# reference scene: smooth color field, fronto-parallel plane at z = 4
ref = np.zeros((1, 3, H, W), np.float32)
for c in range(3):
    ref[0, c] = 0.3 + 0.2 * np.sin((np.arange(W) / (8 + 3 * c)))[None, :] \
        + 0.1 * np.cos((np.arange(H) / 7))[:, None]
depth = np.full((H, W), 4.0)

# camera slides 0.2 units along +x: the source view is the reference shifted
baseline = 0.2
pose = RelativePose(np.eye(3), np.array([baseline, 0.0, 0.0]))
shift_px = K.fx * baseline / 4.0
print(f"expected horizontal shift: {shift_px:.2f} px")

source = warp(ref, K, pose, K, depth)  # synthesize the "other" camera's view
rewarp = warp(source, K, RelativePose(np.eye(3), -pose.translation), K, depth)

pe_good = photometric_error(ref, rewarp)
pe_bad = photometric_error(ref, source)  # unwarped: misaligned by shift_px
print(f"photometric error, correctly warped : {float(pe_good.mean()):.5f}")
print(f"photometric error, identity 'warp'  : {float(pe_bad.mean()):.5f}")
print(f"ssim(ref, rewarp) mean              : {float(ssim(ref, rewarp).mean()):.4f}")

# the per-pixel minimum + automask keeps pixels whose best warped error
# beats the unwarped one (static pixels fail and are masked out)
pe_min, mask = per_pixel_min_with_automask([pe_good], [pe_bad])
print(f"automask keeps {100 * float(mask.mean()):.1f}% of pixels")

# edge-aware smoothness: cheap on flat depth, costly on a noisy one
flat = np.full((1, 1, H, W), 0.25, np.float32)
noisy = flat + rng.normal(0, 0.02, flat.shape).astype(np.float32)
print(f"smoothness(flat depth)  : {smoothness_loss(flat, ref):.5f}")
print(f"smoothness(noisy depth) : {smoothness_loss(noisy, ref):.5f}")
print("scaling depth by 10 changes nothing:",
      np.isclose(smoothness_loss(10 * noisy, ref), smoothness_loss(noisy, ref)))
