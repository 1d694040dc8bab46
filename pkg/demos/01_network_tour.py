"""Tour of the pyramidal depth network: build it, count its cost, run it.

Run:  python demos/01_network_tour.py
"""

import numpy as np

from depthedge import graph, weights_io

# The preset wants dims divisible by 64 (six stride-2 halvings).
spec = graph.pydnet_preset((384, 640))
print(f"layers            : {len(spec.layers)}")
print(f"parameters        : {graph.count_params(spec):,}")
print(f"MACs at 640x384   : {graph.count_macs(spec):,} "
      f"({graph.count_macs(spec) / 1e9:.2f} G)")
print(f"MACs at 320x192   : {graph.count_macs(spec, (192, 320)):,} (exactly 1/4)")

# Random-but-sane weights stand in for a trained bundle here.
store = graph.random_weight_store(spec, seed=7)
net = graph.build(spec, store)

# A synthetic garden-variety input: horizontal gradient + noise, uint8 RGB.
rng = np.random.default_rng(0)
img = (np.linspace(40, 215, 640, dtype=np.float32)[None, :, None]
       + rng.normal(0, 12, (384, 640, 3))).clip(0, 255).astype(np.uint8)

x = graph.preprocess(img, (640, 384))
depth = graph.infer(net, x)
print(f"depth map         : {depth.shape}, range ({depth.min():.4f}, {depth.max():.4f})")

# The decoder also predicts at coarser pyramid levels (used by the losses).
for i, scale_map in enumerate(graph.infer_scales(net, x), start=1):
    print(f"level {i} prediction: {scale_map.shape}")

# Weights travel in the LDWB container, bit-exactly.
n = weights_io.save(store, "/tmp/tour.ldwb")
print(f"bundle written    : {n:,} bytes; round-trip equal:",
      weights_io.load("/tmp/tour.ldwb") == store)
