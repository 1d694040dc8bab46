"""Declarative layer graphs, the pyramidal depth-network preset, execution,
and analytic parameter/MAC accounting.

The preset is a 6-level pyramid: each encoder level halves the spatial
extent (stride-2 3x3 conv, then stride-1 3x3 conv, leaky ReLU after both;
channel plan 16/32/64/96/128/192, bottom at 1/64 resolution). Each level's
estimator applies four 3x3 convs with 96/64/32/8 channels plus a 3x3 head
to one channel; below the top level the 8-channel feature block is
bilinearly upsampled x2, passed through a 3x3 conv (the transposed-conv
replacement), and concatenated with the next encoder level's features.
Heads emit sigmoids; the top head sits at half input resolution and the
final map is produced by one more bilinear x2.

MAC convention: convolutions count h_out * w_out * out_ch * in_ch * kh * kw;
activations, resampling, and concatenation count zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ShapeError
from .tensor_ops import (
    ConvParams,
    as_nchw,
    activation,
    concat_channels,
    conv2d,
    conv_output_extent,
    resize_bilinear,
    upsample_bilinear,
)
from .weights_io import WeightStore

__all__ = [
    "LayerSpec",
    "GraphSpec",
    "Network",
    "pydnet_preset",
    "build",
    "infer",
    "infer_scales",
    "preprocess",
    "count_params",
    "count_macs",
    "weight_shapes",
    "random_weight_store",
]

ENCODER_CHANNELS = (16, 32, 64, 96, 128, 192)
ESTIMATOR_CHANNELS = (96, 64, 32, 8)
LEAKY_SLOPE = 0.2


@dataclass(frozen=True)
class LayerSpec:
    """One node of the layer graph.

    op is one of {"conv", "activation", "upsample", "concat", "sigmoid_head"}.
    Conv layers carry channel/kernel metadata plus the weight-name stem that
    binds "<stem>.weight" / "<stem>.bias" in a WeightStore.
    """

    id: str
    op: str
    inputs: tuple
    in_ch: int = 0
    out_ch: int = 0
    kernel: int = 3
    stride: int = 1
    pad: int = 1
    weight: str = ""
    factor: int = 2
    slope: float = LEAKY_SLOPE


@dataclass(frozen=True)
class GraphSpec:
    """Topologically ordered layer list with a single designated output.

    input_dims is (h, w); output_scale is the divisor of the input
    resolution at which the raw prediction is emitted (2 for the preset).
    scale_output_ids list the per-level sigmoid heads, finest first.
    """

    layers: tuple
    input_dims: tuple
    output_scale: int
    output_id: str
    scale_output_ids: tuple

    def __post_init__(self):
        seen = {"input"}
        for layer in self.layers:
            for src in layer.inputs:
                if src not in seen:
                    raise ConfigurationError(
                        f"layer {layer.id!r} references {src!r} before definition"
                    )
            if layer.id in seen:
                raise ConfigurationError(f"duplicate layer id {layer.id!r}")
            seen.add(layer.id)
        if self.output_id not in seen:
            raise ConfigurationError(f"output layer {self.output_id!r} not defined")

    def conv_layers(self):
        return [l for l in self.layers if l.op == "conv"]


class Network:
    """A GraphSpec bound to validated weights; immutable after build."""

    def __init__(self, spec: GraphSpec, weights: WeightStore, params):
        self.spec = spec
        self.weights = weights
        self._params = params  # layer id -> ConvParams

    def conv_params(self, layer_id):
        return self._params[layer_id]


def pydnet_preset(input_dims) -> GraphSpec:
    """The 6-level pyramidal preset for an (h, w) input divisible by 64."""
    h, w = input_dims
    if h % 64 or w % 64 or h < 64 or w < 64:
        raise ConfigurationError(
            f"input dims must be positive and divisible by 64, got {h}x{w}"
        )
    layers = []

    def add(layer):
        layers.append(layer)
        return layer.id

    def conv(name, src, in_ch, out_ch, stride=1):
        return add(
            LayerSpec(
                id=name,
                op="conv",
                inputs=(src,),
                in_ch=in_ch,
                out_ch=out_ch,
                kernel=3,
                stride=stride,
                pad=1,
                weight=name,
            )
        )

    def lrelu(name, src):
        return add(LayerSpec(id=name, op="activation", inputs=(src,)))

    # encoder
    prev, cin = "input", 3
    enc_feat = {}
    for lvl, ch in enumerate(ENCODER_CHANNELS, start=1):
        x = conv(f"enc{lvl}a", prev, cin, ch, stride=2)
        x = lrelu(f"enc{lvl}a_act", x)
        x = conv(f"enc{lvl}b", x, ch, ch)
        x = lrelu(f"enc{lvl}b_act", x)
        enc_feat[lvl] = x
        prev, cin = x, ch

    # decoder, coarsest level first
    heads = {}
    below = None  # 8-channel estimator features from the level underneath
    for lvl in range(6, 0, -1):
        feat = enc_feat[lvl]
        cin = ENCODER_CHANNELS[lvl - 1]
        if below is not None:
            up = add(LayerSpec(id=f"up{lvl}_rs", op="upsample", inputs=(below,), factor=2))
            up = conv(f"up{lvl}", up, 8, 8)
            up = lrelu(f"up{lvl}_act", up)
            feat = add(LayerSpec(id=f"cat{lvl}", op="concat", inputs=(feat, up)))
            cin += 8
        x = feat
        for k, ch in enumerate(ESTIMATOR_CHANNELS):
            x = conv(f"dec{lvl}_{k}", x, cin, ch)
            x = lrelu(f"dec{lvl}_{k}_act", x)
            cin = ch
        below = x
        head = conv(f"head{lvl}", x, 8, 1)
        heads[lvl] = add(LayerSpec(id=f"disp{lvl}", op="sigmoid_head", inputs=(head,)))

    return GraphSpec(
        layers=tuple(layers),
        input_dims=(h, w),
        output_scale=2,
        output_id=heads[1],
        scale_output_ids=(heads[1], heads[2], heads[3]),
    )


def weight_shapes(spec: GraphSpec):
    """Name -> shape for every weight the graph binds."""
    shapes = {}
    for l in spec.conv_layers():
        shapes[f"{l.weight}.weight"] = (l.out_ch, l.in_ch, l.kernel, l.kernel)
        shapes[f"{l.weight}.bias"] = (l.out_ch,)
    return shapes


def random_weight_store(spec: GraphSpec, seed=0) -> WeightStore:
    """Fan-in-scaled Gaussian store matching the graph's declared shapes.

    Kernel std is sqrt(2 / (in_ch * kh * kw)) so activations stay O(1)
    through the whole pyramid; biases are small noise.
    """
    rng = np.random.default_rng(seed)
    store = WeightStore()
    for name, shape in weight_shapes(spec).items():
        if len(shape) == 4:
            std = np.sqrt(2.0 / (shape[1] * shape[2] * shape[3]))
        else:
            std = 0.01
        store.add(name, rng.normal(0.0, std, size=shape).astype(np.float32))
    return store


def build(spec: GraphSpec, store: WeightStore) -> Network:
    """Bind weights, validating presence and shape for every conv layer."""
    params = {}
    for l in spec.conv_layers():
        bound = {}
        for suffix in ("weight", "bias"):
            key = f"{l.weight}.{suffix}"
            if key not in store:
                raise ConfigurationError(
                    f"layer {l.id!r}: weight store is missing {key!r}"
                )
            bound[suffix] = store[key]
        expect_k = (l.out_ch, l.in_ch, l.kernel, l.kernel)
        if bound["weight"].shape != expect_k:
            raise ShapeError(
                f"layer {l.id!r}: kernel shape {bound['weight'].shape} "
                f"does not match declared {expect_k}"
            )
        if bound["bias"].shape != (l.out_ch,):
            raise ShapeError(
                f"layer {l.id!r}: bias shape {bound['bias'].shape} "
                f"does not match declared ({l.out_ch},)"
            )
        params[l.id] = ConvParams(
            kernel=bound["weight"], bias=bound["bias"], stride=l.stride, padding=l.pad
        )
    return Network(spec, store, params)


def _consumer_counts(spec: GraphSpec, keep):
    counts = {}
    for l in spec.layers:
        for src in l.inputs:
            counts[src] = counts.get(src, 0) + 1
    for k in keep:
        counts[k] = counts.get(k, 0) + 1
    return counts


def _execute(net: Network, x, keep):
    """Run all layers in order; returns the kept outputs. Intermediates are
    dropped as soon as their last consumer has run, so repeated calls keep a
    bounded footprint."""
    spec = net.spec
    counts = _consumer_counts(spec, keep)
    values = {"input": x}
    out = {}

    def consume(name):
        v = values[name]
        counts[name] -= 1
        if counts[name] == 0:
            del values[name]
        return v

    for l in spec.layers:
        if l.op == "conv":
            y = conv2d(consume(l.inputs[0]), net.conv_params(l.id))
        elif l.op == "activation":
            y = activation(consume(l.inputs[0]), "leaky_relu", l.slope)
        elif l.op == "sigmoid_head":
            y = activation(consume(l.inputs[0]), "sigmoid")
        elif l.op == "upsample":
            y = upsample_bilinear(consume(l.inputs[0]), l.factor)
        elif l.op == "concat":
            y = concat_channels(consume(l.inputs[0]), consume(l.inputs[1]))
        else:
            raise ConfigurationError(f"unknown op {l.op!r} in layer {l.id!r}")
        values[l.id] = y
        if l.id in keep:
            out[l.id] = y
    return out

# Largest/smallest float32 values inside the open interval (0, 1); the final
# sigmoid can saturate to exactly 0.0/1.0 in float32 for extreme weights.
_OPEN_LO = np.nextafter(np.float32(0.0), np.float32(1.0))
_OPEN_HI = np.nextafter(np.float32(1.0), np.float32(0.0))


def infer(net: Network, x) -> np.ndarray:
    """Full-resolution relative inverse depth, values in the open (0, 1).

    x must be a (1, 3, h, w) tensor matching the graph's input_dims; the raw
    half-resolution prediction is bilinearly upsampled by output_scale.
    """
    x = as_nchw(x)
    h, w = net.spec.input_dims
    if x.shape[1] != 3 or x.shape[2] != h or x.shape[3] != w:
        raise ShapeError(
            f"input shape {x.shape} does not match graph input (n, 3, {h}, {w})"
        )
    raw = _execute(net, x, keep=(net.spec.output_id,))[net.spec.output_id]
    full = upsample_bilinear(raw, net.spec.output_scale)
    return np.clip(full[0, 0], _OPEN_LO, _OPEN_HI)


def infer_scales(net: Network, x, count=3):
    """Per-level sigmoid maps, finest first, at their native resolutions.

    Used by the distillation losses ("the highest available scales"); the
    full-resolution DepthMap contract is infer()'s alone.
    """
    ids = net.spec.scale_output_ids[:count]
    x = as_nchw(x)
    out = _execute(net, x, keep=ids)
    return [out[i][0, 0] for i in ids]


def preprocess(image, target) -> np.ndarray:
    """8-bit RGB (h, w, 3) -> float32 (1, 3, h, w) in [0, 1], bilinearly
    resized to target = (width, height)."""
    img = np.asarray(image)
    if img.size == 0:
        raise ShapeError("empty image")
    if img.ndim != 3 or img.shape[2] != 3:
        raise ShapeError(f"expected (h, w, 3) RGB image, got {img.shape}")
    w, h = target
    x = img.astype(np.float32).transpose(2, 0, 1)[None] / np.float32(255.0)
    return resize_bilinear(x, h, w)


def count_params(spec: GraphSpec) -> int:
    """Exact learnable-parameter count: sum of kernel and bias sizes."""
    total = 0
    for l in spec.conv_layers():
        total += l.out_ch * l.in_ch * l.kernel * l.kernel + l.out_ch
    return total


def _spatial_plan(spec: GraphSpec, input_dims):
    dims = {"input": tuple(input_dims)}
    for l in spec.layers:
        if l.op == "conv":
            h, w = dims[l.inputs[0]]
            dims[l.id] = (
                conv_output_extent(h, l.kernel, l.stride, l.pad),
                conv_output_extent(w, l.kernel, l.stride, l.pad),
            )
        elif l.op == "upsample":
            h, w = dims[l.inputs[0]]
            dims[l.id] = (h * l.factor, w * l.factor)
        elif l.op == "concat":
            a, b = (dims[s] for s in l.inputs)
            if a != b:
                raise ShapeError(f"concat {l.id!r} spatial mismatch {a} vs {b}")
            dims[l.id] = a
        else:
            dims[l.id] = dims[l.inputs[0]]
    return dims


def count_macs(spec: GraphSpec, input_dims=None) -> int:
    """Multiply-accumulate count for one forward pass at input_dims (h, w).

    Only convolutions contribute: h_out * w_out * out_ch * in_ch * kh * kw.
    Resampling, activations, and concatenation count zero by convention.
    """
    dims = _spatial_plan(spec, input_dims or spec.input_dims)
    total = 0
    for l in spec.conv_layers():
        h, w = dims[l.id]
        total += h * w * l.out_ch * l.in_ch * l.kernel * l.kernel
    return total
