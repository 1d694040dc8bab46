"""Batch command-line front end.

Subcommands: infer, eval, bokeh, align, bench, macs. Exit codes: 0 on
success, 1 on usage errors, 2 on data or runtime errors. Results go to
stdout or output files; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import bokeh as bokeh_mod
from . import graph, image_io, metrics, scale_align, weights_io
from .tensor_ops import resize_bilinear

__all__ = ["run", "main"]

DEFAULT_W, DEFAULT_H = 640, 384


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract here is 1
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    p = _Parser(prog="depthedge", description=__doc__)
    sub = p.add_subparsers(dest="cmd", metavar="COMMAND")

    def add_dims(sp):
        sp.add_argument("--width", type=int, default=DEFAULT_W)
        sp.add_argument("--height", type=int, default=DEFAULT_H)

    sp = sub.add_parser("infer", help="run the network on one image")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True, help="16-bit depth PNG")
    sp.add_argument("--raw", help="also write a lossless LDRF float map")
    add_dims(sp)

    sp = sub.add_parser("eval", help="score predictions against ground truth")
    sp.add_argument("--pred", required=True, help="dir of predicted maps (.png or .ldrf)")
    sp.add_argument("--gt", required=True, help="dir of 16-bit ground-truth depth PNGs")
    sp.add_argument("--align", choices=["median", "lsq", "none"], default="median")
    sp.add_argument("--cap", type=float, default=80.0)
    sp.add_argument("--gt-scale", type=float, default=256.0,
                    help="ground-truth depth = png value / this divisor")

    sp = sub.add_parser("bokeh", help="depth-aware blur of one image")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--tau", type=float, default=0.7)
    sp.add_argument("--kernel", type=int, default=25)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--invert-selection", action="store_true")
    add_dims(sp)

    sp = sub.add_parser("align", help="RANSAC scale recovery from sparse anchors")
    sp.add_argument("--depth", required=True, help="LDRF relative inverse depth")
    sp.add_argument("--anchors", required=True, help="CSV of u,v,z anchor rows")
    sp.add_argument("--mode", choices=["scale", "scale-shift"], default="scale")
    sp.add_argument("--iters", type=int, default=100)
    sp.add_argument("--tol", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("bench", help="time repeated inferences")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--iters", type=int, default=50)
    sp.add_argument("--include-preprocess", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    add_dims(sp)

    sp = sub.add_parser("macs", help="analytic MAC/parameter accounting")
    add_dims(sp)

    return p


def _load_network(weights_path, width, height):
    spec = graph.pydnet_preset((height, width))
    store = weights_io.load(weights_path)
    return graph.build(spec, store)


def _cmd_infer(args):
    net = _load_network(args.weights, args.width, args.height)
    img = image_io.read_image(args.input)
    x = graph.preprocess(img, (args.width, args.height))
    depth = graph.infer(net, x)
    image_io.write_depth_png(args.output, depth)
    if args.raw:
        image_io.write_ldrf(args.raw, depth)
    print(f"wrote {args.output} ({depth.shape[1]}x{depth.shape[0]})")
    return 0


def _read_pred(path: Path):
    if path.suffix == ".ldrf":
        return image_io.read_ldrf(path)
    return image_io.read_depth_png(path)


def _pairs(pred_dir: Path, gt_dir: Path):
    preds = {p.stem: p for p in sorted(pred_dir.iterdir())
             if p.suffix in (".png", ".ldrf")}
    gts = {p.stem: p for p in sorted(gt_dir.iterdir()) if p.suffix == ".png"}
    common = sorted(set(preds) & set(gts))
    if not common:
        raise ValueError(f"no matching prediction/gt stems in {pred_dir} and {gt_dir}")
    return [(preds[s], gts[s]) for s in common]


def _cmd_eval(args):
    rows = []
    tiny = 1e-6
    for pred_path, gt_path in _pairs(Path(args.pred), Path(args.gt)):
        pred = _read_pred(pred_path)
        gt = image_io.read_gt_depth_png(gt_path, scale=args.gt_scale)
        if pred.shape != gt.shape:
            pred = resize_bilinear(pred[None, None].astype(np.float32),
                                   gt.shape[0], gt.shape[1])[0, 0]
        mask = gt > 0
        if args.align == "median":
            depth = 1.0 / np.maximum(pred, tiny)
            depth = metrics.median_align(depth, gt, mask)
        elif args.align == "lsq":
            s, b = metrics.lsq_align_inverse(pred, gt, mask)
            depth = 1.0 / np.maximum(s * pred + b, tiny)
        else:
            depth = pred.astype(np.float64)
        rows.append(metrics.compute_metrics(depth, gt, mask, cap=args.cap).as_tuple())
    mean = np.mean(np.asarray(rows), axis=0)
    print(metrics.MetricsReport.CSV_HEADER)
    print(",".join(f"{v:.6f}" for v in mean))
    return 0


def _cmd_bokeh(args):
    net = _load_network(args.weights, args.width, args.height)
    img = image_io.read_image(args.input)
    x = graph.preprocess(img, (args.width, args.height))
    depth = graph.infer(net, x)
    out = bokeh_mod.apply_bokeh(
        img, depth, tau=args.tau, kernel_size=args.kernel, sigma=args.sigma,
        invert_selection=args.invert_selection,
    )
    image_io.write_image(args.output, out)
    print(f"wrote {args.output}")
    return 0


def _cmd_align(args):
    pred = image_io.read_ldrf(args.depth)
    anchors = scale_align.load_anchors(args.anchors)
    mode = "scale_only" if args.mode == "scale" else "scale_shift"
    model = scale_align.ransac_scale(
        pred, anchors, iterations=args.iters, inlier_tol=args.tol,
        mode=mode, seed=args.seed,
    )
    print("scale,shift,inliers,inlier_ratio")
    print(f"{model.scale:.9g},{model.shift:.9g},{model.inlier_count},"
          f"{model.inlier_ratio:.6f}")
    return 0


def _cmd_bench(args):
    net = _load_network(args.weights, args.width, args.height)
    rng = np.random.default_rng(args.seed)
    if args.include_preprocess:
        img = rng.integers(0, 256, size=(args.height, args.width, 3), dtype=np.uint8)
    else:
        x = rng.random((1, 3, args.height, args.width), dtype=np.float32)

    def once():
        if args.include_preprocess:
            t = graph.preprocess(img, (args.width, args.height))
            return graph.infer(net, t)
        return graph.infer(net, x)

    for _ in range(5):
        once()
    times = []
    for _ in range(args.iters):
        t0 = time.perf_counter()
        once()
        times.append(time.perf_counter() - t0)
    times_ms = np.asarray(times) * 1e3
    mean = float(times_ms.mean())
    print(f"iterations {args.iters} at {args.width}x{args.height}"
          f"{' (with preprocess)' if args.include_preprocess else ''}")
    print(f"latency_ms mean {mean:.3f} min {times_ms.min():.3f} max {times_ms.max():.3f}")
    print(f"fps {1e3 / mean:.3f}")
    return 0


def _cmd_macs(args):
    spec = graph.pydnet_preset((args.height, args.width))
    m = graph.count_macs(spec)
    p = graph.count_params(spec)
    print(f"input {args.width}x{args.height}")
    print(f"macs {m} ({m / 1e9:.3f} G)")
    print(f"params {p} ({p / 1e6:.2f} M)")
    return 0


_COMMANDS = {
    "infer": _cmd_infer,
    "eval": _cmd_eval,
    "bokeh": _cmd_bokeh,
    "align": _cmd_align,
    "bench": _cmd_bench,
    "macs": _cmd_macs,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.cmd](args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
