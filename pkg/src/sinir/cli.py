"""Command-line entry point: ``sinir {train,infer,sr,metrics,pyramid}``."""
from __future__ import annotations

import argparse
import contextlib
import dataclasses
import logging
import os
import sys

from . import io
from .corruption import CorruptionSpec
from .errors import SinirError
from .inference import DEFAULT_FEATHER, composite, manipulate, super_resolve
from .metrics import evaluate
from .resample import build_pyramid
from .trainer import TrainConfig, apply_preset, train

log = logging.getLogger("sinir")

TRAIN_KEYS = {f.name for f in dataclasses.fields(TrainConfig)} | {"intensity", "patch_count"}
INFER_KEYS = {"start_scale", "sr_factor", "feather_sigma"}


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except (SinirError, OSError) as exc:
        raise StageError(name, exc) from exc


def _threads_limit():
    raw = os.environ.get("SINIR_THREADS")
    if not raw:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=max(1, int(raw)))


def _config_values(args, allowed):
    if getattr(args, "config", None) is None:
        return {}
    with stage("read config"):
        return io.load_run_config(args.config, allowed)


def train_config_from(args) -> TrainConfig:
    file_vals = _config_values(args, TRAIN_KEYS | INFER_KEYS)
    for k in INFER_KEYS:
        file_vals.pop(k, None)
    cli = {
        "max_dim": args.max_dim, "min_dim": args.min_dim, "r_target": args.scale_factor,
        "iters_per_scale": args.iters, "width": args.width, "lr": args.lr, "seed": args.seed,
        "num_scales": args.num_scales, "antialias_downsample": args.antialias,
        "corruption": args.corruption, "intensity": args.intensity, "patch_count": args.patch_count,
    }
    preset = args.preset or file_vals.pop("preset", "default")
    file_vals.pop("preset", None)
    vals = {**file_vals, **{k: v for k, v in cli.items() if v is not None}}
    with stage("config"):
        cfg = apply_preset(TrainConfig(), preset)
        base = cfg.corruption
        corr = vals.pop("corruption", None)
        if isinstance(corr, dict):
            base = CorruptionSpec(**corr)
            corr = None
        spec = CorruptionSpec(
            scheme=corr if corr is not None else base.scheme,
            intensity=vals.pop("intensity", base.intensity),
            patch_count=vals.pop("patch_count", base.patch_count),
        )
        return dataclasses.replace(cfg, corruption=spec, **vals)


def cmd_train(args):
    cfg = train_config_from(args)
    with stage("load image"):
        img = io.load_png(args.image)
    with stage("train"):
        ckpt = train(img, cfg)
    with stage("save checkpoint"):
        io.save_checkpoint(ckpt, args.out)
    log.info("saved %d-scale checkpoint to %s", ckpt.num_scales, args.out)


def cmd_infer(args):
    file_vals = _config_values(args, TRAIN_KEYS | INFER_KEYS)
    n = args.start_scale if args.start_scale is not None else file_vals.get("start_scale")
    if n is None:
        raise StageError("arguments", "--start-scale is required")
    feather = args.feather if args.feather is not None else file_vals.get("feather_sigma", DEFAULT_FEATHER)
    with stage("load checkpoint"):
        ckpt = io.load_checkpoint(args.ckpt)
    with stage("load image"):
        img = io.load_png(args.image)
    with stage("manipulate"):
        out = manipulate(img, ckpt, int(n))
    if args.mask is not None:
        with stage("load mask"):
            mask = io.load_mask(args.mask)
            orig = io.load_png(args.orig) if args.orig is not None else img
        with stage("composite"):
            out = composite(out, orig, mask, float(feather))
    with stage("save image"):
        io.save_png(out, args.out)


def cmd_sr(args):
    file_vals = _config_values(args, TRAIN_KEYS | INFER_KEYS)
    factor = args.factor if args.factor is not None else file_vals.get("sr_factor", 4.0)
    with stage("load checkpoint"):
        ckpt = io.load_checkpoint(args.ckpt)
    with stage("load image"):
        img = io.load_png(args.image)
    with stage("super-resolve"):
        out = super_resolve(img, ckpt, float(factor))
    with stage("save image"):
        io.save_png(out, args.out)


def cmd_metrics(args):
    with stage("load images"):
        ref = io.load_png(args.ref)
        test = io.load_png(args.test)
    with stage("metrics"):
        print(evaluate(ref, test).line())


def cmd_pyramid(args):
    with stage("load image"):
        img = io.load_png(args.image)
    with stage("pyramid"):
        pyr = build_pyramid(img, args.max_dim, args.min_dim, args.scale_factor)
    for n in range(pyr.coarsest, -1, -1):
        h, w = pyr.level_dims(n)
        print(f"scale {n}: {h}x{w}")
    print(f"num_scales={pyr.num_scales} effective_r={pyr.effective_r:.6f}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sinir", description=__doc__)
    p.add_argument("-q", "--quiet", action="store_true", help="suppress progress logging")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a cascade on one image")
    t.add_argument("--image", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--config", help="TOML file with config keys; flags override it")
    t.add_argument("--preset", choices=["default", "photo-style", "sr"])
    t.add_argument("--max-dim", type=int)
    t.add_argument("--min-dim", type=int)
    t.add_argument("--scale-factor", type=float)
    t.add_argument("--num-scales", type=int)
    t.add_argument("--iters", type=int)
    t.add_argument("--width", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument(
        "--corruption",
        choices=["pixel-shuffle", "black", "add-gauss", "replace-gauss", "patch-shuffle"],
    )
    t.add_argument("--intensity", type=float)
    t.add_argument("--patch-count", type=int)
    t.add_argument("--antialias", action=argparse.BooleanOptionalAction, default=None)
    t.add_argument("--seed", type=int)
    t.set_defaults(func=cmd_train)

    i = sub.add_parser("infer", help="manipulate an image starting at a given scale")
    i.add_argument("--ckpt", required=True)
    i.add_argument("--image", required=True)
    i.add_argument("--start-scale", type=int)
    i.add_argument("--out", required=True)
    i.add_argument("--mask")
    i.add_argument("--orig")
    i.add_argument("--feather", type=float)
    i.add_argument("--config")
    i.set_defaults(func=cmd_infer)

    s = sub.add_parser("sr", help="super-resolve with the finest network")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--image", required=True)
    s.add_argument("--factor", type=float)
    s.add_argument("--out", required=True)
    s.add_argument("--config")
    s.set_defaults(func=cmd_sr)

    m = sub.add_parser("metrics", help="SSIM / MS-SSIM / RMSE between two images")
    m.add_argument("--ref", required=True)
    m.add_argument("--test", required=True)
    m.set_defaults(func=cmd_metrics)

    y = sub.add_parser("pyramid", help="print the training pyramid dims")
    y.add_argument("--image", required=True)
    y.add_argument("--max-dim", type=int, default=250)
    y.add_argument("--min-dim", type=int, default=25)
    y.add_argument("--scale-factor", type=float, default=4 / 3)
    y.set_defaults(func=cmd_pyramid)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        with _threads_limit():
            args.func(args)
    except StageError as exc:
        print(f"sinir {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
