"""Progressive cascaded training, one frozen network per pyramid level."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field


from .corruption import CorruptionSpec, corrupt
from .errors import ParameterError, ShapeError, SinirError
from .loss import rec_loss, rec_loss_and_grad
from .nn import GradientTape, RefineNet, net_backward, net_forward, net_init
from .optim import AdamState, adam_step
from .resample import ScalePyramid, build_pyramid, upsample_by_r
from .tensor import Rng, as_image

log = logging.getLogger(__name__)

PRESETS = ("default", "photo_style", "super_resolution")
PRESET_ALIASES = {"photo-style": "photo_style", "sr": "super_resolution"}


@dataclass(frozen=True)
class TrainConfig:
    max_dim: int | None = 250
    min_dim: int = 25
    r_target: float = 4 / 3
    iters_per_scale: int = 500
    lr: float = 1e-4
    width: int = 64
    corruption: CorruptionSpec = field(default_factory=CorruptionSpec)
    seed: int = 0
    antialias_downsample: bool = False
    preset: str = "default"
    # None: fit the scale count from max_dim/min_dim; otherwise r_target is used verbatim
    num_scales: int | None = None
    ssim_weight: float = 1.0
    # start each finer level from a copy of the level below instead of a fresh init
    warm_start: bool = True
    log_every: int = 50

    def __post_init__(self):
        if self.iters_per_scale < 0:
            raise ParameterError(f"iters_per_scale must be >= 0, got {self.iters_per_scale}")
        if self.width < 1:
            raise ParameterError(f"width must be >= 1, got {self.width}")
        if self.lr <= 0:
            raise ParameterError(f"learning rate must be > 0, got {self.lr}")
        if self.preset not in PRESETS:
            raise ParameterError(f"unknown preset {self.preset!r}; choose from {PRESETS}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["corruption"] = {
            "scheme": self.corruption.scheme.value,
            "intensity": self.corruption.intensity,
            "patch_count": self.corruption.patch_count,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ParameterError(f"unknown config key {sorted(unknown)[0]!r}")
        if isinstance(d.get("corruption"), dict):
            d["corruption"] = CorruptionSpec(**d["corruption"])
        return cls(**d)


def apply_preset(cfg: TrainConfig, preset: str) -> TrainConfig:
    """Task presets: photo-realistic style transfer and super-resolution."""
    preset = PRESET_ALIASES.get(preset, preset)
    if preset == "default":
        return dataclasses.replace(cfg, preset="default")
    if preset == "photo_style":
        return dataclasses.replace(cfg, preset=preset, num_scales=2, r_target=1.0)
    if preset == "super_resolution":
        return dataclasses.replace(
            cfg, preset=preset, num_scales=2, r_target=2.0, width=256,
            iters_per_scale=1000, lr=1e-3, antialias_downsample=True,
        )
    raise ParameterError(f"unknown preset {preset!r}; choose from {PRESETS}")


@dataclass
class ModelCheckpoint:
    nets: list  # coarse -> fine: nets[0] is F_N
    dims: list  # (h, w) per level, coarse -> fine
    effective_r: float
    config: TrainConfig
    version: int = 1
    history: list = field(default_factory=list, compare=False, repr=False)

    @property
    def num_scales(self) -> int:
        return len(self.nets)

    @property
    def coarsest(self) -> int:
        return len(self.nets) - 1

    def net(self, n: int) -> RefineNet:
        return self.nets[self.coarsest - n]

    def level_dims(self, n: int) -> tuple:
        return tuple(self.dims[self.coarsest - n])


def make_pyramid(img, cfg: TrainConfig) -> ScalePyramid:
    return build_pyramid(
        img, cfg.max_dim, cfg.min_dim, cfg.r_target,
        antialias=cfg.antialias_downsample, num_scales=cfg.num_scales,
    )


def _with_context(exc: SinirError, where: str) -> SinirError:
    new = type(exc)(f"{where}: {exc}")
    new.__cause__ = exc
    return new


def train(img, cfg: TrainConfig, callback=None) -> ModelCheckpoint:
    """Train one network per level, coarsest first, freezing each when done.

    ``callback``, if given, is called with ``(n, nets_so_far)`` after each
    level finishes.
    """
    img = as_image(img, channels=3)
    pyr = make_pyramid(img, cfg)
    N, r = pyr.coarsest, pyr.effective_r
    root = Rng(cfg.seed)
    init_rng, noise_rng = root.spawn(0), root.spawn(1)
    nets, history = [], []
    log.info("training %d scales, r=%.6f, dims %s", pyr.num_scales, r, pyr.dims)

    prev_out = None
    for n in range(N, -1, -1):
        target = pyr.level(n)
        inp = target if n == N else upsample_by_r(prev_out, r, pyr.level_dims(n))
        net = net_init(cfg.width, init_rng)
        if cfg.warm_start and nets:
            net = nets[-1].copy()
        state = AdamState(lr=cfg.lr)
        params = net.named_parameters()
        losses = []
        it = -1
        try:
            for it in range(cfg.iters_per_scale):
                x = corrupt(inp, cfg.corruption, noise_rng)
                tape = GradientTape()
                y = net_forward(x, net, tape)
                loss, g = rec_loss_and_grad(y, target, cfg.ssim_weight)
                _, grads = net_backward(g, tape, net)
                adam_step(params, grads, state)
                losses.append(loss)
                if cfg.log_every and (it + 1) % cfg.log_every == 0:
                    log.info("scale %d iter %d loss %.6f", n, it + 1, loss)
            prev_out = net_forward(inp, net)
        except SinirError as exc:
            raise _with_context(exc, f"scale {n}, iteration {it + 1}") from exc
        nets.append(net)
        history.append(losses)
        if callback is not None:
            callback(n, nets)

    return ModelCheckpoint(nets=nets, dims=[tuple(d) for d in pyr.dims], effective_r=r, config=cfg, history=history)


def cascade_outputs(ckpt: ModelCheckpoint, pyr: ScalePyramid) -> list:
    """Clean-input outputs X^_N ... X^_0 of the trained cascade."""
    outs = []
    y = None
    for n in range(ckpt.coarsest, -1, -1):
        inp = pyr.level(n) if y is None else upsample_by_r(y, ckpt.effective_r, pyr.level_dims(n))
        y = net_forward(inp, ckpt.net(n))
        outs.append(y)
    return outs


def reconstruction_report(ckpt: ModelCheckpoint, img) -> list:
    """Per-level reconstruction loss of the clean cascade, coarsest first."""
    pyr = make_pyramid(as_image(img, channels=3), ckpt.config)
    if [tuple(d) for d in pyr.dims] != [tuple(d) for d in ckpt.dims]:
        raise ShapeError(f"image pyramid dims {pyr.dims} do not match checkpoint dims {ckpt.dims}")
    outs = cascade_outputs(ckpt, pyr)
    return [rec_loss(y, pyr.level(ckpt.coarsest - i), ckpt.config.ssim_weight) for i, y in enumerate(outs)]
