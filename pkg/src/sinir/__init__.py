"""Single-image internal learning with cascaded reconstruction networks.

A cascade of small fully-convolutional networks is trained on one image,
one network per pyramid level, each learning to refine the upsampled
output of the level below. The trained cascade is then reused to
manipulate other images (style transfer, paint-to-image, editing,
harmonization) and for super-resolution.
"""
from .corruption import CorruptionSpec, Scheme, corrupt
from .errors import DimensionError, FormatError, ParameterError, ShapeError, SinirError, StateError
from .inference import InferConfig, composite, manipulate, super_resolve
from .io import load_checkpoint, load_png, save_checkpoint, save_png
from .kernels import BACKEND
from .loss import mse, rec_loss, ssim
from .metrics import MetricReport, evaluate, trend_check
from .nn import RefineNet, net_forward, net_init
from .resample import ScalePyramid, bicubic_resize, build_pyramid, upsample_by_r
from .tensor import Rng, elementwise, tensor_new
from .trainer import ModelCheckpoint, TrainConfig, apply_preset, reconstruction_report, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CorruptionSpec", "DimensionError", "FormatError", "InferConfig", "MetricReport",
    "ModelCheckpoint", "ParameterError", "RefineNet", "Rng", "ScalePyramid", "Scheme", "ShapeError",
    "SinirError", "StateError", "TrainConfig", "apply_preset", "bicubic_resize", "build_pyramid",
    "composite", "corrupt", "elementwise", "evaluate", "load_checkpoint", "load_png", "manipulate",
    "mse", "net_forward", "net_init", "rec_loss", "reconstruction_report", "save_checkpoint",
    "save_png", "ssim", "super_resolve", "tensor_new", "train", "trend_check", "upsample_by_r",
]
