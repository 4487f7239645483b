from .checkpoint import load_checkpoint, save_checkpoint
from .graphhist import ForwardResult, GraphHistNetwork
from .params import HEAD_PREFIXES, ModelParams, init_params, parameter_layout

__all__ = [
    "HEAD_PREFIXES",
    "ForwardResult",
    "GraphHistNetwork",
    "ModelParams",
    "init_params",
    "load_checkpoint",
    "parameter_layout",
    "save_checkpoint",
]
