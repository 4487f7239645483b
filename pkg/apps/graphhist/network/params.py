from __future__ import annotations

from typing import Dict, Iterator, List, Tuple

import numpy as np

from graphhist.models import ModelConfig

# Parameters downstream of the histogram
HEAD_PREFIXES = ("lenet.", "fc1.", "out.")


def parameter_layout(config: ModelConfig) -> Dict[str, Tuple[Tuple[int, ...], int]]:
    """
    Name -> (shape, fan_in) for every trainable tensor, in initialisation order.
    """
    c = config.channels
    layout: Dict[str, Tuple[Tuple[int, ...], int]] = {}

    def dense(name: str, fan_in: int, fan_out: int):
        layout[f"{name}.weight"] = ((fan_in, fan_out), fan_in)
        layout[f"{name}.bias"] = ((fan_out,), fan_in)

    def conv(name: str, c_out: int, c_in: int, f: int):
        layout[f"{name}.weight"] = ((c_out, c_in, f), c_in * f)
        layout[f"{name}.bias"] = ((c_out,), c_in * f)

    for s in range(config.h + 1):
        dense(f"gcn.{s}", config.num_features, config.u)
    dense("comb1", c, c)
    dense("comb2", c, c)
    for f in config.filter_sizes:
        conv(f"lenet.f{f}.conv1", config.conv1_channels, c, f)
        conv(f"lenet.f{f}.conv2", config.conv2_channels, config.conv1_channels, f)
    conv("lenet.span", config.span_channels, c, config.k)
    dense("fc1", config.flat_dim, config.hidden_units)
    dense("out", config.hidden_units, config.num_classes)
    return layout


class ModelParams:
    """Named trainable tensors of a Graph-Hist network."""

    def __init__(self, tensors: Dict[str, np.ndarray]):
        self.tensors = dict(tensors)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        if name not in self.tensors:
            raise KeyError(f"unknown parameter {name!r}")
        self.tensors[name] = value

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def __len__(self) -> int:
        return len(self.tensors)

    def items(self):
        return self.tensors.items()

    def names(self) -> List[str]:
        return list(self.tensors)

    def head_names(self) -> List[str]:
        return [name for name in self.tensors if name.startswith(HEAD_PREFIXES)]

    def copy(self) -> "ModelParams":
        return ModelParams({name: value.copy() for name, value in self.tensors.items()})

    def size(self) -> int:
        return int(sum(value.size for value in self.tensors.values()))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(value)) for value in self.tensors.values())

    def check_shapes(self, config: ModelConfig) -> List[str]:
        """Names whose shape disagrees with ``config`` (missing or extra included)."""
        expected = {name: shape for name, (shape, _) in parameter_layout(config).items()}
        problems = sorted(set(expected) ^ set(self.tensors))
        for name, shape in expected.items():
            if name in self.tensors and self.tensors[name].shape != shape:
                problems.append(name)
        return problems


def init_params(config: ModelConfig, seed: int) -> ModelParams:
    """
    Draw weights from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases start at zero.

    Tensors are drawn in the fixed order of ``parameter_layout``.
    """
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, (shape, fan_in) in parameter_layout(config).items():
        if name.endswith(".bias"):
            tensors[name] = np.zeros(shape)
        else:
            bound = 1.0 / np.sqrt(fan_in)
            tensors[name] = rng.uniform(-bound, bound, size=shape)
    return ModelParams(tensors)
