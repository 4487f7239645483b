from .histogram import (
    BinLayout,
    HistogramBinning,
    bin_centers,
    histogram_backward,
    histogram_binning,
    histogram_forward,
    reference_histogram_backward,
)
from .kernels import (
    Affine,
    Concat,
    Conv1d,
    Dropout,
    FlattenConcat,
    MatMul,
    MaxPool1d,
    Relu,
    RowSlice,
    SoftmaxCrossEntropy,
    Stack,
    Tanh,
    Transpose,
    affine,
    concat,
    conv1d,
    dropout,
    flatten_concat,
    matmul,
    maxpool1d,
    relu_act,
    row_slice,
    softmax_cross_entropy,
    stack,
    tanh_act,
    transpose,
)
from .tape import Kernel, Tape, TapeNode, Var

__all__ = [
    "Affine",
    "BinLayout",
    "Concat",
    "Conv1d",
    "Dropout",
    "FlattenConcat",
    "HistogramBinning",
    "Kernel",
    "MatMul",
    "MaxPool1d",
    "Relu",
    "RowSlice",
    "SoftmaxCrossEntropy",
    "Stack",
    "Tanh",
    "Tape",
    "TapeNode",
    "Transpose",
    "Var",
    "affine",
    "bin_centers",
    "concat",
    "conv1d",
    "dropout",
    "flatten_concat",
    "histogram_backward",
    "histogram_binning",
    "histogram_forward",
    "matmul",
    "maxpool1d",
    "reference_histogram_backward",
    "relu_act",
    "row_slice",
    "softmax_cross_entropy",
    "stack",
    "tanh_act",
    "transpose",
]
