"""Lightweight gated recurrent cells with hoisted matrix work.

The package provides:

- :mod:`lrn.tensor`     dense matrix ops, activations, layer norm, seeded init
- :mod:`lrn.cells`      forward + exact analytic backward for the cell family
- :mod:`lrn.decompose`  closed-form hidden-state expansion and decay traces
- :mod:`lrn.analysis`   one-step Jacobians and gradient-norm profiles
- :mod:`lrn.gradcheck`  finite-difference oracles for the backward passes
- :mod:`lrn.training`   losses, Adam/SGD, clipping, desk-scale train driver
- :mod:`lrn.tasks`      synthetic long-range-dependency tasks and corpus
- :mod:`lrn.bench`      fused-vs-naive recurrence micro-benchmark
- :mod:`lrn.cli`        command-line front end (``lrn <subcommand>``)
"""

from .cells import (
    CELL_KINDS,
    CellParams,
    GradientSet,
    Projections,
    Trajectory,
    backward_sequence,
    forward_from_projections,
    forward_sequence,
    forward_sequence_naive,
    init_params,
    load_checkpoint,
    precompute_projections,
    save_checkpoint,
)
from .tensor import Rng, ShapeError

__all__ = [
    "CELL_KINDS",
    "CellParams",
    "GradientSet",
    "Projections",
    "Rng",
    "ShapeError",
    "Trajectory",
    "backward_sequence",
    "forward_from_projections",
    "forward_sequence",
    "forward_sequence_naive",
    "init_params",
    "load_checkpoint",
    "precompute_projections",
    "save_checkpoint",
]

__version__ = "0.1.0"
