"""Micro-benchmark for the hoisted-vs-in-loop recurrence trade.

``fused`` precomputes every parameterized matrix product for the whole batch
before entering the recurrence, leaving only elementwise work in the loop;
``naive`` performs the products step by step inside the loop.  Both modes
compute the same function, and a 64-bit equivalence gate asserts that before
any timing happens.

The vanilla cell has no fully fused mode: its input product hoists but
``h @ U`` is intrinsically sequential, which is exactly why its layer-norm
variant must also run inside the loop while the gated cells normalize their
projections in one vectorized pass outside it.
"""

from __future__ import annotations

import platform
import time
from dataclasses import dataclass, field

import numpy as np

from .cells import (
    CellParams,
    backward_sequence,
    elrn_step,
    forward_from_projections,
    forward_sequence,
    forward_sequence_naive,
    glrn_step,
    init_params,
    lrn_step,
    olrn_step,
    precompute_projections,
)
from .tensor import Rng, layer_norm

GATE_TOL = 1e-12


class EquivalenceError(RuntimeError):
    """Fused and naive forwards disagreed; no timings are reported."""


@dataclass
class LayerNormParams:
    """One (gain, bias) pair per normalized stream.

    The default normalizes one stream per cell: Elman's pre-activation and,
    symmetrically, the value projection of the gated cells (the content
    stream that drives the state magnitude; gate pre-activations feed a
    bounded sigmoid and are left raw).  ``streams="all"`` normalizes every
    projection instead.
    """

    gains: dict[str, np.ndarray]
    biases: dict[str, np.ndarray]

    @staticmethod
    def for_cell(kind: str, d: int, dtype, streams: str = "content") -> "LayerNormParams":
        if kind == "elman":
            names = ("a",)
        elif streams == "content":
            names = ("V",)
        else:
            names = {"lrn": ("Q", "K", "V"), "olrn": ("Q", "K", "V", "O_pre"),
                     "glrn": ("Q", "V"), "elrn": ("V",)}[kind]
        return LayerNormParams({s: np.ones(d, dtype=dtype) for s in names},
                               {s: np.zeros(d, dtype=dtype) for s in names})


def _gated_forward(params: CellParams, X: np.ndarray, ln: LayerNormParams | None,
                   fused: bool) -> np.ndarray:
    """Final-state matrix of a gated-cell forward in the requested mode."""
    if fused:
        proj = precompute_projections(X, params)
        if ln is not None:
            for s in ln.gains:
                arr = getattr(proj, s)
                setattr(proj, s, layer_norm(arr, ln.gains[s], ln.biases[s]))
        return forward_from_projections(params, X, proj).H
    if ln is None:
        return forward_sequence_naive(params, X).H
    # naive + LN: project and normalize row by row inside the loop
    n, d = X.shape[-2], params.d
    h = np.zeros(X.shape[:-2] + (d,), dtype=X.dtype)
    H = np.empty(X.shape[:-2] + (n, d), dtype=X.dtype)

    def proj_row(x_t, W, b, stream):
        r = x_t @ W + b
        if stream in ln.gains:
            r = layer_norm(r, ln.gains[stream], ln.biases[stream])
        return r

    for t in range(n):
        x_t = X[..., t, :]
        v_t = proj_row(x_t, params.W_v, params.b_v, "V")
        if params.kind == "lrn":
            h, _ = lrn_step(proj_row(x_t, params.W_q, params.b_q, "Q"),
                            proj_row(x_t, params.W_k, params.b_k, "K"),
                            v_t, h, params.activation)
        elif params.kind == "olrn":
            h, _ = olrn_step(proj_row(x_t, params.W_q, params.b_q, "Q"),
                             proj_row(x_t, params.W_k, params.b_k, "K"),
                             v_t, proj_row(x_t, params.W_o, params.b_o, "O_pre"), h)
        elif params.kind == "glrn":
            h, _ = glrn_step(proj_row(x_t, params.W_q, params.b_q, "Q"), v_t, h,
                             params.activation)
        else:
            h, _ = elrn_step(v_t, h, params.activation)
        H[..., t, :] = h
    return H


def _elman_forward(params: CellParams, X: np.ndarray, ln: LayerNormParams | None,
                   hoisted: bool) -> np.ndarray:
    """Elman forward; layer norm (when on) must run inside the loop."""
    n, d = X.shape[-2], params.d
    h = np.zeros(X.shape[:-2] + (d,), dtype=X.dtype)
    H = np.empty(X.shape[:-2] + (n, d), dtype=X.dtype)
    xw = (X @ params.W + params.b) if hoisted else None
    for t in range(n):
        a = (xw[..., t, :] if hoisted else X[..., t, :] @ params.W + params.b) + h @ params.U
        if ln is not None:
            a = layer_norm(a, ln.gains["a"], ln.biases["a"])
        h = np.tanh(a) if params.activation == "tanh" else a
        H[..., t, :] = h
    return H


def _run_forward(params: CellParams, X: np.ndarray, ln: LayerNormParams | None,
                 mode: str) -> np.ndarray:
    if params.kind == "elman":
        return _elman_forward(params, X, ln, hoisted=(mode == "fused"))
    return _gated_forward(params, X, ln, fused=(mode == "fused"))


def _run_forward_backward(params: CellParams, X: np.ndarray, mode: str) -> None:
    traj = (forward_sequence if mode == "fused" else forward_sequence_naive)(params, X)
    backward_sequence(params, traj, np.ones_like(traj.H))


@dataclass
class BenchReport:
    kind: str
    mode: str
    d: int
    n: int
    batch: int
    precision: str
    with_layer_norm: bool
    include_backward: bool
    repeats: int
    warmups: int
    times: list[float]
    median_time: float
    steps_per_second: float
    equivalence_max_delta: float
    notes: list[str] = field(default_factory=list)
    env: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return dict(self.__dict__)


def bench(kind: str = "lrn", mode: str = "fused", d: int = 512, n: int = 256,
          batch: int = 32, repeats: int = 5, warmups: int = 2,
          with_layer_norm: bool = False, include_backward: bool = False,
          precision: str = "f32", seed: int = 0) -> BenchReport:
    """Time one cell/mode configuration; median of individually kept repeats.

    The 64-bit fused-vs-naive gate always runs first and aborts the
    benchmark on mismatch.  Timing defaults to 32-bit, the realistic kernel
    workload; pass precision="f64" for double.  Backward timing is available
    without layer norm only.
    """
    if mode not in ("fused", "naive"):
        raise ValueError(f"unknown mode {mode!r}")
    if precision not in ("f32", "f64"):
        raise ValueError(f"unknown precision {precision!r}")
    if repeats < 5:
        raise ValueError("need at least 5 repeats for a stable median")
    if include_backward and with_layer_norm:
        raise ValueError("backward timing with layer norm is not supported")

    rng = Rng(seed)
    activation = "identity" if kind == "olrn" else "tanh"
    params64 = init_params(kind, d, d, rng, activation=activation)
    X64 = rng.uniform(-1.0, 1.0, (batch, n, d))
    ln64 = LayerNormParams.for_cell(kind, d, np.float64) if with_layer_norm else None

    # numeric-equivalence gate, always in 64-bit
    H_fused = _run_forward(params64, X64, ln64, "fused")
    H_naive = _run_forward(params64, X64, ln64, "naive")
    delta = float(np.max(np.abs(H_fused - H_naive))) if H_fused.size else 0.0
    if delta > GATE_TOL:
        raise EquivalenceError(f"fused vs naive forward differ by {delta:.3e} > {GATE_TOL}")
    del H_fused, H_naive

    dtype = np.float32 if precision == "f32" else np.float64
    params = params64.astype(dtype)
    X = X64.astype(dtype)
    ln = LayerNormParams.for_cell(kind, d, dtype) if with_layer_norm else None
    del params64, X64

    def payload():
        if include_backward:
            _run_forward_backward(params, X, mode)
        else:
            _run_forward(params, X, ln, mode)

    for _ in range(warmups):
        payload()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        payload()
        times.append(time.perf_counter() - t0)

    median_time = float(np.median(times))
    notes = []
    if kind == "elman":
        notes.append("partial fusion only: h @ U stays inside the loop by definition")
    report = BenchReport(
        kind=kind, mode=mode, d=d, n=n, batch=batch, precision=precision,
        with_layer_norm=with_layer_norm, include_backward=include_backward,
        repeats=repeats, warmups=warmups, times=times, median_time=median_time,
        steps_per_second=float(np.median([n * batch / t for t in times])),
        equivalence_max_delta=delta, notes=notes,
        env={"platform": platform.platform(), "python": platform.python_version(),
             "numpy": np.__version__, "machine": platform.machine()},
    )
    return report
