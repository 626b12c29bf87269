"""Finite-difference verification of the analytic backward passes.

The checks here only ever call the forward path, so they stay independent of
the hand-derived gradients they are used to validate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import CellParams, backward_sequence, forward_sequence, init_params
from .tensor import Rng


def sequence_loss(params: CellParams, X: np.ndarray, dH: np.ndarray, h0=None) -> float:
    """Scalar probe loss sum(dH * H): its state gradients are exactly dH."""
    traj = forward_sequence(params, X, h0)
    return float(np.sum(dH * traj.H))


def _fd_entries(arr: np.ndarray, reval, delta: float) -> np.ndarray:
    """Central differences of reval() w.r.t. every entry of arr (in place)."""
    g = np.zeros_like(arr)
    flat, gf = arr.ravel(), g.ravel()
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + delta
        lp = reval()
        flat[idx] = orig - delta
        lm = reval()
        flat[idx] = orig
        gf[idx] = (lp - lm) / (2.0 * delta)
    return g


def fd_gradients(params: CellParams, X: np.ndarray, dH: np.ndarray,
                 delta: float = 1e-5, h0=None) -> dict[str, np.ndarray]:
    """All parameter and input gradients of sequence_loss by central differences."""
    reval = lambda: sequence_loss(params, X, dH, h0)
    out = {name: _fd_entries(arr, reval, delta) for name, arr in params.items()}
    out["dX"] = _fd_entries(X, reval, delta)
    return out


def relative_errors(analytic, fd: dict[str, np.ndarray], floor: float = 1e-3) -> dict[str, float]:
    """Per-array max of |a - fd| / max(|a|, |fd|, floor).

    The floor turns the comparison absolute for entries whose gradients are
    tiny, where central differences are dominated by roundoff.
    """
    errs = {}
    for name, fd_arr in fd.items():
        a = analytic.dX if name == "dX" else getattr(analytic, name)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(fd_arr)), floor)
        errs[name] = float(np.max(np.abs(a - fd_arr) / denom)) if a.size else 0.0
    return errs


@dataclass
class GradCheckResult:
    kind: str
    activation: str
    max_error: float
    per_array: dict[str, float]


def gradcheck_cell(kind: str, d_in: int, d: int, n: int, seed: int,
                   activation: str = "tanh", delta: float = 1e-5,
                   floor: float = 1e-3) -> GradCheckResult:
    """Compare backward_sequence against central finite differences."""
    rng = Rng(seed)
    params = init_params(kind, d_in, d, rng, activation=activation)
    X = rng.uniform(-1.0, 1.0, (n, d_in))
    dH = rng.uniform(-1.0, 1.0, (n, d))
    traj = forward_sequence(params, X)
    analytic = backward_sequence(params, traj, dH)
    fd = fd_gradients(params, X, dH, delta=delta)
    errs = relative_errors(analytic, fd, floor=floor)
    return GradCheckResult(kind, params.activation, max(errs.values()), errs)


def fd_jacobian(fn, h_prev: np.ndarray, delta: float = 1e-5) -> np.ndarray:
    """J[a, b] = d fn(h)[a] / d h[b] by central differences; fn maps (d,) -> (d,)."""
    d = h_prev.shape[0]
    J = np.zeros((d, d))
    for b in range(d):
        hp = h_prev.copy()
        hp[b] += delta
        up = fn(hp)
        hp[b] -= 2.0 * delta
        um = fn(hp)
        J[:, b] = (up - um) / (2.0 * delta)
    return J
