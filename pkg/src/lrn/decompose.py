"""Closed-form expansion of gated hidden states and memory-decay traces.

With the identity activation and a zero initial state, the recurrence
``h_t = i_t * v_t + f_t * h_{t-1}`` unrolls into

    h_t = sum_k  i_k * (f_{k+1} * ... * f_t) * v_k        (0-based k <= t)

so every value row v_k reaches step t weighted by its input gate at entry
time (the "key") times the forget chain accumulated since (the "query").
These per-channel weights are unidirectional and unnormalized; nothing here
applies a softmax.

Positions are 0-based throughout, including the CSV export.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import Trajectory

_GATED_KINDS = ("lrn", "olrn", "glrn", "elrn")
_EXPANDABLE_KINDS = ("lrn", "glrn", "elrn")


class DecompositionError(ValueError):
    """Trajectory does not satisfy the exact-expansion preconditions."""


@dataclass
class WeightChain:
    """Weight carried from source step k to evaluation step t."""

    t: int
    k: int
    key: np.ndarray    # input gate i_k
    query: np.ndarray  # prod of forget gates f_{k+1} .. f_t
    w: np.ndarray      # key * query, per channel


@dataclass
class DecayCurve:
    """Channel-mean chain weight of source k at every t >= k."""

    k: int
    positions: np.ndarray  # t = k .. n-1
    values: np.ndarray


def _check_single_sequence(traj: Trajectory) -> None:
    if traj.H.ndim != 2:
        raise DecompositionError("decomposition expects a single (unbatched) trajectory")


def _check_gated(traj: Trajectory) -> None:
    _check_single_sequence(traj)
    if traj.kind not in _GATED_KINDS:
        raise DecompositionError(f"{traj.kind} trajectories carry no input/forget gates")


def _check_expandable(traj: Trajectory) -> None:
    _check_single_sequence(traj)
    if traj.kind not in _EXPANDABLE_KINDS:
        raise DecompositionError(f"hidden-state expansion is not exact for {traj.kind}")
    if traj.activation != "identity":
        raise DecompositionError(
            f"expansion is exact only for the identity activation, got {traj.activation!r}")
    if traj.n > 0 and np.any(traj.h0 != 0.0):
        raise DecompositionError("expansion is exact only for a zero initial state")


def _forget_suffix_products(traj: Trajectory, t: int) -> np.ndarray:
    """P[k] = f_{k+1} * ... * f_t for k = 0..t (P[t] = ones)."""
    d = traj.d
    P = np.empty((t + 1, d), dtype=traj.F.dtype)
    P[t] = 1.0
    for k in range(t - 1, -1, -1):
        P[k] = P[k + 1] * traj.F[k + 1]
    return P


def attention_weights(traj: Trajectory, t: int) -> list[WeightChain]:
    """Key/query/value-style chain weights for every source k <= t."""
    _check_expandable(traj)
    if not 0 <= t < traj.n:
        raise IndexError(f"step {t} out of range for length {traj.n}")
    P = _forget_suffix_products(traj, t)
    return [WeightChain(t=t, k=k, key=traj.I[k].copy(), query=P[k],
                        w=traj.I[k] * P[k]) for k in range(t + 1)]


def expand_hidden(traj: Trajectory, t: int) -> np.ndarray:
    """Reconstruct h_t as the chain-weighted sum of value rows."""
    chains = attention_weights(traj, t)
    V = traj.proj.V
    out = np.zeros(traj.d, dtype=traj.H.dtype)
    for chain in chains:
        out += chain.w * V[chain.k]
    return out


def weight_chain(traj: Trajectory, t: int, k: int) -> WeightChain:
    """Single lazily computed chain weight, valid for any activation."""
    _check_gated(traj)
    if not 0 <= k <= t < traj.n:
        raise IndexError(f"need 0 <= k <= t < n, got k={k}, t={t}, n={traj.n}")
    query = np.ones(traj.d, dtype=traj.F.dtype)
    for l in range(k + 1, t + 1):
        query = query * traj.F[l]
    return WeightChain(t=t, k=k, key=traj.I[k].copy(), query=query,
                       w=traj.I[k] * query)


def memory_trace(traj: Trajectory, k: int) -> DecayCurve:
    """Channel-mean chain weight of source k for t = k..n-1 (any activation)."""
    _check_gated(traj)
    if not 0 <= k < traj.n:
        raise IndexError(f"source position {k} out of range for length {traj.n}")
    w = traj.I[k].copy()
    values = [float(w.mean())]
    for t in range(k + 1, traj.n):
        w *= traj.F[t]
        values.append(float(w.mean()))
    return DecayCurve(k=k, positions=np.arange(k, traj.n), values=np.asarray(values))


def trace_rows(traj: Trajectory, tokens: list[str] | None = None):
    """Yield (source_pos, token, eval_pos, weight_mean) for every k <= t pair."""
    _check_gated(traj)
    for k in range(traj.n):
        curve = memory_trace(traj, k)
        token = tokens[k] if tokens is not None else str(k)
        for t, value in zip(curve.positions, curve.values):
            yield k, token, int(t), value


def write_trace_csv(traj: Trajectory, fh, tokens: list[str] | None = None) -> None:
    """Dense trace dump: header plus one row per (source, eval) pair."""
    fh.write("source_pos,token,eval_pos,weight_mean\n")
    for k, token, t, value in trace_rows(traj, tokens):
        fh.write(f"{k},{token},{t},{value:.9g}\n")
