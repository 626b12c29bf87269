"""Dense matrix/vector arithmetic, activations, layer norm and seeded init.

Conventions used across the package:

- everything is a plain ``numpy.ndarray`` in row-major order; a "row" such as
  a single hidden state is a 1-D ``(d,)`` array, a sequence is ``(n, d)`` and
  a batch of sequences is ``(batch, n, d)``
- float64 is the default dtype; float32 is only used by the benchmark
  harness (pass ``dtype`` explicitly where supported)
"""

from __future__ import annotations

import numpy as np

DEFAULT_DTYPE = np.float64


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ShapeError(msg)


# -----------------------------------------------------------------------------
# Elementwise / structural ops
# -----------------------------------------------------------------------------


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product a @ b with an explicit inner-dimension check."""
    _require(a.shape[-1] == b.shape[0], f"matmul: inner dims differ, {a.shape} x {b.shape}")
    return a @ b


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require(a.shape == b.shape, f"add: shape mismatch {a.shape} vs {b.shape}")
    return a + b


def sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require(a.shape == b.shape, f"sub: shape mismatch {a.shape} vs {b.shape}")
    return a - b


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product."""
    _require(a.shape == b.shape, f"hadamard: shape mismatch {a.shape} vs {b.shape}")
    return a * b


def scale(a: np.ndarray, s: float) -> np.ndarray:
    return a * s


def transpose(a: np.ndarray) -> np.ndarray:
    return a.T


def row(a: np.ndarray, t: int) -> np.ndarray:
    """Row t of a 2-D array as a (d,) vector."""
    _require(a.ndim == 2, f"row: expected 2-D array, got shape {a.shape}")
    return a[t]


# -----------------------------------------------------------------------------
# Activations
# -----------------------------------------------------------------------------

_FINFO = {np.dtype(np.float64): np.finfo(np.float64),
          np.dtype(np.float32): np.finfo(np.float32)}


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function, output strictly inside (0, 1)."""
    x = np.asarray(x)
    fi = _FINFO.get(x.dtype) or np.finfo(x.dtype if x.dtype.kind == "f" else DEFAULT_DTYPE)
    x = x.astype(fi.dtype, copy=False)
    with np.errstate(over="ignore"):  # exp overflow saturates, then clips
        out = 1.0 / (1.0 + np.exp(-x))
    return np.clip(out, fi.tiny, 1.0 - fi.epsneg)


def tanh(x: np.ndarray) -> np.ndarray:
    """Elementwise tanh, output strictly inside (-1, 1)."""
    out = np.tanh(x)
    fi = _FINFO.get(np.asarray(out).dtype) or np.finfo(np.asarray(out).dtype)
    lim = 1.0 - fi.epsneg
    return np.clip(out, -lim, lim)


def sigmoid_prime_from_value(s: np.ndarray) -> np.ndarray:
    """Derivative of sigmoid expressed through its output value: s * (1 - s)."""
    return s * (1.0 - s)


def tanh_prime_from_value(t: np.ndarray) -> np.ndarray:
    """Derivative of tanh expressed through its output value: 1 - t^2."""
    return 1.0 - t * t


# -----------------------------------------------------------------------------
# Layer normalization (row-wise over the last axis)
# -----------------------------------------------------------------------------


def layer_norm(x: np.ndarray, gain: np.ndarray, bias: np.ndarray,
               epsilon: float = 1e-6) -> np.ndarray:
    """Normalize each row to zero mean / unit variance, then scale and shift."""
    _require(x.shape[-1] == gain.shape[-1] == bias.shape[-1],
             f"layer_norm: width mismatch {x.shape} gain {gain.shape} bias {bias.shape}")
    if epsilon <= 0:
        raise ValueError("layer_norm: epsilon must be > 0")
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    xhat = (x - mu) / np.sqrt(var + epsilon)
    return xhat * gain + bias


def layer_norm_backward(d_out: np.ndarray, x: np.ndarray, gain: np.ndarray,
                        epsilon: float = 1e-6):
    """Gradients of layer_norm: returns (dx, dgain, dbias).

    dgain/dbias are reduced over all leading axes.
    """
    d = x.shape[-1]
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + epsilon)
    xhat = (x - mu) * inv
    dxhat = d_out * gain
    # dx = inv * (dxhat - mean(dxhat) - xhat * mean(dxhat * xhat))
    dx = inv * (dxhat
                - dxhat.mean(axis=-1, keepdims=True)
                - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True) / d)
    red = tuple(range(d_out.ndim - 1))
    dgain = (d_out * xhat).sum(axis=red)
    dbias = d_out.sum(axis=red)
    return dx, dgain, dbias


# -----------------------------------------------------------------------------
# Seeded randomness and initialization
# -----------------------------------------------------------------------------


class Rng:
    """Seeded random stream (numpy PCG64).

    PCG64 is a fixed, fully documented generator whose output stream numpy
    guarantees to be stable across platforms and releases, so any seed
    reproduces bit-identical draws everywhere.  Derived streams are produced
    with ``spawn_key`` so (seed, key) pairs are independent and reproducible.
    """

    def __init__(self, seed: int, *spawn_key: int):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        self.gen = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)))

    def derive(self, *key: int) -> "Rng":
        """Independent stream addressed by (seed, *existing key, *key)."""
        return Rng(self.seed, *(self.spawn_key + tuple(int(k) for k in key)))

    def uniform(self, low: float, high: float, shape, dtype=DEFAULT_DTYPE) -> np.ndarray:
        return self.gen.uniform(low, high, size=shape).astype(dtype, copy=False)

    def normal(self, shape, dtype=DEFAULT_DTYPE) -> np.ndarray:
        return self.gen.standard_normal(size=shape).astype(dtype, copy=False)

    def integers(self, low: int, high: int, shape=None) -> np.ndarray:
        """Uniform integers in [low, high)."""
        return self.gen.integers(low, high, size=shape)


def zeros(rows: int, cols: int, dtype=DEFAULT_DTYPE) -> np.ndarray:
    return np.zeros((rows, cols), dtype=dtype)


def glorot_uniform(rows: int, cols: int, rng: Rng, dtype=DEFAULT_DTYPE) -> np.ndarray:
    """Uniform init in +-sqrt(6 / (rows + cols))."""
    if rows < 1 or cols < 1:
        raise ValueError(f"glorot_uniform: rows/cols must be >= 1, got {rows}x{cols}")
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, (rows, cols), dtype=dtype)


def orthogonal(n: int, rng: Rng, dtype=DEFAULT_DTYPE) -> np.ndarray:
    """Random n x n orthogonal matrix (QR of a Gaussian, sign-fixed)."""
    q, r = np.linalg.qr(rng.normal((n, n)))
    q = q * np.sign(np.diag(r))
    return q.astype(dtype, copy=False)
