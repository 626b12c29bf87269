"""Gated recurrent cells whose in-loop work is purely elementwise.

Five cell kinds are implemented:

- ``lrn``:   twin input/forget gates driven by the raw previous state,
  ``i = sigmoid(k_t + h_prev)``, ``f = sigmoid(q_t - h_prev)``,
  ``h = g(i * v_t + f * h_prev)``
- ``olrn``:  same gates plus an output gate on the cell value,
  ``c = i * v_t + f * h_prev``, ``o = sigmoid(o_pre_t - c)``, ``h = o * c``
  (no outer activation)
- ``glrn``:  complementary gates, ``f = sigmoid(q_t - h_prev)``, ``i = 1 - f``
- ``elrn``:  state-only gate, ``f = sigmoid(-h_prev)``, ``i = 1 - f``
- ``elman``: vanilla recurrence ``h = g(x_t @ W + h_prev @ U + b)``

For the first four kinds every parameterized product is hoisted out of the
recurrence: ``precompute_projections`` maps the whole input sequence to
per-step q/k/v rows in one shot, and the recurrence itself touches no weight
matrix.  ``forward_sequence_naive`` keeps the products inside the loop and
must produce identical results; the benchmark harness times the two against
each other.

All functions accept an optional leading batch axis: ``X`` may be
``(n, d_in)`` or ``(batch, n, d_in)``; states follow with shapes ``(d,)`` or
``(batch, d)``.  Backward reduces parameter gradients over batch lanes in a
fixed order.  Sequence indices are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .tensor import (
    DEFAULT_DTYPE,
    Rng,
    ShapeError,
    glorot_uniform,
    sigmoid,
    sigmoid_prime_from_value,
    tanh,
    tanh_prime_from_value,
)

CELL_KINDS = ("lrn", "olrn", "glrn", "elrn", "elman")
ACTIVATIONS = ("tanh", "identity")

# weight/bias fields carried by each cell kind
PARAM_FIELDS = {
    "lrn": ("W_q", "W_k", "W_v", "b_q", "b_k", "b_v"),
    "olrn": ("W_q", "W_k", "W_v", "W_o", "b_q", "b_k", "b_v", "b_o"),
    "glrn": ("W_q", "W_v", "b_q", "b_v"),
    "elrn": ("W_v", "b_v"),
    "elman": ("W", "U", "b"),
}


def _apply_g(u: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return tanh(u)
    if activation == "identity":
        return u
    raise ValueError(f"unknown activation {activation!r}")


def _g_prime_from_h(h: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return tanh_prime_from_value(h)
    return np.ones_like(h)


# -----------------------------------------------------------------------------
# Parameters
# -----------------------------------------------------------------------------


@dataclass
class CellParams:
    """Weight set for one cell; absent matrices are None, not zero."""

    kind: str
    activation: str
    d_in: int
    d: int
    W_q: Optional[np.ndarray] = None
    W_k: Optional[np.ndarray] = None
    W_v: Optional[np.ndarray] = None
    W_o: Optional[np.ndarray] = None
    b_q: Optional[np.ndarray] = None
    b_k: Optional[np.ndarray] = None
    b_v: Optional[np.ndarray] = None
    b_o: Optional[np.ndarray] = None
    W: Optional[np.ndarray] = None
    U: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in CELL_KINDS:
            raise ValueError(f"unknown cell kind {self.kind!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.kind == "olrn" and self.activation != "identity":
            raise ValueError("olrn applies no outer activation; use activation='identity'")
        for name in PARAM_FIELDS[self.kind]:
            arr = getattr(self, name)
            if arr is None:
                raise ValueError(f"{self.kind} cell requires parameter {name}")
            want = self._expected_shape(name)
            if arr.shape != want:
                raise ShapeError(f"{name}: expected shape {want}, got {arr.shape}")
        for name in set(f for fields in PARAM_FIELDS.values() for f in fields):
            if name not in PARAM_FIELDS[self.kind] and getattr(self, name) is not None:
                raise ValueError(f"{self.kind} cell must not carry parameter {name}")

    def _expected_shape(self, name: str):
        if name == "U":
            return (self.d, self.d)
        if name.startswith("W"):
            return (self.d_in, self.d)
        return (self.d,)

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        """Present (name, array) pairs in a fixed order."""
        for name in PARAM_FIELDS[self.kind]:
            yield name, getattr(self, name)

    def copy(self) -> "CellParams":
        kw = {name: arr.copy() for name, arr in self.items()}
        return CellParams(self.kind, self.activation, self.d_in, self.d, **kw)

    def astype(self, dtype) -> "CellParams":
        kw = {name: arr.astype(dtype) for name, arr in self.items()}
        return CellParams(self.kind, self.activation, self.d_in, self.d, **kw)


def init_params(kind: str, d_in: int, d: int, rng: Rng, activation: str = "tanh",
                dtype=DEFAULT_DTYPE) -> CellParams:
    """Glorot-uniform weights, zero biases.

    olrn applies no outer activation; its ``activation`` field is stored as
    "identity" regardless of the argument.
    """
    if kind == "elman":
        kw = {
            "W": glorot_uniform(d_in, d, rng, dtype=dtype),
            "U": glorot_uniform(d, d, rng, dtype=dtype),
            "b": np.zeros(d, dtype=dtype),
        }
    else:
        kw = {}
        for name in PARAM_FIELDS[kind]:
            if name.startswith("W"):
                kw[name] = glorot_uniform(d_in, d, rng, dtype=dtype)
            else:
                kw[name] = np.zeros(d, dtype=dtype)
    if kind == "olrn":
        activation = "identity"
    return CellParams(kind, activation, d_in, d, **kw)


# -----------------------------------------------------------------------------
# Step functions
# -----------------------------------------------------------------------------


@dataclass
class StepCache:
    """Everything a single step produced, enough to replay it backward."""

    kind: str
    activation: str
    h_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    u: np.ndarray  # pre-activation i*v + f*h_prev (the cell value c for olrn)
    h: np.ndarray
    v: Optional[np.ndarray] = None
    o: Optional[np.ndarray] = None      # olrn output gate
    o_pre: Optional[np.ndarray] = None  # olrn projected gate input
    x: Optional[np.ndarray] = None      # elman input row
    a: Optional[np.ndarray] = None      # elman pre-activation


def lrn_step(q_t, k_t, v_t, h_prev, activation: str = "tanh"):
    """One twin-gate step; returns (h_t, cache)."""
    i = sigmoid(k_t + h_prev)
    f = sigmoid(q_t - h_prev)
    u = i * v_t + f * h_prev
    h = _apply_g(u, activation)
    return h, StepCache("lrn", activation, h_prev, i, f, u, h, v=v_t)


def olrn_step(q_t, k_t, v_t, o_pre_t, h_prev):
    """Output-gated step: h = sigmoid(o_pre - c) * c, c = i*v + f*h_prev."""
    i = sigmoid(k_t + h_prev)
    f = sigmoid(q_t - h_prev)
    c = i * v_t + f * h_prev
    o = sigmoid(o_pre_t - c)
    h = o * c
    return h, StepCache("olrn", "identity", h_prev, i, f, c, h, v=v_t, o=o, o_pre=o_pre_t)


def glrn_step(q_t, v_t, h_prev, activation: str = "tanh"):
    """Complementary-gate step: i = 1 - f."""
    f = sigmoid(q_t - h_prev)
    i = 1.0 - f
    u = i * v_t + f * h_prev
    h = _apply_g(u, activation)
    return h, StepCache("glrn", activation, h_prev, i, f, u, h, v=v_t)


def elrn_step(v_t, h_prev, activation: str = "tanh"):
    """Gate from the previous state alone: f = sigmoid(-h_prev), i = 1 - f."""
    f = sigmoid(-h_prev)
    i = 1.0 - f
    u = i * v_t + f * h_prev
    h = _apply_g(u, activation)
    return h, StepCache("elrn", activation, h_prev, i, f, u, h, v=v_t)


def elman_step(x_t, h_prev, params: CellParams, activation: str = "tanh"):
    """Vanilla recurrence h = g(x W + h_prev U + b); U stays inside the loop."""
    if x_t.shape[-1] != params.d_in:
        raise ShapeError(f"elman_step: input width {x_t.shape[-1]} != d_in {params.d_in}")
    a = x_t @ params.W + h_prev @ params.U + params.b
    h = _apply_g(a, activation)
    zeros = np.zeros_like(h)
    return h, StepCache("elman", activation, h_prev, zeros, zeros, a, h, x=x_t, a=a)


# -----------------------------------------------------------------------------
# Sequence forward
# -----------------------------------------------------------------------------


@dataclass
class Projections:
    """Per-step q/k/v rows for a whole sequence, computed outside the loop."""

    n: int
    Q: Optional[np.ndarray] = None
    K: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None
    O_pre: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    """Complete forward record, sufficient for exact backward replay."""

    kind: str
    activation: str
    h0: np.ndarray
    X: np.ndarray
    proj: Projections
    H: np.ndarray            # (..., n, d) hidden states h_1..h_n
    I: np.ndarray            # input gates (zeros for elman)
    F: np.ndarray            # forget gates (zeros for elman)
    U_pre: np.ndarray        # pre-activation (cell value c for olrn, a for elman)
    O: Optional[np.ndarray] = None   # olrn output gates
    C: Optional[np.ndarray] = None   # olrn cell values (alias of U_pre content)

    @property
    def n(self) -> int:
        return self.H.shape[-2]

    @property
    def d(self) -> int:
        return self.H.shape[-1]

    def final_h(self) -> np.ndarray:
        return self.H[..., -1, :] if self.n > 0 else self.h0

    def h_before(self, t: int) -> np.ndarray:
        """State entering step t, i.e. h_{t-1} with h_{-1} := h0."""
        return self.h0 if t == 0 else self.H[..., t - 1, :]


def _affine_rows(X: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    """X @ W + b over the flattened leading axes (one GEMM, not a stack)."""
    out = X.reshape(-1, X.shape[-1]) @ W + b
    return out.reshape(X.shape[:-1] + (W.shape[1],))


def precompute_projections(X: np.ndarray, params: CellParams) -> Projections:
    """Affine-map every input row at once: Q = X W_q + b_q and friends."""
    if params.kind == "elman":
        raise ValueError("elman keeps its recurrent product in the loop; "
                         "precompute_projections applies to gated cells only")
    if X.shape[-1] != params.d_in:
        raise ShapeError(f"input width {X.shape[-1]} != d_in {params.d_in}")
    n = X.shape[-2]
    proj = Projections(n=n, V=_affine_rows(X, params.W_v, params.b_v))
    if params.W_q is not None:
        proj.Q = _affine_rows(X, params.W_q, params.b_q)
    if params.W_k is not None:
        proj.K = _affine_rows(X, params.W_k, params.b_k)
    if params.W_o is not None:
        proj.O_pre = _affine_rows(X, params.W_o, params.b_o)
    return proj


def _default_h0(X: np.ndarray, d: int, h0) -> np.ndarray:
    if h0 is None:
        return np.zeros(X.shape[:-2] + (d,), dtype=X.dtype)
    if h0.shape != X.shape[:-2] + (d,):
        raise ShapeError(f"h0 shape {h0.shape} incompatible with input {X.shape}")
    return h0


def forward_from_projections(params: CellParams, X: np.ndarray, proj: Projections,
                             h0: Optional[np.ndarray] = None) -> Trajectory:
    """Run the elementwise recurrence over precomputed projections."""
    kind = params.kind
    n, d = proj.n, params.d
    h = _default_h0(X, d, h0)
    shp = h.shape[:-1] + (n, d)
    H = np.empty(shp, dtype=h.dtype)
    I = np.empty(shp, dtype=h.dtype)
    F = np.empty(shp, dtype=h.dtype)
    Upre = np.empty(shp, dtype=h.dtype)
    O = np.empty(shp, dtype=h.dtype) if kind == "olrn" else None
    for t in range(n):
        if kind == "lrn":
            h, cache = lrn_step(proj.Q[..., t, :], proj.K[..., t, :], proj.V[..., t, :],
                                h, params.activation)
        elif kind == "olrn":
            h, cache = olrn_step(proj.Q[..., t, :], proj.K[..., t, :], proj.V[..., t, :],
                                 proj.O_pre[..., t, :], h)
            O[..., t, :] = cache.o
        elif kind == "glrn":
            h, cache = glrn_step(proj.Q[..., t, :], proj.V[..., t, :], h, params.activation)
        elif kind == "elrn":
            h, cache = elrn_step(proj.V[..., t, :], h, params.activation)
        else:
            raise ValueError(f"unsupported kind {kind!r}")
        H[..., t, :] = cache.h
        I[..., t, :] = cache.i
        F[..., t, :] = cache.f
        Upre[..., t, :] = cache.u
    h0_arr = _default_h0(X, d, h0)
    return Trajectory(kind, params.activation, h0_arr, X, proj, H, I, F, Upre,
                      O=O, C=Upre if kind == "olrn" else None)


def _forward_elman(params: CellParams, X: np.ndarray, h0, hoisted: bool) -> Trajectory:
    n, d = X.shape[-2], params.d
    h = _default_h0(X, d, h0)
    shp = h.shape[:-1] + (n, d)
    H = np.empty(shp, dtype=h.dtype)
    A = np.empty(shp, dtype=h.dtype)
    Z = np.zeros(shp, dtype=h.dtype)
    xw = _affine_rows(X, params.W, params.b) if hoisted else None
    for t in range(n):
        if hoisted:
            a = xw[..., t, :] + h @ params.U
            h = _apply_g(a, params.activation)
        else:
            h, cache = elman_step(X[..., t, :], h, params, params.activation)
            a = cache.a
        H[..., t, :] = h
        A[..., t, :] = a
    h0_arr = _default_h0(X, d, h0)
    return Trajectory("elman", params.activation, h0_arr, X, Projections(n=n), H, Z, Z, A)


def forward_sequence(params: CellParams, X: np.ndarray,
                     h0: Optional[np.ndarray] = None) -> Trajectory:
    """Fused forward: one projection pass, then the elementwise loop."""
    if params.kind == "elman":
        # the input product hoists, the recurrent product cannot
        return _forward_elman(params, X, h0, hoisted=True)
    return forward_from_projections(params, X, precompute_projections(X, params), h0)


def forward_sequence_naive(params: CellParams, X: np.ndarray,
                           h0: Optional[np.ndarray] = None) -> Trajectory:
    """Reference forward keeping every matrix product inside the loop."""
    if params.kind == "elman":
        return _forward_elman(params, X, h0, hoisted=False)
    n, d = X.shape[-2], params.d
    if X.shape[-1] != params.d_in:
        raise ShapeError(f"input width {X.shape[-1]} != d_in {params.d_in}")
    h = _default_h0(X, d, h0)
    shp = h.shape[:-1] + (n, d)
    H = np.empty(shp, dtype=h.dtype)
    I = np.empty(shp, dtype=h.dtype)
    F = np.empty(shp, dtype=h.dtype)
    Upre = np.empty(shp, dtype=h.dtype)
    O = np.empty(shp, dtype=h.dtype) if params.kind == "olrn" else None
    proj = Projections(
        n=n,
        Q=np.empty(shp, dtype=h.dtype) if params.W_q is not None else None,
        K=np.empty(shp, dtype=h.dtype) if params.W_k is not None else None,
        V=np.empty(shp, dtype=h.dtype),
        O_pre=np.empty(shp, dtype=h.dtype) if params.W_o is not None else None,
    )
    for t in range(n):
        x_t = X[..., t, :]
        v_t = x_t @ params.W_v + params.b_v
        proj.V[..., t, :] = v_t
        if params.kind == "lrn":
            q_t = x_t @ params.W_q + params.b_q
            k_t = x_t @ params.W_k + params.b_k
            proj.Q[..., t, :] = q_t
            proj.K[..., t, :] = k_t
            h, cache = lrn_step(q_t, k_t, v_t, h, params.activation)
        elif params.kind == "olrn":
            q_t = x_t @ params.W_q + params.b_q
            k_t = x_t @ params.W_k + params.b_k
            p_t = x_t @ params.W_o + params.b_o
            proj.Q[..., t, :] = q_t
            proj.K[..., t, :] = k_t
            proj.O_pre[..., t, :] = p_t
            h, cache = olrn_step(q_t, k_t, v_t, p_t, h)
            O[..., t, :] = cache.o
        elif params.kind == "glrn":
            q_t = x_t @ params.W_q + params.b_q
            proj.Q[..., t, :] = q_t
            h, cache = glrn_step(q_t, v_t, h, params.activation)
        else:
            h, cache = elrn_step(v_t, h, params.activation)
        H[..., t, :] = cache.h
        I[..., t, :] = cache.i
        F[..., t, :] = cache.f
        Upre[..., t, :] = cache.u
    h0_arr = _default_h0(X, d, h0)
    return Trajectory(params.kind, params.activation, h0_arr, X, proj, H, I, F, Upre,
                      O=O, C=Upre if params.kind == "olrn" else None)


# -----------------------------------------------------------------------------
# Sequence backward
# -----------------------------------------------------------------------------


@dataclass
class GradientSet:
    """Gradients shaped like their CellParams, plus dX and per-step state grads."""

    kind: str
    dX: np.ndarray
    state_grads: np.ndarray  # (..., n, d) total dL/dh_t at every step
    W_q: Optional[np.ndarray] = None
    W_k: Optional[np.ndarray] = None
    W_v: Optional[np.ndarray] = None
    W_o: Optional[np.ndarray] = None
    b_q: Optional[np.ndarray] = None
    b_k: Optional[np.ndarray] = None
    b_v: Optional[np.ndarray] = None
    b_o: Optional[np.ndarray] = None
    W: Optional[np.ndarray] = None
    U: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for name in PARAM_FIELDS[self.kind]:
            yield name, getattr(self, name)


def _fold_projection(X2, dRows, W):
    """(dW, db, dX contribution) for rows = X W + b."""
    d = dRows.shape[-1]
    dR2 = dRows.reshape(-1, d)
    dX = (dR2 @ W.T).reshape(dRows.shape[:-1] + (W.shape[0],))
    return X2.T @ dR2, dR2.sum(axis=0), dX


def backward_sequence(params: CellParams, traj: Trajectory,
                      dH: np.ndarray) -> GradientSet:
    """Exact reverse-mode gradients for the loss whose per-step state
    gradients are dH.

    Parameter gradients are summed over any leading batch axis; dX keeps it.
    """
    if traj.kind != params.kind or traj.activation != params.activation:
        raise ValueError("trajectory was produced by a different cell configuration")
    if dH.shape != traj.H.shape:
        raise ShapeError(f"dH shape {dH.shape} != trajectory states {traj.H.shape}")
    kind, n, d = params.kind, traj.n, params.d
    X = traj.X
    # every row of these is written exactly once in the sweep
    state_grads = np.empty_like(traj.H)
    carry = np.zeros_like(traj.h0)

    if kind == "elman":
        dA = np.empty_like(traj.H)
        for t in range(n - 1, -1, -1):
            delta = dH[..., t, :] + carry
            state_grads[..., t, :] = delta
            gp = _g_prime_from_h(traj.H[..., t, :], params.activation)
            da = delta * gp
            dA[..., t, :] = da
            carry = da @ params.U.T
        X2 = X.reshape(-1, params.d_in)
        dA2 = dA.reshape(-1, d)
        H_prev = np.concatenate([traj.h0[..., None, :], traj.H], axis=-2)[..., :n, :]
        dW = X2.T @ dA2
        dU = H_prev.reshape(-1, d).T @ dA2
        db = dA2.sum(axis=0)
        dX = (dA2 @ params.W.T).reshape(X.shape)
        return GradientSet("elman", dX, state_grads, W=dW, U=dU, b=db)

    dQ = np.empty_like(traj.H) if params.W_q is not None else None
    dK = np.empty_like(traj.H) if params.W_k is not None else None
    dV = np.empty_like(traj.H)
    dP = np.empty_like(traj.H) if params.W_o is not None else None

    for t in range(n - 1, -1, -1):
        delta = dH[..., t, :] + carry
        state_grads[..., t, :] = delta
        h_prev = traj.h_before(t)
        i = traj.I[..., t, :]
        f = traj.F[..., t, :]
        v = traj.proj.V[..., t, :]

        if kind == "olrn":
            c = traj.C[..., t, :]
            o = traj.O[..., t, :]
            do = delta * c
            dc = delta * o
            da_o = do * sigmoid_prime_from_value(o)
            dP[..., t, :] = da_o
            dc = dc - da_o
            di = dc * v
            dV[..., t, :] = dc * i
            df = dc * h_prev
            da_i = di * sigmoid_prime_from_value(i)
            da_f = df * sigmoid_prime_from_value(f)
            dK[..., t, :] = da_i
            dQ[..., t, :] = da_f
            carry = dc * f + da_i - da_f
            continue

        gp = _g_prime_from_h(traj.H[..., t, :], params.activation)
        du = delta * gp
        dV[..., t, :] = du * i
        if kind == "lrn":
            di = du * v
            df = du * h_prev
            da_i = di * sigmoid_prime_from_value(i)
            da_f = df * sigmoid_prime_from_value(f)
            dK[..., t, :] = da_i
            dQ[..., t, :] = da_f
            carry = du * f + da_i - da_f
        elif kind == "glrn":
            # i = 1 - f folds the input-gate path into the forget gate
            df = du * (h_prev - v)
            da_f = df * sigmoid_prime_from_value(f)
            dQ[..., t, :] = da_f
            carry = du * f - da_f
        elif kind == "elrn":
            df = du * (h_prev - v)
            da_f = df * sigmoid_prime_from_value(f)
            carry = du * f - da_f
        else:
            raise ValueError(f"unsupported kind {kind!r}")

    X2 = X.reshape(-1, params.d_in)
    grads = GradientSet(kind, np.zeros_like(X), state_grads)
    for w_name, b_name, dRows in (("W_q", "b_q", dQ), ("W_k", "b_k", dK),
                                  ("W_v", "b_v", dV), ("W_o", "b_o", dP)):
        if dRows is None:
            continue
        dW, db, dX_part = _fold_projection(X2, dRows, getattr(params, w_name))
        setattr(grads, w_name, dW)
        setattr(grads, b_name, db)
        grads.dX += dX_part
    return grads


# -----------------------------------------------------------------------------
# Checkpoint (single JSON document, bit-exact round trip)
# -----------------------------------------------------------------------------


def _matrix_to_json(arr: np.ndarray) -> dict:
    rows, cols = (1, arr.shape[0]) if arr.ndim == 1 else arr.shape
    return {"rows": rows, "cols": cols,
            "data": [float(x) for x in np.asarray(arr, dtype=np.float64).ravel()]}


def _matrix_from_json(obj: dict, want_vector: bool) -> np.ndarray:
    arr = np.asarray(obj["data"], dtype=np.float64).reshape(obj["rows"], obj["cols"])
    if want_vector:
        if obj["rows"] != 1:
            raise ValueError(f"expected a 1-row matrix, got {obj['rows']}x{obj['cols']}")
        return arr[0]
    return arr


def params_to_dict(params: CellParams) -> dict:
    doc = {"kind": params.kind, "activation": params.activation,
           "d_in": params.d_in, "d": params.d}
    for name, arr in params.items():
        doc[name] = _matrix_to_json(arr)
    return doc


def params_from_dict(doc: dict) -> CellParams:
    kind = doc["kind"]
    if kind not in CELL_KINDS:
        raise ValueError(f"unknown cell kind {kind!r}")
    kw = {name: _matrix_from_json(doc[name], want_vector=name.startswith("b"))
          for name in PARAM_FIELDS[kind]}
    return CellParams(kind, doc["activation"], doc["d_in"], doc["d"], **kw)


def save_checkpoint(params: CellParams, path: str) -> None:
    """Write a cell to JSON; floats use shortest round-trip decimals."""
    with open(path, "w") as fh:
        json.dump(params_to_dict(params), fh)


def load_checkpoint(path: str) -> CellParams:
    with open(path) as fh:
        return params_from_dict(json.load(fh))
