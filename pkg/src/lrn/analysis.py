"""One-step state Jacobians and backward gradient-norm profiling.

For the gated cells the Jacobian dh_t/dh_{t-1} is diagonal: each channel of
h_t depends on the matching channel of h_{t-1} only, because the recurrence
is elementwise.  For the vanilla cell the recurrent weight matrix makes it a
full matrix, and its repeated multiplication along the sequence is what
drives gradient vanishing/explosion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import CellParams, StepCache, backward_sequence, forward_sequence
from .tensor import sigmoid_prime_from_value, tanh_prime_from_value


def jacobian_diag(cache: StepCache) -> np.ndarray:
    """Diagonal of dh_t/dh_{t-1} for a gated (lrn / glrn / elrn) step cache.

    lrn:         (sigma_i' * v_t  -  h_{t-1} * sigma_f'  +  f_t) * g'(u_t)
    glrn, elrn:  (sigma_f' * (v_t - h_{t-1})  +  f_t) * g'(u_t)
    """
    if cache.kind not in ("lrn", "glrn", "elrn"):
        raise ValueError(f"no closed-form diagonal for cell kind {cache.kind!r}")
    sf = sigmoid_prime_from_value(cache.f)
    if cache.kind == "lrn":
        si = sigmoid_prime_from_value(cache.i)
        a = si * cache.v - cache.h_prev * sf + cache.f
    else:
        # i = 1 - f ties both gate paths to the forget gate
        a = sf * (cache.v - cache.h_prev) + cache.f
    gp = tanh_prime_from_value(cache.h) if cache.activation == "tanh" else np.ones_like(cache.h)
    return a * gp


def elman_jacobian(params: CellParams, cache: StepCache) -> np.ndarray:
    """Full Jacobian dh_t/dh_{t-1} = diag(g'(a_t)) @ U^T for a vanilla step."""
    if cache.kind != "elman":
        raise ValueError(f"expected an elman step cache, got {cache.kind!r}")
    gp = (tanh_prime_from_value(cache.h) if cache.activation == "tanh"
          else np.ones_like(cache.h))
    return params.U.T * gp[:, None]


@dataclass
class NormProfile:
    """||dL/dh_t||_2 for every step of a single sequence, earliest first."""

    kind: str
    d: int
    n: int
    seed: int | None
    norms: np.ndarray

    def ratio(self) -> float:
        """max/min over the profile; inf when some norm underflows to zero."""
        lo = float(self.norms.min())
        return float(self.norms.max()) / lo if lo > 0.0 else float("inf")

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "d": self.d, "n": self.n, "seed": self.seed,
                "norms": [float(v) for v in self.norms]}


def gradient_norm_profile(params: CellParams, X: np.ndarray,
                          grad_at_end: np.ndarray | None = None,
                          h0: np.ndarray | None = None,
                          seed: int | None = None) -> NormProfile:
    """Forward then backward with upstream gradient only at the final step.

    norms[t] is the total ||dL/dh_t|| accumulated through the recurrence,
    indexed by step (ascending t); the backward sweep fills it from the end.
    """
    if X.ndim != 2:
        raise ValueError("gradient_norm_profile expects a single (n, d_in) sequence")
    traj = forward_sequence(params, X, h0)
    dH = np.zeros_like(traj.H)
    if grad_at_end is None:
        grad_at_end = np.ones(params.d, dtype=traj.H.dtype) / np.sqrt(params.d)
    dH[-1] = grad_at_end
    grads = backward_sequence(params, traj, dH)
    norms = np.linalg.norm(grads.state_grads, axis=-1)
    return NormProfile(params.kind, params.d, traj.n, seed, norms)
