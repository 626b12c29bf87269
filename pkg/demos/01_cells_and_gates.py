"""A first look at the gated cells.

The whole point of this cell family: the only thing that happens inside the
recurrence is elementwise arithmetic. All weight matrices touch the data once,
up front, for the entire sequence.
"""

import numpy as np

from lrn import forward_sequence, forward_sequence_naive, init_params, precompute_projections
from lrn.cells import lrn_step
from lrn.tensor import Rng

rng = Rng(0)
d = 8
params = init_params("lrn", d, d, rng, activation="tanh")
X = rng.uniform(-1.0, 1.0, (12, d))

# One projection pass produces q/k/v rows for every timestep at once.
proj = precompute_projections(X, params)
print("projection shapes:", proj.Q.shape, proj.K.shape, proj.V.shape)

# The recurrence consumes one row per step and mixes it with the carried state.
traj = forward_sequence(params, X)
print("\nstep  mean(i)  mean(f)  mean|h|")
for t in range(traj.n):
    print(f"{t:4d}  {traj.I[t].mean():7.3f}  {traj.F[t].mean():7.3f}  "
          f"{np.abs(traj.H[t]).mean():7.3f}")

# Twin gates from one state: pushing a channel of h_prev up opens the input
# gate and closes the forget gate on that channel, never the other way.
h0 = np.zeros(d)
_, base = lrn_step(proj.Q[0], proj.K[0], proj.V[0], h0)
h_up = h0.copy()
h_up[3] += 0.25
_, moved = lrn_step(proj.Q[0], proj.K[0], proj.V[0], h_up)
print("\nchannel 3 after bumping h_prev[3] by +0.25:")
print(f"  input  gate: {base.i[3]:.4f} -> {moved.i[3]:.4f} (up)")
print(f"  forget gate: {base.f[3]:.4f} -> {moved.f[3]:.4f} (down)")

# With tanh the state can never leave (-1, 1), whatever the input scale.
wild = forward_sequence(params, rng.uniform(-50.0, 50.0, (200, d)))
gap = 1.0 - np.abs(wild.H).max()
print(f"\nmax |h| over 200 wild-input steps stays below 1 by {gap:.2e}")

# Hoisting the matrix work out of the loop changes nothing numerically.
naive = forward_sequence_naive(params, X)
print(f"fused vs in-loop forward, max |delta|: {np.abs(traj.H - naive.H).max():.2e}")
