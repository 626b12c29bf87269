"""The recurrence is secretly an unnormalized attention mechanism.

With the identity activation and a zero initial state, the hidden state is
exactly a weighted sum of all past value rows: source k reaches step t with
weight i_k * f_{k+1} * ... * f_t per channel. The input gate at entry time is
the "key", the accumulated forget chain is the "query".
"""

import numpy as np

from lrn import forward_sequence, init_params
from lrn.decompose import attention_weights, expand_hidden, memory_trace
from lrn.tensor import Rng

rng = Rng(21)
d, n = 8, 32
params = init_params("lrn", d, d, rng, activation="identity")
X = rng.uniform(-1.0, 1.0, (n, d))
traj = forward_sequence(params, X)

# The closed form reproduces the recurrence exactly.
worst = max(float(np.abs(expand_hidden(traj, t) - traj.H[t]).max()) for t in range(n))
print(f"expansion vs recurrence, max |delta| over all steps: {worst:.2e}")

# Chain weights for the final step: recent sources keep more weight.
print("\nsource -> final-step weight (channel mean), every 4th source:")
for chain in attention_weights(traj, n - 1)[::4]:
    bar = "#" * int(60 * chain.w.mean() / 0.6)
    print(f"  k={chain.k:2d}  {chain.w.mean():.4f}  {bar}")

# A token's memory decays monotonically along the sequence.
curve = memory_trace(traj, k=4)
print("\ndecay of source 4 across evaluation positions:")
vals = curve.values
print("  " + " ".join(f"{v:.3f}" for v in vals[:10]) + " ...")
print(f"  strictly decreasing: {bool(np.all(np.diff(vals) < 0))}")
