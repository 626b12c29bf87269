"""Hand-derived backward passes, checked against finite differences.

backward_sequence replays a recorded trajectory in reverse and accumulates
exact gradients through the gate recurrence. The check below perturbs every
single parameter entry (central differences on the forward pass only) and
compares.
"""

from lrn.gradcheck import gradcheck_cell

print(f"{'cell':8s} {'activation':10s} {'max rel err':>12s}")
for kind in ("lrn", "olrn", "glrn", "elrn", "elman"):
    for activation in (("identity",) if kind == "olrn" else ("tanh", "identity")):
        res = gradcheck_cell(kind, d_in=6, d=6, n=10, seed=13, activation=activation)
        print(f"{kind:8s} {res.activation:10s} {res.max_error:12.3e}")

print("\nper-array detail for lrn/tanh:")
res = gradcheck_cell("lrn", 6, 6, 10, 13, activation="tanh")
for name, err in sorted(res.per_array.items()):
    print(f"  {name:4s} {err:.3e}")
