"""Train on the adding problem: remember two marked numbers, output their sum.

Each sequence carries uniform values in channel 0 and exactly two markers in
channel 1, one per half. Predicting the constant 1.0 scores MSE 1/6 = 0.1667;
anything meaningfully below that means the cell carried the marked values
across the gap. The demo uses a short sequence so it converges in about a
minute; the acceptance suite runs the full n=100 configuration.
"""

from lrn.training import TrainConfig, train

# the forget gate starts biased open so the short demo budget suffices; the
# acceptance suite solves the full n=100 task from a cold start
cfg = TrainConfig(task="adding", cell="lrn", d=32, n=40, batch_size=32,
                  max_steps=4000, lr=1e-3, clip_norm=5.0, seed=7,
                  eval_interval=250, eval_examples=128, target_metric=0.05,
                  forget_bias=2.0)

print(f"adding task: n={cfg.n}, d={cfg.d}, trivial baseline MSE 0.1667\n")
print(f"{'step':>6s} {'train loss':>12s} {'eval mse':>10s}")
result = train(cfg, metrics_sink=lambda r: print(
    f"{r['step']:6d} {r['loss']:12.4f} {r['metric']:10.4f}"))

verdict = "beat" if result.final_metric < 0.05 else "did not reach"
print(f"\n{verdict} the 0.05 target in {result.steps_run} updates "
      f"(final eval MSE {result.final_metric:.4f})")
