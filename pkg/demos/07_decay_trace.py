"""Which word does the trained classifier remember?

Train the toy sentiment task (one salient word decides the label, the rest is
filler), then look at each token's chain weight at the final position. The
salient word should out-survive everything else, because the final state is
all the classifier gets to see.
"""

import numpy as np

from lrn.decompose import memory_trace
from lrn.tasks import tokenize_sentiment
from lrn.training import TrainConfig, train

# start with input gates biased shut and forget gates biased open, so the
# model learns to write selectively rather than shrinking filler values
cfg = TrainConfig(task="toysent", cell="lrn", d=32, batch_size=32,
                  max_steps=1500, lr=1e-3, seed=5, eval_interval=250,
                  eval_examples=256, d_embed=16, target_metric=0.995,
                  forget_bias=2.0, input_bias=-2.0)
print("training the toy sentiment classifier...")
result = train(cfg)
print(f"eval accuracy {result.final_metric:.3f} after {result.steps_run} updates\n")

sentence = "this movie was quite boring the story seemed very tedious"
words = sentence.split()
ids = tokenize_sentiment(sentence)
traj = result.model.forward_trajectories(result.model.embed(ids))[-1]

print(f'input: "{sentence}"')
print(f"\n{'token':12s} {'weight at final step':>20s}")
finals = [(w, memory_trace(traj, k).values[-1]) for k, w in enumerate(words)]
top = max(v for _, v in finals)
for w, v in finals:
    bar = "#" * int(40 * v / top)
    print(f"{w:12s} {v:20.5f}  {bar}")
