"""Command-line front end.

Subcommands map directly onto library operations:

- ``gradcheck``        analytic BPTT vs central finite differences
- ``decompose-check``  closed-form expansion vs recurrence states
- ``gradnorms``        backward gradient-norm profile as JSON
- ``train``            desk-scale task training, JSONL metrics + checkpoint
- ``bench``            fused-vs-naive recurrence micro-benchmark
- ``trace``            memory-decay CSV for a trained checkpoint and input

Exit codes: 0 success, 1 check failure or divergence, 2 usage error.
All reports go to stdout unless ``--out`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from .analysis import gradient_norm_profile
from .cells import CELL_KINDS, forward_sequence, init_params
from .decompose import expand_hidden, write_trace_csv
from .gradcheck import gradcheck_cell
from .tensor import Rng
from .training import TrainConfig, TrainingDiverged, load_model, train


def _out_stream(path: str | None):
    return open(path, "w") if path else sys.stdout


def _applicable_activations(kind: str) -> tuple[str, ...]:
    return ("identity",) if kind == "olrn" else ("tanh", "identity")


def cmd_gradcheck(args) -> int:
    worst = 0.0
    for activation in _applicable_activations(args.cell):
        res = gradcheck_cell(args.cell, args.dim, args.dim, args.len, args.seed,
                             activation=activation)
        worst = max(worst, res.max_error)
        print(f"cell={args.cell} activation={activation} max_rel_err={res.max_error:.3e}")
    print(f"max_rel_err={worst:.3e} tol={args.tol:g} -> {'PASS' if worst <= args.tol else 'FAIL'}")
    return 0 if worst <= args.tol else 1


def cmd_decompose_check(args) -> int:
    rng = Rng(args.seed)
    params = init_params("lrn", args.dim, args.dim, rng, activation="identity")
    X = rng.uniform(-1.0, 1.0, (args.len, args.dim))
    traj = forward_sequence(params, X)
    worst = max(float(np.max(np.abs(expand_hidden(traj, t) - traj.H[t])))
                for t in range(traj.n))
    print(f"max_abs_delta={worst:.3e} tol={args.tol:g} -> {'PASS' if worst <= args.tol else 'FAIL'}")
    return 0 if worst <= args.tol else 1


def cmd_gradnorms(args) -> int:
    rng = Rng(args.seed)
    activation = "identity" if args.cell == "olrn" else "tanh"
    params = init_params(args.cell, args.dim, args.dim, rng, activation=activation)
    X = rng.uniform(-1.0, 1.0, (args.len, args.dim))
    g = rng.uniform(-1.0, 1.0, (args.dim,))
    profile = gradient_norm_profile(params, X, grad_at_end=g / np.linalg.norm(g),
                                    seed=args.seed)
    out = _out_stream(args.out)
    json.dump(profile.to_json_dict(), out)
    out.write("\n")
    if args.out:
        out.close()
    return 0


def cmd_train(args) -> int:
    cfg = TrainConfig(task=args.task, cell=args.cell, d=args.dim, layers=args.layers,
                      batch_size=args.batch, max_steps=args.steps, lr=args.lr,
                      clip_norm=args.clip_norm, seed=args.seed,
                      eval_interval=args.eval_interval, n=args.len,
                      corpus_path=args.corpus)
    out = _out_stream(args.out)

    def sink(record: dict) -> None:
        out.write(json.dumps(record) + "\n")
        out.flush()

    try:
        result = train(cfg, metrics_sink=sink, checkpoint_path=args.checkpoint)
    except TrainingDiverged as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 1
    finally:
        if args.out:
            out.close()
    print(f"finished at step {result.steps_run}, final metric "
          f"{result.final_metric:.6g}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    try:
        report = bench_mod.bench(kind=args.cell, mode=args.mode, d=args.dim,
                                 n=args.len, batch=args.batch, repeats=args.repeats,
                                 with_layer_norm=args.layer_norm,
                                 include_backward=args.with_backward,
                                 precision=args.precision, seed=args.seed)
    except bench_mod.EquivalenceError as exc:
        print(f"equivalence gate failed: {exc}", file=sys.stderr)
        return 1
    out = _out_stream(args.out)
    json.dump(report.to_json_dict(), out, indent=2)
    out.write("\n")
    if args.out:
        out.close()
    return 0


def cmd_trace(args) -> int:
    model = load_model(args.checkpoint)
    if model.vocab is None:
        print("checkpoint carries no vocabulary; cannot tokenize input", file=sys.stderr)
        return 1
    word_to_id = {w: i for i, w in enumerate(model.vocab)}
    words = args.input.lower().split()
    unknown = [w for w in words if w not in word_to_id]
    if unknown:
        print(f"words outside the checkpoint vocabulary: {unknown}", file=sys.stderr)
        return 1
    ids = np.asarray([word_to_id[w] for w in words])
    X = model.embed(ids)
    traj = model.forward_trajectories(X)[-1]  # gates of the top recurrent layer
    out = _out_stream(args.out)
    write_trace_csv(traj, out, tokens=words)
    if args.out:
        out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrn",
                                     description="lightweight recurrent network toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, cell=True, dim=64, length: int | None = 32, seed=0):
        if cell:
            p.add_argument("--cell", choices=CELL_KINDS, default="lrn")
        p.add_argument("--dim", type=int, default=dim)
        if length is not None:
            p.add_argument("--len", type=int, default=length)
        p.add_argument("--seed", type=int, default=seed)

    p = sub.add_parser("gradcheck", help="finite-difference check of the backward pass")
    add_common(p, dim=6, length=10, seed=13)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(fn=cmd_gradcheck)

    p = sub.add_parser("decompose-check", help="expansion-vs-recurrence equivalence")
    add_common(p, cell=False, dim=8, length=32, seed=21)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=cmd_decompose_check)

    p = sub.add_parser("gradnorms", help="backward gradient-norm profile (JSON)")
    add_common(p, dim=32, length=200, seed=9)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gradnorms)

    p = sub.add_parser("train", help="train a desk-scale task (JSONL metrics)")
    p.add_argument("--task", required=True, choices=("adding", "copy", "toysent", "charlm"))
    add_common(p, dim=64, length=None, seed=0)
    p.add_argument("--len", type=int, default=None,
                   help="sequence length (task default when omitted)")
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--clip-norm", type=float, default=5.0)
    p.add_argument("--eval-interval", type=int, default=200)
    p.add_argument("--checkpoint", help="path to write the final checkpoint")
    p.add_argument("--corpus", help="charlm corpus file (default: bundled text)")
    p.add_argument("--out", help="write JSONL metrics here instead of stdout")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("bench", help="fused-vs-naive recurrence micro-benchmark")
    add_common(p, dim=512, length=256, seed=0)
    p.add_argument("--mode", choices=("fused", "naive"), default="fused")
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--layer-norm", action="store_true")
    p.add_argument("--with-backward", action="store_true")
    p.add_argument("--precision", choices=("f32", "f64"), default="f32")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("trace", help="memory-decay CSV for a checkpoint and input text")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_trace)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
