"""Losses, optimizers, gradient clipping, and the desk-scale training driver.

Models are a stack of recurrent cells with an optional token-embedding table
below and a linear head above.  The head reads either the final hidden state
(classification / regression) or every requested position (copy recall,
next-byte prediction).  Training is full-sequence BPTT with deterministic
batch sampling: batch ``s`` of a run is a pure function of (task, seed, s).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from . import tasks as tasks_mod
from .cells import (
    CellParams,
    GradientSet,
    backward_sequence,
    forward_sequence,
    init_params,
    params_from_dict,
    params_to_dict,
)
from .tensor import Rng, ShapeError

_TRAIN_STREAM, _EVAL_STREAM = 1, 2


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; the run is aborted with diagnostics."""


# -----------------------------------------------------------------------------
# Gradient clipping
# -----------------------------------------------------------------------------


def _grad_arrays(grads) -> dict[str, np.ndarray]:
    if isinstance(grads, GradientSet):
        out = dict(grads.items())
        out["dX"] = grads.dX
        return out
    return dict(grads)


def global_norm(grads) -> float:
    """l2 norm over every entry of every gradient array (fixed order)."""
    total = 0.0
    for _, arr in sorted(_grad_arrays(grads).items()):
        total += float(np.dot(arr.ravel(), arr.ravel()))
    return float(np.sqrt(total))


def clip_by_global_norm(grads, limit: float):
    """Scale all gradients by limit/norm when the global norm exceeds limit.

    Returns (clipped gradients, applied scale).  The input is not modified;
    the result has the same type (GradientSet or dict).
    """
    if limit <= 0:
        raise ValueError("clip limit must be > 0")
    norm = global_norm(grads)
    scale = 1.0 if norm <= limit else limit / norm
    if scale == 1.0:
        return grads, 1.0
    if isinstance(grads, GradientSet):
        kw = {name: arr * scale for name, arr in grads.items()}
        clipped = GradientSet(grads.kind, grads.dX * scale, grads.state_grads, **kw)
        return clipped, scale
    return {name: arr * scale for name, arr in grads.items()}, scale


# -----------------------------------------------------------------------------
# Optimizers
# -----------------------------------------------------------------------------


class Sgd:
    def __init__(self, lr: float):
        self.lr = lr
        self.step_count = 0

    def update(self, params: dict[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        self.step_count += 1
        for name in sorted(params):
            params[name] -= self.lr * grads[name]


class Adam:
    """Standard bias-corrected Adam (beta1=0.9, beta2=0.999, eps=1e-8)."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.step_count = 0

    def update(self, params: dict[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1 ** t
        bc2 = 1.0 - self.beta2 ** t
        for name in sorted(params):
            g = grads[name]
            if g.shape != params[name].shape:
                raise ShapeError(f"{name}: gradient shape {g.shape} != param {params[name].shape}")
            m = self.m.setdefault(name, np.zeros_like(params[name]))
            v = self.v.setdefault(name, np.zeros_like(params[name]))
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            params[name] -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def make_optimizer(kind: str, lr: float):
    if kind == "adam":
        return Adam(lr)
    if kind == "sgd":
        return Sgd(lr)
    raise ValueError(f"unknown optimizer {kind!r}")


# -----------------------------------------------------------------------------
# Losses
# -----------------------------------------------------------------------------


def softmax_cross_entropy(logits: np.ndarray, labels) -> tuple[float, np.ndarray]:
    """Mean stabilized cross entropy and exact logit gradients.

    logits: (..., C); labels: integer array of the leading shape (or a bare
    int for a single row).  The gradient is already divided by the number of
    rows, so it matches the returned mean loss.
    """
    logits = np.asarray(logits)
    labels = np.asarray(labels)
    C = logits.shape[-1]
    if labels.shape != logits.shape[:-1]:
        raise ShapeError(f"labels shape {labels.shape} != logit rows {logits.shape[:-1]}")
    if labels.size and (labels.min() < 0 or labels.max() >= C):
        raise ValueError(f"label out of range for {C} classes")
    z = logits - logits.max(axis=-1, keepdims=True)
    ez = np.exp(z)
    probs = ez / ez.sum(axis=-1, keepdims=True)
    picked = np.take_along_axis(z, labels[..., None], axis=-1)[..., 0]
    lse = np.log(ez.sum(axis=-1))
    count = max(labels.size, 1)
    loss = float((lse - picked).sum() / count)
    dlogits = probs.copy()
    np.subtract.at(dlogits.reshape(-1, C), (np.arange(labels.size), labels.ravel()), 1.0)
    return loss, dlogits / count


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error over all entries and its gradient."""
    if pred.shape != target.shape:
        raise ShapeError(f"mse_loss: shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    n = max(pred.size, 1)
    return float(np.dot(diff.ravel(), diff.ravel()) / n), 2.0 * diff / n


# -----------------------------------------------------------------------------
# Model: embedding -> cell stack -> linear head
# -----------------------------------------------------------------------------


@dataclass
class Model:
    """Embedding -> cell stack -> linear head.

    head_W is (d, C) for a shared readout, or (P, d, C) for one head per
    read position (used by the copy task, whose P recall offsets each get
    their own decoder over the carried state).
    """

    task: str
    cells: list[CellParams]
    head_W: np.ndarray
    head_b: np.ndarray
    embedding: Optional[np.ndarray] = None
    vocab: Optional[list[str]] = None

    def param_dict(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        if self.embedding is not None:
            out["embedding"] = self.embedding
        for li, cell in enumerate(self.cells):
            for name, arr in cell.items():
                out[f"cell{li}.{name}"] = arr
        out["head_W"] = self.head_W
        out["head_b"] = self.head_b
        return out

    def forward_trajectories(self, X: np.ndarray):
        trajs = []
        inp = X
        for cell in self.cells:
            traj = forward_sequence(cell, inp)
            trajs.append(traj)
            inp = traj.H
        return trajs

    def embed(self, ids: np.ndarray) -> np.ndarray:
        if self.embedding is None:
            raise ValueError("model has no embedding table")
        return self.embedding[ids]


def build_model(task: str, cell_kind: str, d_in: int, d: int, layers: int,
                out_width: int, rng: Rng, activation: str = "tanh",
                vocab_size: int | None = None, d_embed: int | None = None,
                vocab: Optional[list[str]] = None,
                forget_bias: float = 0.0, input_bias: float = 0.0,
                chrono: float = 0.0, head_positions: Optional[int] = None) -> Model:
    """Assemble embedding + cell stack + head with seeded glorot weights.

    forget_bias/input_bias shift the gate pre-activation biases at init: a
    positive forget bias plus a negative input bias is the classic
    write-rarely, remember-long starting point.  chrono = T draws per-channel
    forget biases log(U(1, T)) with input biases tied to the negative, giving
    the cell a bank of memory timescales up to ~T from the first step.
    """
    from .tensor import glorot_uniform

    embedding = None
    if vocab_size is not None:
        d_embed = d_embed or d_in
        embedding = glorot_uniform(vocab_size, d_embed, rng)
        d_in = d_embed
    cells = []
    for li in range(layers):
        cell = init_params(cell_kind, d_in if li == 0 else d, d, rng, activation=activation)
        if chrono > 1.0 and cell.b_q is not None:
            cell.b_q[...] = np.log(rng.uniform(1.0, chrono, (d,)))
            if cell.b_k is not None:
                cell.b_k[...] = -cell.b_q
        else:
            if forget_bias != 0.0 and cell.b_q is not None:
                cell.b_q[...] = forget_bias
            if input_bias != 0.0 and cell.b_k is not None:
                cell.b_k[...] = input_bias
        cells.append(cell)
    if head_positions:
        head_W = np.stack([glorot_uniform(d, out_width, rng)
                           for _ in range(head_positions)])
        head_b = np.zeros((head_positions, out_width))
    else:
        head_W = glorot_uniform(d, out_width, rng)
        head_b = np.zeros(out_width)
    return Model(task, cells, head_W, head_b, embedding, vocab)


def model_loss_and_grads(model: Model, *, X: np.ndarray | None = None,
                         ids: np.ndarray | None = None,
                         labels: np.ndarray | None = None,
                         targets: np.ndarray | None = None,
                         positions="final") -> tuple[float, dict[str, np.ndarray]]:
    """One full forward/backward pass over a batch.

    positions: "final" reads h_n only; "all" reads every step; an index array
    reads those steps.  Classification uses ``labels`` (ints), regression
    uses ``targets`` (floats).
    """
    if ids is not None:
        X = model.embed(ids)
    trajs = model.forward_trajectories(X)
    H = trajs[-1].H  # (B, n, d)

    if isinstance(positions, str):
        feats = H[..., -1, :] if positions == "final" else H
    else:
        feats = H[..., positions, :]
    d = H.shape[-1]
    per_position_head = model.head_W.ndim == 3
    if per_position_head:
        # feats (B, P, d) x head_W (P, d, C): one decoder per read offset
        logits = np.einsum("bpd,pdc->bpc", feats, model.head_W) + model.head_b
    else:
        feats2 = np.ascontiguousarray(feats).reshape(-1, d)
        logits = (feats2 @ model.head_W + model.head_b).reshape(
            feats.shape[:-1] + (model.head_W.shape[1],))

    if labels is not None:
        loss, dlogits = softmax_cross_entropy(logits, labels)
    else:
        loss, dlogits = mse_loss(logits, targets)

    if per_position_head:
        grads: dict[str, np.ndarray] = {
            "head_W": np.einsum("bpd,bpc->pdc", feats, dlogits),
            "head_b": dlogits.sum(axis=0),
        }
        dfeats = np.einsum("bpc,pdc->bpd", dlogits, model.head_W)
    else:
        dlog2 = dlogits.reshape(-1, dlogits.shape[-1])
        grads = {
            "head_W": feats2.T @ dlog2,
            "head_b": dlog2.sum(axis=0),
        }
        dfeats = (dlog2 @ model.head_W.T).reshape(feats.shape)
    dH = np.zeros_like(H)
    if isinstance(positions, str):
        if positions == "final":
            dH[..., -1, :] = dfeats
        else:
            dH = dfeats
    else:
        dH[..., positions, :] = dfeats

    d_below = dH
    for li in range(len(model.cells) - 1, -1, -1):
        gset = backward_sequence(model.cells[li], trajs[li], d_below)
        for name, arr in gset.items():
            grads[f"cell{li}.{name}"] = arr
        d_below = gset.dX

    if ids is not None:
        dE = np.zeros_like(model.embedding)
        np.add.at(dE, ids.ravel(), d_below.reshape(-1, d_below.shape[-1]))
        grads["embedding"] = dE
    return loss, grads


# -----------------------------------------------------------------------------
# Train driver
# -----------------------------------------------------------------------------


@dataclass
class TrainConfig:
    task: str
    cell: str = "lrn"
    d: int = 64
    layers: int = 1
    batch_size: int = 32
    max_steps: int = 2000
    lr: float = 1e-3
    clip_norm: float = 5.0
    seed: int = 0
    eval_interval: int = 200
    optimizer: str = "adam"
    activation: str = "tanh"
    n: Optional[int] = None          # sequence / window length (task default)
    d_embed: int = 64
    copy_payload: int = 5
    copy_alphabet: int = 8
    eval_examples: int = 256
    target_metric: Optional[float] = None  # early stop threshold (task-directional)
    forget_bias: float = 0.0
    input_bias: float = 0.0
    chrono: float = 0.0          # timescale-bank gate init, 0 disables
    corpus_path: Optional[str] = None

    def __post_init__(self):
        for name in ("d", "layers", "batch_size", "max_steps", "eval_interval"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.clip_norm <= 0:
            raise ValueError("clip_norm must be > 0")
        if self.task not in ("adding", "copy", "toysent", "charlm"):
            raise ValueError(f"unknown task {self.task!r}")


@dataclass
class TrainResult:
    model: Model
    metrics: list[dict]
    steps_run: int
    final_metric: float


def _task_setup(cfg: TrainConfig):
    """Returns (model builder kwargs, batch fn, eval fn, metric name, mode)."""
    seed = cfg.seed

    if cfg.task == "adding":
        n = cfg.n or 100

        def sample(stream: int, index: int):
            return tasks_mod.gen_adding(n, Rng(seed).derive(stream, index))

        def batch(stream: int, start: int, count: int):
            inst = [sample(stream, start + j) for j in range(count)]
            X = np.stack([i.X for i in inst])
            y = np.stack([i.target for i in inst])
            return {"X": X, "targets": y, "positions": "final"}

        return dict(d_in=2, out_width=1), batch, "mse", "min"

    if cfg.task == "copy":
        k, A = cfg.copy_payload, cfg.copy_alphabet
        n = cfg.n or 50
        total = k + n + 1 + k
        pos = np.arange(total - k, total)

        def batch(stream: int, start: int, count: int):
            inst = [tasks_mod.gen_copy(n, k, A, Rng(seed).derive(stream, start + j))
                    for j in range(count)]
            ids = np.stack([i.ids for i in inst])
            labels = np.stack([i.target for i in inst])
            return {"ids": ids, "labels": labels, "positions": pos}

        return (dict(vocab_size=A + 2, out_width=A, head_positions=k),
                batch, "accuracy", "max")

    if cfg.task == "toysent":
        def batch(stream: int, start: int, count: int):
            inst = [tasks_mod.gen_toy_sentiment(Rng(seed).derive(stream, start + j))
                    for j in range(count)]
            ids = np.stack([i.ids for i in inst])
            labels = np.asarray([i.target for i in inst])
            return {"ids": ids, "labels": labels, "positions": "final"}

        return dict(vocab_size=len(tasks_mod.VOCAB), out_width=2,
                    vocab=list(tasks_mod.VOCAB)), batch, "accuracy", "max"

    # charlm
    n = cfg.n or 128
    corpus = tasks_mod.load_corpus(cfg.corpus_path)
    train_part, eval_part = tasks_mod.split_corpus(corpus)

    def batch(stream: int, start: int, count: int):
        part = train_part if stream == _TRAIN_STREAM else eval_part
        inst = [tasks_mod.gen_charlm_window(part, n, Rng(seed).derive(stream, start + j))
                for j in range(count)]
        ids = np.stack([i.ids for i in inst])
        labels = np.stack([i.target for i in inst])
        return {"ids": ids, "labels": labels, "positions": "all"}

    return dict(vocab_size=256, out_width=256), batch, "nats_per_byte", "min"


def _evaluate(model: Model, cfg: TrainConfig, batch_fn, metric_name: str) -> float:
    """Metric over a fixed eval stream (deterministic, no parameter updates)."""
    count = cfg.eval_examples
    bs = cfg.batch_size
    correct, total, sq_sum, nll_sum, rows = 0, 0, 0.0, 0.0, 0
    for start in range(0, count, bs):
        kw = batch_fn(_EVAL_STREAM, start, min(bs, count - start))
        X = model.embed(kw["ids"]) if "ids" in kw else kw["X"]
        H = model.forward_trajectories(X)[-1].H
        positions = kw["positions"]
        if isinstance(positions, str):
            feats = H[..., -1, :] if positions == "final" else H
        else:
            feats = H[..., positions, :]
        if model.head_W.ndim == 3:
            logits = np.einsum("bpd,pdc->bpc", feats, model.head_W) + model.head_b
        else:
            logits = feats @ model.head_W + model.head_b
        if metric_name == "mse":
            sq_sum += float(((logits - kw["targets"]) ** 2).sum())
            rows += logits.size
        elif metric_name == "accuracy":
            pred = logits.argmax(axis=-1)
            correct += int((pred == kw["labels"]).sum())
            total += kw["labels"].size
        else:  # nats_per_byte
            loss, _ = softmax_cross_entropy(logits, kw["labels"])
            nll_sum += loss * kw["labels"].size
            rows += kw["labels"].size
    if metric_name == "mse":
        return sq_sum / rows
    if metric_name == "accuracy":
        return correct / total
    return nll_sum / rows


def _target_reached(metric: float, target: Optional[float], mode: str) -> bool:
    if target is None:
        return False
    return metric < target if mode == "min" else metric > target


def train(cfg: TrainConfig, metrics_sink: Optional[Callable[[dict], None]] = None,
          checkpoint_path: Optional[str] = None) -> TrainResult:
    """Run BPTT training; returns the model and one metrics record per eval.

    Fully deterministic for a given config: batch ``s`` depends only on
    (seed, s), so repeated runs produce identical metric streams.
    """
    rng = Rng(cfg.seed).derive(0)
    build_kw, batch_fn, metric_name, mode = _task_setup(cfg)
    model = build_model(cfg.task, cfg.cell, build_kw.get("d_in", 0), cfg.d, cfg.layers,
                        build_kw["out_width"], rng, activation=cfg.activation,
                        vocab_size=build_kw.get("vocab_size"),
                        d_embed=cfg.d_embed, vocab=build_kw.get("vocab"),
                        forget_bias=cfg.forget_bias, input_bias=cfg.input_bias,
                        chrono=cfg.chrono,
                        head_positions=build_kw.get("head_positions"))
    params = model.param_dict()
    opt = make_optimizer(cfg.optimizer, cfg.lr)
    metrics: list[dict] = []
    final_metric = float("nan")
    steps_run = 0

    for step in range(1, cfg.max_steps + 1):
        kw = batch_fn(_TRAIN_STREAM, (step - 1) * cfg.batch_size, cfg.batch_size)
        loss, grads = model_loss_and_grads(
            model, X=kw.get("X"), ids=kw.get("ids"), labels=kw.get("labels"),
            targets=kw.get("targets"), positions=kw["positions"])
        if not np.isfinite(loss):
            raise TrainingDiverged(f"loss became {loss} at step {step}")
        grads, _ = clip_by_global_norm(grads, cfg.clip_norm)
        opt.update(params, grads)
        steps_run = step
        if step % cfg.eval_interval == 0 or step == cfg.max_steps:
            final_metric = _evaluate(model, cfg, batch_fn, metric_name)
            record = {"step": step, "loss": loss,
                      "metric_name": metric_name, "metric": final_metric}
            metrics.append(record)
            if metrics_sink is not None:
                metrics_sink(record)
            if _target_reached(final_metric, cfg.target_metric, mode):
                break

    if checkpoint_path is not None:
        save_model(model, checkpoint_path)
    return TrainResult(model, metrics, steps_run, final_metric)


# -----------------------------------------------------------------------------
# Model checkpoint (cell format plus embedding/head/vocab)
# -----------------------------------------------------------------------------


def _arr_to_json(arr: np.ndarray) -> dict | list:
    if arr.ndim == 3:  # per-position heads: one matrix per read offset
        return [_arr_to_json(plane) for plane in arr]
    return {"rows": arr.shape[0] if arr.ndim == 2 else 1,
            "cols": arr.shape[-1],
            "data": [float(x) for x in np.asarray(arr, dtype=np.float64).ravel()]}


def _arr_from_json(obj, vector: bool = False) -> np.ndarray:
    if isinstance(obj, list):
        return np.stack([_arr_from_json(o) for o in obj])
    arr = np.asarray(obj["data"], dtype=np.float64).reshape(obj["rows"], obj["cols"])
    return arr[0] if vector else arr


def save_model(model: Model, path: str) -> None:
    doc = {
        "task": model.task,
        "cells": [params_to_dict(c) for c in model.cells],
        "head_W": _arr_to_json(model.head_W),
        "head_b": _arr_to_json(model.head_b),
        "embedding": _arr_to_json(model.embedding) if model.embedding is not None else None,
        "vocab": model.vocab,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path: str) -> Model:
    with open(path) as fh:
        doc = json.load(fh)
    head_W = _arr_from_json(doc["head_W"])
    return Model(
        task=doc["task"],
        cells=[params_from_dict(c) for c in doc["cells"]],
        head_W=head_W,
        head_b=_arr_from_json(doc["head_b"], vector=head_W.ndim == 2),
        embedding=_arr_from_json(doc["embedding"]) if doc["embedding"] else None,
        vocab=doc["vocab"],
    )
