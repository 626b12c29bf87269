"""Deterministic synthetic tasks probing long-range dependencies at desk scale.

Every generator is a pure function of the Rng it is handed, so an instance
stream is fully determined by (task id, seed, index); the training driver
derives one Rng per index.  Task ids: ``adding``, ``copy``, ``toysent``,
``charlm``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Iterator, Optional

import numpy as np

from .tensor import Rng

MIN_CORPUS_BYTES = 10_000


@dataclass
class TaskInstance:
    target: np.ndarray | int
    X: Optional[np.ndarray] = None    # (n, d_in) real-valued inputs
    ids: Optional[np.ndarray] = None  # (n,) token ids
    meta: dict = field(default_factory=dict)


# -----------------------------------------------------------------------------
# Adding problem
# -----------------------------------------------------------------------------


def gen_adding(n: int, rng: Rng) -> TaskInstance:
    """Two-channel sequence: values in [0,1] plus two markers, one per half.

    The target is the sum of the two marked values.  Predicting the constant
    1.0 gives expected MSE 1/6, the trivial baseline any model must beat.
    """
    if n < 2:
        raise ValueError("adding task needs n >= 2")
    values = rng.uniform(0.0, 1.0, (n,))
    i1 = int(rng.integers(0, n // 2))
    i2 = int(rng.integers(n // 2, n))
    X = np.zeros((n, 2))
    X[:, 0] = values
    X[i1, 1] = 1.0
    X[i2, 1] = 1.0
    target = np.array([values[i1] + values[i2]])
    return TaskInstance(target=target, X=X, meta={"marks": (i1, i2)})


def one_hot(ids: np.ndarray, width: int) -> np.ndarray:
    """Token ids to one-hot rows; training composes this with a learned table
    (an embedding lookup is exactly one_hot(ids) @ table)."""
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= width):
        raise ValueError(f"token id out of range for width {width}")
    out = np.zeros(ids.shape + (width,))
    np.put_along_axis(out, ids[..., None], 1.0, axis=-1)
    return out


# -----------------------------------------------------------------------------
# Copy task
# -----------------------------------------------------------------------------


def gen_copy(n: int, k: int, alphabet: int, rng: Rng) -> TaskInstance:
    """Recall k symbols after n blanks: payload, blanks, cue, then k blanks.

    Token ids: 0..alphabet-1 are symbols, ``alphabet`` is blank,
    ``alphabet + 1`` is the recall cue; vocabulary size is alphabet + 2.
    The target is the payload, to be emitted at the final k positions.
    """
    if k < 1 or alphabet < 2:
        raise ValueError("copy task needs k >= 1 and alphabet >= 2")
    blank, cue = alphabet, alphabet + 1
    payload = rng.integers(0, alphabet, (k,))
    ids = np.concatenate([payload, np.full(n, blank), [cue], np.full(k, blank)])
    return TaskInstance(target=payload.copy(), ids=ids, meta={"payload_len": k})


# -----------------------------------------------------------------------------
# Toy sentiment
# -----------------------------------------------------------------------------

POSITIVE_WORDS = ("great", "wonderful", "superb", "excellent",
                  "delightful", "brilliant", "charming", "marvelous")
NEGATIVE_WORDS = ("terrible", "awful", "dreadful", "horrid",
                  "boring", "tedious", "dismal", "clumsy")
FILLER_WORDS = (
    "the", "a", "an", "this", "that", "it", "is", "was", "movie", "film",
    "story", "plot", "acting", "scene", "script", "ending", "cast", "show",
    "drama", "piece", "one", "really", "very", "quite", "rather", "just",
    "so", "too", "been", "felt", "seemed", "looked", "overall", "honestly",
    "frankly", "certainly", "watched", "saw", "found", "thought", "kind",
    "sort", "bit", "night", "again", "today", "yesterday", "friends",
)
VOCAB = POSITIVE_WORDS + NEGATIVE_WORDS + FILLER_WORDS
WORD_TO_ID = {w: i for i, w in enumerate(VOCAB)}

SENTIMENT_LENGTH = 10


def gen_toy_sentiment(rng: Rng, length: int = SENTIMENT_LENGTH) -> TaskInstance:
    """Filler sentence with exactly one salient word that decides the label.

    Label 1 when the salient word is positive, 0 when negative.  The salient
    position is uniform, so labels are balanced by construction.
    """
    label = int(rng.integers(0, 2))
    salient_pool = POSITIVE_WORDS if label == 1 else NEGATIVE_WORDS
    salient = salient_pool[int(rng.integers(0, len(salient_pool)))]
    pos = int(rng.integers(0, length))
    filler_ids = rng.integers(0, len(FILLER_WORDS), (length,)) + len(POSITIVE_WORDS) + len(NEGATIVE_WORDS)
    ids = filler_ids.copy()
    ids[pos] = WORD_TO_ID[salient]
    tokens = [VOCAB[i] for i in ids]
    return TaskInstance(target=label, ids=ids,
                        meta={"salient_pos": pos, "salient": salient, "tokens": tokens})


def tokenize_sentiment(text: str) -> np.ndarray:
    """Whitespace tokenizer over the fixed vocabulary; unknown words fail."""
    words = text.lower().split()
    unknown = [w for w in words if w not in WORD_TO_ID]
    if unknown:
        raise ValueError(f"words outside the 64-word vocabulary: {unknown}")
    return np.asarray([WORD_TO_ID[w] for w in words])


# -----------------------------------------------------------------------------
# Byte-level language modeling
# -----------------------------------------------------------------------------


def load_corpus(path: Optional[str] = None) -> bytes:
    """Bundled public-domain text (or any file given explicitly)."""
    if path is not None:
        with open(path, "rb") as fh:
            corpus = fh.read()
    else:
        corpus = resources.files("lrn").joinpath("data/corpus.txt").read_bytes()
    if len(corpus) < MIN_CORPUS_BYTES:
        raise ValueError(f"corpus too small: {len(corpus)} bytes < {MIN_CORPUS_BYTES}")
    return corpus


def split_corpus(corpus: bytes, eval_fraction: float = 0.1) -> tuple[bytes, bytes]:
    """Head/tail split for train vs held-out evaluation."""
    cut = int(len(corpus) * (1.0 - eval_fraction))
    return corpus[:cut], corpus[cut:]


def gen_charlm_window(corpus: bytes, n: int, rng: Rng) -> TaskInstance:
    """Random window: n input bytes, each labeled with the following byte."""
    if len(corpus) < n + 1:
        raise ValueError(f"corpus shorter than window: {len(corpus)} < {n + 1}")
    off = int(rng.integers(0, len(corpus) - n))
    buf = np.frombuffer(corpus, dtype=np.uint8)
    ids = buf[off:off + n].astype(np.int64)
    target = buf[off + 1:off + n + 1].astype(np.int64)
    return TaskInstance(target=target, ids=ids, meta={"offset": off})


def charlm_windows(corpus: bytes, n: int) -> Iterator[TaskInstance]:
    """Deterministic non-overlapping windows whose inputs tile the corpus."""
    buf = np.frombuffer(corpus, dtype=np.uint8)
    for off in range(0, len(corpus) - n, n):
        yield TaskInstance(target=buf[off + 1:off + n + 1].astype(np.int64),
                           ids=buf[off:off + n].astype(np.int64),
                           meta={"offset": off})


def charlm_batches(corpus: bytes, n: int, batch: int, rng: Rng) -> Iterator[list[TaskInstance]]:
    """Endless stream of random-window batches (index-deterministic)."""
    if len(corpus) < MIN_CORPUS_BYTES:
        raise ValueError(f"corpus too small: {len(corpus)} bytes < {MIN_CORPUS_BYTES}")
    index = 0
    while True:
        yield [gen_charlm_window(corpus, n, rng.derive(index + j)) for j in range(batch)]
        index += batch
