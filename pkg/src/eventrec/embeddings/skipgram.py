"""
Skip-gram with negative sampling (SGNS) over walk corpora.

For a center token with input vector ``u``, a context token with output
vector ``v`` and sampled negatives ``n_1..n_k`` the minimized loss is::

    -log sigmoid(u . v) - sum_i log sigmoid(-u . n_i)

Negatives are drawn from the unigram distribution raised to 0.75. The
learning rate decays linearly from ``initial_lr`` to ``initial_lr * 1e-4``
over all center tokens of all epochs.

With ``workers=1`` training is sequential and bit-reproducible for a fixed
seed. ``workers > 1`` runs lock-free parallel updates over walks; results then
depend on thread scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .table import EmbeddingTable

MIN_LR_FRACTION = 1e-4
UNIGRAM_POWER = 0.75


@dataclass(frozen=True)
class EmbedConfig:
    dim: int = 128
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("window, negatives and epochs must be >= 1")
        if not self.initial_lr > 0:
            raise ValueError("initial_lr must be positive")


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def pair_objective(u, v, negs):
    """Loss and gradients of one (center, context, negatives) term.

    Parameters
    ----------
    u : array, shape (d,)
        Input vector of the center token.
    v : array, shape (d,)
        Output vector of the context token.
    negs : array, shape (k, d)
        Output vectors of the negative samples.

    Returns
    -------
    loss : float
    grad_u, grad_v, grad_negs : arrays shaped like the inputs
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    negs = np.atleast_2d(np.asarray(negs, dtype=float))
    s_pos = _sigmoid(u @ v)
    s_neg = _sigmoid(negs @ u)
    loss = -np.log(s_pos) - np.sum(np.log1p(-s_neg))
    grad_u = (s_pos - 1.0) * v + s_neg @ negs
    grad_v = (s_pos - 1.0) * u
    grad_negs = s_neg[:, None] * u[None, :]
    return float(loss), grad_u, grad_v, grad_negs


@njit(cache=True, fastmath=True)
def _step(w_in, w_out, center, context, negs, lr, grad_u):
    u = w_in[center]
    dim = u.shape[0]
    grad_u[:] = 0.0
    v = w_out[context]
    f = 0.0
    for d in range(dim):
        f += u[d] * v[d]
    s = 1.0 / (1.0 + math.exp(-f))
    loss = -math.log(s)
    g = s - 1.0
    for d in range(dim):
        grad_u[d] += g * v[d]
        v[d] -= lr * g * u[d]
    for k in range(negs.shape[0]):
        n = negs[k]
        if n < 0:
            continue
        v = w_out[n]
        f = 0.0
        for d in range(dim):
            f += u[d] * v[d]
        s = 1.0 / (1.0 + math.exp(-f))
        loss -= math.log1p(-s)
        for d in range(dim):
            grad_u[d] += s * v[d]
            v[d] -= lr * s * u[d]
    for d in range(dim):
        u[d] -= lr * grad_u[d]
    return loss


@njit(cache=True)
def sgd_step(w_in, w_out, center, context, negs, lr):
    """In-place SGD step on one pair; negative ids < 0 are skipped. Returns the loss."""
    return _step(w_in, w_out, center, context, negs, lr, np.empty(w_in.shape[1]))


@njit(cache=True)
def _draw_negatives(cum, context, negs):
    vocab = cum.shape[0]
    for k in range(negs.shape[0]):
        n = np.searchsorted(cum, np.random.random(), side="right")
        if n >= vocab:
            n = vocab - 1
        negs[k] = -1 if n == context else n


@njit(cache=True)
def _train_serial(tokens, offsets, w_in, w_out, cum, window, negatives, epochs, lr0, seed):
    np.random.seed(seed)
    n_walks = offsets.shape[0] - 1
    total = epochs * tokens.shape[0]
    lr_min = lr0 * MIN_LR_FRACTION
    negs = np.empty(negatives, dtype=np.int64)
    grad_u = np.empty(w_in.shape[1])
    done = 0
    loss = 0.0
    for _ in range(epochs):
        for w in range(n_walks):
            a = offsets[w]
            b = offsets[w + 1]
            for i in range(a, b):
                lr = lr0 - (lr0 - lr_min) * done / total
                lo = max(a, i - window)
                hi = min(b, i + window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    _draw_negatives(cum, tokens[j], negs)
                    loss += _step(w_in, w_out, tokens[i], tokens[j], negs, lr, grad_u)
                done += 1
    return loss


@njit(cache=True, parallel=True)
def _train_parallel(tokens, offsets, w_in, w_out, cum, window, negatives, epochs, lr0, seed):
    np.random.seed(seed)
    n_walks = offsets.shape[0] - 1
    lr_min = lr0 * MIN_LR_FRACTION
    for ep in range(epochs):
        for w in prange(n_walks):
            negs = np.empty(negatives, dtype=np.int64)
            grad_u = np.empty(w_in.shape[1])
            progress = (ep * n_walks + w) / (epochs * n_walks)
            lr = lr0 - (lr0 - lr_min) * progress
            a = offsets[w]
            b = offsets[w + 1]
            for i in range(a, b):
                lo = max(a, i - window)
                hi = min(b, i + window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    _draw_negatives(cum, tokens[j], negs)
                    _step(w_in, w_out, tokens[i], tokens[j], negs, lr, grad_u)
    return 0.0


def negative_table(counts):
    """Cumulative sampling distribution proportional to ``counts ** 0.75``."""
    p = np.asarray(counts, dtype=float) ** UNIGRAM_POWER
    cum = np.cumsum(p / p.sum())
    cum[-1] = 1.0
    return cum


def encode_corpus(corpus):
    """Vocabulary (sorted ids), flat token array, walk offsets and token counts."""
    vocab = sorted({tok for walk in corpus for tok in walk})
    index = {tok: i for i, tok in enumerate(vocab)}
    tokens = np.fromiter((index[t] for walk in corpus for t in walk), dtype=np.int64)
    offsets = np.zeros(len(corpus) + 1, dtype=np.int64)
    np.cumsum([len(w) for w in corpus], out=offsets[1:])
    counts = np.bincount(tokens, minlength=len(vocab))
    return vocab, tokens, offsets, counts


def train_embeddings(corpus, config: EmbedConfig = EmbedConfig(), language: str = "", workers: int = 1) -> EmbeddingTable:
    """Train SGNS vectors on a walk corpus and return the input vectors."""
    if not corpus:
        raise ValueError("empty corpus")
    vocab, tokens, offsets, counts = encode_corpus(corpus)
    if len(vocab) < 2:
        raise ValueError("vocabulary needs at least 2 distinct tokens")
    rng = np.random.default_rng(config.seed)
    w_in = (rng.random((len(vocab), config.dim)) - 0.5) / config.dim
    w_out = np.zeros((len(vocab), config.dim))
    cum = negative_table(counts)
    args = (tokens, offsets, w_in, w_out, cum, config.window, config.negatives,
            config.epochs, float(config.initial_lr), int(config.seed) % (2**32))
    if workers > 1:
        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
        _train_parallel(*args)
    else:
        _train_serial(*args)
    return EmbeddingTable(language, vocab, w_in)
