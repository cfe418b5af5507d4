"""Symbol-level Max-Log-MAP decoding on the fully connected q-state trellis."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .code import Trellis
from .mapping import BpskImage, Constellation

NEG_INF = -np.inf


@dataclass(frozen=True)
class BranchMetrics:
    """Per-stage metrics.

    Either symbol-level (``gamma_s``/``gamma_p`` of shape (N, q), indexed by the
    symbol labelling an edge) or edge-level (shape (N, q, q), indexed
    ``[stage, from_state, to_state]``).
    """

    gamma_s: np.ndarray
    gamma_p: np.ndarray

    @property
    def n_stages(self) -> int:
        return self.gamma_s.shape[0]

    @property
    def edge_level(self) -> bool:
        return self.gamma_s.ndim == 3

    def on(self, trellis: Trellis) -> np.ndarray:
        """Total edge metric, shape (N, q, q)."""
        if self.edge_level:
            return self.gamma_s + self.gamma_p
        return self.gamma_s[:, trellis.systematic] + self.gamma_p[:, trellis.parity]


def symbol_metrics(rx: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Negative squared distance of every observation to every symbol point."""
    rx = np.asarray(rx)
    return -np.abs(rx[..., None] - points) ** 2


def branch_metrics(received_sys, received_par, constellation: Constellation,
                   noise_variance: float) -> BranchMetrics:
    """Unscaled negative squared distances; ``noise_variance`` is validated only
    since max-based recursions are invariant to a common positive scale."""
    if not noise_variance > 0:
        raise ValueError("noise variance must be positive")
    pts = constellation.complex_points()
    return BranchMetrics(symbol_metrics(received_sys, pts), symbol_metrics(received_par, pts))


def bpsk_branch_metrics(received_sys, received_par, image: BpskImage,
                        noise_variance: float) -> BranchMetrics:
    """Metrics for symbols sent as m antipodal values; inputs have shape (N, m)."""
    if not noise_variance > 0:
        raise ValueError("noise variance must be positive")
    s = image.signs  # (q, m)

    def met(r):
        r = np.asarray(r, dtype=float)
        return -((r[..., None, :] - s) ** 2).sum(-1)

    return BranchMetrics(met(received_sys), met(received_par))


@dataclass
class SymbolPosteriors:
    L: np.ndarray  # (N, q)
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None

    def hard(self) -> np.ndarray:
        return np.argmax(self.L, axis=-1)


def _input_index(trellis: Trellis) -> np.ndarray:
    """nxt[j, u]: state reached from j with input u."""
    q = trellis.q
    return np.arange(q)[None, :] ^ trellis.field.mul_table[trellis.code.a1][:, None]


def max_log_map_decode(trellis: Trellis, metrics: BranchMetrics, terminated: bool = False,
                       normalize: bool = False):
    """Forward/backward max recursions and per-stage symbol log-metrics.

    Returns ``(SymbolPosteriors, hard_decisions)``; ties resolve to the lowest
    symbol value.
    """
    g = metrics.on(trellis)
    L, alpha, beta = _decode_arrays(trellis, g[None], terminated, normalize)
    post = SymbolPosteriors(L[0], alpha[0], beta[0])
    return post, post.hard()


def _decode_arrays(trellis: Trellis, g: np.ndarray, terminated: bool, normalize: bool):
    """Batched core on edge metrics of shape (F, N, q, q)."""
    F, N, q, _ = g.shape
    alpha = np.full((F, N + 1, q), NEG_INF)
    alpha[:, 0, 0] = 0.0
    for i in range(N):
        a = (alpha[:, i, :, None] + g[:, i]).max(axis=1)
        if normalize:
            a -= a.max(axis=1, keepdims=True)
        alpha[:, i + 1] = a
    beta = np.full((F, N + 1, q), NEG_INF)
    if terminated:
        beta[:, N, 0] = 0.0
    else:
        beta[:, N, :] = 0.0
    for i in range(N - 1, -1, -1):
        b = (beta[:, i + 1, None, :] + g[:, i]).max(axis=2)
        if normalize:
            b -= b.max(axis=1, keepdims=True)
        beta[:, i] = b
    nxt = _input_index(trellis)
    rows = np.arange(q)[:, None]
    # (F, N, j, u): alpha_i(j) + gamma_i(j, nxt[j,u]) + beta_{i+1}(nxt[j,u])
    t = alpha[:, :N, :, None] + g[:, :, rows, nxt] + beta[:, 1:, nxt]
    L = t.max(axis=2)
    return L, alpha, beta


def decode_batch(trellis: Trellis, metrics_s: np.ndarray, metrics_p: np.ndarray,
                 terminated: bool = False, normalize: bool = False) -> np.ndarray:
    """Hard decisions for a batch of frames given symbol-level metrics (F, N, q)."""
    g = metrics_s[:, :, trellis.systematic] + metrics_p[:, :, trellis.parity]
    L, _, _ = _decode_arrays(trellis, g, terminated, normalize)
    return np.argmax(L, axis=-1)


def brute_force_oracle(trellis: Trellis, metrics: BranchMetrics, terminated: bool = False,
                       limit: int = 10 ** 6) -> SymbolPosteriors:
    """Score every input sequence's path and take per-stage per-symbol maxima."""
    g = metrics.on(trellis)
    N, q = g.shape[0], trellis.q
    if q ** N > limit:
        raise ValueError(f"q^N = {q ** N} exceeds the enumeration limit {limit}")
    L = np.full((N, q), NEG_INF)
    for inputs in itertools.product(range(q), repeat=N):
        state = 0
        score = 0.0
        for i, u in enumerate(inputs):
            nxt = trellis.next_state(state, u)
            score += g[i, state, nxt]
            state = nxt
        if terminated and state != 0:
            continue
        for i, u in enumerate(inputs):
            if score > L[i, u]:
                L[i, u] = score
    return SymbolPosteriors(L)
