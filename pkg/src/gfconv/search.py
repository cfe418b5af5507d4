"""Exhaustive coefficient search and the mapping-versus-coefficients counting argument."""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .code import CodeCoefficients, build_trellis
from .gf import FieldSpec
from .mapping import Constellation, permute_mapping
from .spectrum import DistanceSpectrum, _d1_kernel, _tables, compute_spectrum


def valid_triples(f: FieldSpec) -> list[tuple[int, int, int]]:
    """All (a1, a2, a3) with a1, a2 != 0 and a1*a2 + a3 != 0, ascending."""
    return [(a1, a2, a3) for a1 in range(1, f.q) for a2 in range(1, f.q)
            for a3 in range(f.q) if a3 != f.mul(a1, a2)]


def rank_key(triple, spec: DistanceSpectrum):
    return (-spec.d1_num, spec.n1, -spec.d2_num, spec.n2, triple)


@dataclass
class SearchReport:
    field: FieldSpec
    scale_sq: int
    ranked: list[tuple[tuple[int, int, int], DistanceSpectrum]]
    space_size: int
    shortlist_size: int
    d1_threshold: int
    elapsed: dict = field(default_factory=dict)

    @property
    def best(self) -> DistanceSpectrum:
        return self.ranked[0][1]

    def top_class(self):
        """All triples sharing the best (d1, n1, d2, n2)."""
        k = self.best.key()
        return [t for t, s in self.ranked if s.key() == k]

    def max_d1_class(self):
        d = self.best.d1_num
        return [t for t, s in self.ranked if s.d1_num == d]

    def rows(self):
        for (a1, a2, a3), s in self.ranked:
            yield {"a1": a1, "a2": a2, "a3": a3, "d1_num": s.d1_num, "n1": s.n1,
                   "d2_num": s.d2_num, "n2": s.n2, "scale_sq": s.scale_sq}

    def to_dict(self) -> dict:
        return {
            "field": self.field.to_dict(),
            "scale_sq": self.scale_sq,
            "space_size": self.space_size,
            "shortlist_size": self.shortlist_size,
            "d1_threshold": self.d1_threshold,
            "elapsed": self.elapsed,
            "rows": list(self.rows()),
        }


class _TopBound:
    """Running ``top``-th largest exact d1; monotone, so stale reads are safe."""

    def __init__(self, top: int):
        self.top = top
        self.heap: list[int] = []
        self.value = 0
        self.lock = threading.Lock()

    def offer(self, d: int) -> None:
        with self.lock:
            if len(self.heap) < self.top:
                heapq.heappush(self.heap, d)
            elif d > self.heap[0]:
                heapq.heapreplace(self.heap, d)
            if len(self.heap) == self.top:
                self.value = self.heap[0]


def _chunks(seq, n):
    for i in range(0, len(seq), n):
        yield seq[i:i + n]


def search_codes(f: FieldSpec, c: Constellation, top: int = 1, threads: int = 1,
                 triples=None, progress=None) -> SearchReport:
    """Two-phase search ranking codes by (max d1, min n1, max d2, min n2).

    Phase 1 finds d1 for every triple with pruning against the running
    ``top``-th best value; phase 2 computes full spectra for every triple whose
    d1 reaches the final threshold (so ties are never dropped).
    """
    if f.q != c.q:
        raise ValueError("field and constellation orders differ")
    t0 = time.perf_counter()
    triples = list(valid_triples(f)) if triples is None else [tuple(t) for t in triples]
    D = np.ascontiguousarray(c.distance_table, dtype=np.int64)
    dmin = c.min_distance_num
    bound = _TopBound(max(1, top))
    mt = f.mul_table
    states = np.arange(f.q)

    def phase1(chunk):
        out = []
        for a1, a2, a3 in chunk:
            sysl = np.ascontiguousarray(states[None, :] ^ mt[a1][:, None])
            par = np.ascontiguousarray(mt[a2][None, :] ^ mt[a3][:, None])
            b0 = bound.value
            r = int(_d1_kernel(sysl, par, D, b0, dmin))
            if r >= b0:
                bound.offer(r)
                out.append(((a1, a2, a3), r))
        if progress:
            progress(len(chunk))
        return out

    exact: list[tuple[tuple[int, int, int], int]] = []
    chunks = list(_chunks(triples, 256))
    if threads <= 1:
        for ch in chunks:
            exact.extend(phase1(ch))
    else:
        with ThreadPoolExecutor(threads) as ex:
            for res in ex.map(phase1, chunks):
                exact.extend(res)
    values = sorted((d for _, d in exact), reverse=True)
    threshold = values[min(len(values), bound.top) - 1]
    shortlist = sorted(t for t, d in exact if d >= threshold)
    t1 = time.perf_counter()

    def phase2(t):
        return t, compute_spectrum(CodeCoefficients(f, *t), c)

    if threads <= 1:
        specs = [phase2(t) for t in shortlist]
    else:
        with ThreadPoolExecutor(threads) as ex:
            specs = list(ex.map(phase2, shortlist))
    specs.sort(key=lambda ts: rank_key(*ts))
    t2 = time.perf_counter()
    return SearchReport(f, c.scale_sq, specs, len(triples), len(shortlist), threshold,
                        {"phase1_s": round(t1 - t0, 3), "phase2_s": round(t2 - t1, 3)})


def full_ranking(f: FieldSpec, c: Constellation) -> list[tuple[tuple[int, int, int], DistanceSpectrum]]:
    """Spectrum of every valid triple, ranked. Small fields only."""
    out = [(t, compute_spectrum(build_trellis(CodeCoefficients(f, *t)), c)) for t in valid_triples(f)]
    out.sort(key=lambda ts: rank_key(*ts))
    return out


@dataclass(frozen=True)
class SearchSpaceCounts:
    q: int
    n_mu: int
    n_a: int
    delta_n: int
    mapping_factor: int  # (C(q,2)+1)^2 - 1
    coefficient_factor: int  # C(q^2, 2)
    common_factor: int  # C(q,2)^4

    @property
    def closed_form(self) -> int:
        q = self.q
        return q * (q - 1) ** 2 * (q + 4) // 4

    @property
    def identity_holds(self) -> bool:
        q = self.q
        return (self.delta_n == self.closed_form
                and 4 * self.delta_n == q * (q - 1) ** 2 * (q + 4)
                and self.n_a - self.n_mu == self.delta_n * self.common_factor)


def search_space_counts(q: int) -> SearchSpaceCounts:
    """Distinct cumulated-distance counts when varying the mapping vs the coefficients."""
    if q < 2:
        raise ValueError("q must be >= 2")
    c2 = comb(q, 2)
    mapping_factor = (c2 + 1) ** 2 - 1
    coeff_factor = comb(q * q, 2)
    common = c2 ** 4
    return SearchSpaceCounts(q, mapping_factor * common, coeff_factor * common,
                             coeff_factor - mapping_factor, mapping_factor, coeff_factor, common)


@dataclass
class InvarianceReport:
    invariant: bool
    best_by_mapping: dict
    per_code_changes: list  # triples whose own spectrum depends on the mapping

    @property
    def distinct_best(self) -> set:
        return set(self.best_by_mapping.values())


def mapping_invariance_check(f: FieldSpec, c: Constellation) -> InvarianceReport:
    """Best-over-codes spectrum for every one of the q! symbol-to-point maps."""
    if f.q > 8:
        raise ValueError(f"q={f.q} too large for a q! mapping sweep (max 8)")
    best = {}
    per_code: dict = {}
    for perm in itertools.permutations(range(f.q)):
        cp = permute_mapping(c, perm)
        ranking = full_ranking(f, cp)
        best[perm] = ranking[0][1].key()
        for t, s in ranking:
            per_code.setdefault(t, set()).add(s.key())
    changed = sorted(t for t, ks in per_code.items() if len(ks) > 1)
    return InvarianceReport(len(set(best.values())) == 1, best, changed)
