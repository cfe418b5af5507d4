"""Truncated Euclidean distance spectrum of one-memory codes mapped onto a constellation.

Pairs of trellis paths that leave a common state, stay apart for L-1 steps and
meet again (DC pairs) are enumerated for L = 2 and L = 3. The cumulated squared
distance of a pair splits into independent per-section terms:

    diverging section   F(a, a' | s)      depends on the start state s
    middle section      M(a, a' -> b, b')  (only for L = 3)
    converging section  G(b, b' | t)      depends on the end state t

so for fixed interior states the sum over (s, t) is a sum of two independent
histograms. Interior state pairs whose lower bound ``min F + M + min G``
already exceeds the running second distance are skipped.

All distances are integer numerators over the constellation's ``scale_sq``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit
from scipy.stats import norm

from .code import CodeCoefficients, Trellis, build_trellis
from .mapping import Constellation

BIG = 1 << 40
UNORDERED = "unordered"
ORDERED = "ordered"


@dataclass(frozen=True)
class DistanceSpectrum:
    """First two distinct cumulated squared distances and their pair counts.

    ``n1_by_length``/``n2_by_length`` split the counts over DC lengths (2, 3).
    """

    d1_num: int
    n1: int
    d2_num: int
    n2: int
    scale_sq: int
    convention: str = UNORDERED
    n1_by_length: tuple[int, int] = field(default=(0, 0), compare=False)
    n2_by_length: tuple[int, int] = field(default=(0, 0), compare=False)

    @property
    def d1_sq(self) -> Fraction:
        return Fraction(self.d1_num, self.scale_sq)

    @property
    def d2_sq(self) -> Fraction:
        return Fraction(self.d2_num, self.scale_sq)

    def key(self) -> tuple[int, int, int, int]:
        return (self.d1_num, self.n1, self.d2_num, self.n2)

    def to_dict(self) -> dict:
        return {
            "d1_num": self.d1_num,
            "d2_num": self.d2_num,
            "scale_sq": self.scale_sq,
            "n1": self.n1,
            "n2": self.n2,
            "convention": self.convention,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DistanceSpectrum":
        return cls(int(d["d1_num"]), int(d["n1"]), int(d["d2_num"]), int(d["n2"]),
                   int(d["scale_sq"]), d.get("convention", UNORDERED))

    def as_ordered(self) -> "DistanceSpectrum":
        if self.convention == ORDERED:
            return self
        return DistanceSpectrum(self.d1_num, 2 * self.n1, self.d2_num, 2 * self.n2, self.scale_sq,
                                ORDERED, tuple(2 * n for n in self.n1_by_length),
                                tuple(2 * n for n in self.n2_by_length))


@dataclass(frozen=True)
class DcPair:
    """Two state paths ``states1``/``states2`` (L+1 states each)."""

    states1: tuple[int, ...]
    states2: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.states1) - 1

    def is_valid(self) -> bool:
        s1, s2 = self.states1, self.states2
        if len(s1) != len(s2) or len(s1) < 3:
            return False
        return s1[0] == s2[0] and s1[-1] == s2[-1] and all(x != y for x, y in zip(s1[1:-1], s2[1:-1]))


def cumulated_distance_num(trellis: Trellis, c: Constellation, pair: DcPair) -> int:
    D = c.distance_table
    sy, pa = trellis.systematic, trellis.parity
    total = 0
    for (x0, x1), (y0, y1) in zip(zip(pair.states1, pair.states1[1:]), zip(pair.states2, pair.states2[1:])):
        total += int(D[sy[x0, x1], sy[y0, y1]]) + int(D[pa[x0, x1], pa[y0, y1]])
    return total


def cumulated_distance(trellis: Trellis, c: Constellation, pair: DcPair) -> Fraction:
    return Fraction(cumulated_distance_num(trellis, c, pair), c.scale_sq)


# --------------------------------------------------------------------------- kernels


@njit(nogil=True, cache=True)
def _section_tables(sysl, par, D):
    """div[a, b, s]: distance between s->a and s->b; conv[a, b, t]: a->t vs b->t."""
    q = sysl.shape[0]
    div = np.empty((q, q, q), np.int64)
    conv = np.empty((q, q, q), np.int64)
    for a in range(q):
        for b in range(q):
            for s in range(q):
                div[a, b, s] = D[sysl[s, a], sysl[s, b]] + D[par[s, a], par[s, b]]
                conv[a, b, s] = D[sysl[a, s], sysl[b, s]] + D[par[a, s], par[b, s]]
    return div, conv


@njit(nogil=True, cache=True)
def _min_and_next(tab):
    """Per row minimum and gap to the next distinct value (BIG if none)."""
    q = tab.shape[0]
    mn = np.full((q, q), BIG, np.int64)
    gap = np.full((q, q), BIG, np.int64)
    for a in range(q):
        for b in range(q):
            if a == b:
                continue
            m1 = BIG
            for s in range(q):
                if tab[a, b, s] < m1:
                    m1 = tab[a, b, s]
            m2 = BIG
            for s in range(q):
                v = tab[a, b, s]
                if m1 < v < m2:
                    m2 = v
            mn[a, b] = m1
            if m2 < BIG:
                gap[a, b] = m2 - m1
    return mn, gap


@njit(nogil=True, cache=True)
def _offset_hist(tab, mn, width):
    q = tab.shape[0]
    h = np.zeros((q, q, width + 1), np.int64)
    for a in range(q):
        for b in range(q):
            if a == b:
                continue
            for s in range(q):
                k = tab[a, b, s] - mn[a, b]
                if k <= width:
                    h[a, b, k] += 1
    return h


@njit(nogil=True, cache=True)
def _push(d1, d2, v):
    if v < d1:
        return v, d1
    if d1 < v < d2:
        return d1, v
    return d1, d2


@njit(nogil=True, cache=True)
def _spectrum_kernel(sysl, par, D, dmin):
    q = sysl.shape[0]
    div, conv = _section_tables(sysl, par, D)
    fmin, fgap = _min_and_next(div)
    gmin, ggap = _min_and_next(conv)
    gall = BIG
    for a in range(q):
        for b in range(q):
            if a != b and gmin[a, b] < gall:
                gall = gmin[a, b]

    # pass 1: two smallest distinct distances
    d1 = BIG
    d2 = BIG
    for a in range(q):
        for a2 in range(a + 1, q):
            lb = fmin[a, a2] + gmin[a, a2]
            d1, d2 = _push(d1, d2, lb)
            d1, d2 = _push(d1, d2, lb + min(fgap[a, a2], ggap[a, a2]))
    for a in range(q):
        for a2 in range(a + 1, q):
            fa = fmin[a, a2]
            if fa + dmin + gall > d2:
                continue
            for b in range(q):
                sb = sysl[a, b]
                pb = par[a, b]
                for b2 in range(q):
                    if b2 == b:
                        continue
                    lb = fa + D[sb, sysl[a2, b2]] + D[pb, par[a2, b2]] + gmin[b, b2]
                    if lb > d2:
                        continue
                    d1, d2 = _push(d1, d2, lb)
                    d1, d2 = _push(d1, d2, lb + min(fgap[a, a2], ggap[b, b2]))

    # pass 2: counts at d1 and d2, split by length
    w = d2 - d1
    fh = _offset_hist(div, fmin, w)
    gh = _offset_hist(conv, gmin, w)
    counts = np.zeros((2, 2), np.int64)  # [distance index, length index]
    for a in range(q):
        for a2 in range(a + 1, q):
            lb = fmin[a, a2] + gmin[a, a2]
            for di in range(2):
                off = (d1 if di == 0 else d2) - lb
                if off < 0:
                    continue
                c = 0
                for k in range(off + 1):
                    c += fh[a, a2, k] * gh[a, a2, off - k]
                counts[di, 0] += c
    for a in range(q):
        for a2 in range(a + 1, q):
            fa = fmin[a, a2]
            if fa + dmin + gall > d2:
                continue
            for b in range(q):
                sb = sysl[a, b]
                pb = par[a, b]
                for b2 in range(q):
                    if b2 == b:
                        continue
                    lb = fa + D[sb, sysl[a2, b2]] + D[pb, par[a2, b2]] + gmin[b, b2]
                    if lb > d2:
                        continue
                    for di in range(2):
                        off = (d1 if di == 0 else d2) - lb
                        if off < 0:
                            continue
                        c = 0
                        for k in range(off + 1):
                            c += fh[a, a2, k] * gh[b, b2, off - k]
                        counts[di, 1] += c
    return d1, d2, counts


@njit(nogil=True, cache=True)
def _d1_kernel(sysl, par, D, bound, dmin):
    """Exact minimum distance when it is >= bound; otherwise some value < bound."""
    q = sysl.shape[0]
    fmin = np.full((q, q), BIG, np.int64)
    gmin = np.full((q, q), BIG, np.int64)
    for s in range(q):
        for a in range(q):
            for b in range(a + 1, q):
                v = D[sysl[s, a], sysl[s, b]] + D[par[s, a], par[s, b]]
                if v < fmin[a, b]:
                    fmin[a, b] = v
                    fmin[b, a] = v
                v = D[sysl[a, s], sysl[b, s]] + D[par[a, s], par[b, s]]
                if v < gmin[a, b]:
                    gmin[a, b] = v
                    gmin[b, a] = v
    best = BIG
    gall = BIG
    for a in range(q):
        for b in range(a + 1, q):
            v = fmin[a, b] + gmin[a, b]
            if v < best:
                best = v
            if gmin[a, b] < gall:
                gall = gmin[a, b]
    if best < bound:
        return best
    for a in range(q):
        for a2 in range(a + 1, q):
            fa = fmin[a, a2]
            if fa + dmin + gall >= best:
                continue
            for b in range(q):
                sb = sysl[a, b]
                pb = par[a, b]
                for b2 in range(q):
                    if b2 == b:
                        continue
                    v = fa + D[sb, sysl[a2, b2]] + D[pb, par[a2, b2]] + gmin[b, b2]
                    if v < best:
                        best = v
                        if best < bound:
                            return best
    return best


@njit(nogil=True, cache=True)
def _truncated_kernel(sysl, par, D):
    """Min over three sections of pairs that diverge at step 1 and are apart at step 3."""
    q = sysl.shape[0]
    fmin = np.full((q, q), BIG, np.int64)
    for s in range(q):
        for a in range(q):
            for b in range(q):
                if a != b:
                    v = D[sysl[s, a], sysl[s, b]] + D[par[s, a], par[s, b]]
                    if v < fmin[a, b]:
                        fmin[a, b] = v
    # h[b, b2] = min over (a, a2) of F + M(a, a2 -> b, b2)
    h = np.full((q, q), BIG, np.int64)
    for a in range(q):
        for a2 in range(q):
            if a == a2:
                continue
            fa = fmin[a, a2]
            for b in range(q):
                for b2 in range(q):
                    if b == b2:
                        continue
                    v = fa + D[sysl[a, b], sysl[a2, b2]] + D[par[a, b], par[a2, b2]]
                    if v < h[b, b2]:
                        h[b, b2] = v
    best = BIG
    for b in range(q):
        for b2 in range(q):
            if b == b2:
                continue
            hb = h[b, b2]
            for c in range(q):
                for c2 in range(q):
                    if c == c2:
                        continue
                    v = hb + D[sysl[b, c], sysl[b2, c2]] + D[par[b, c], par[b2, c2]]
                    if v < best:
                        best = v
    return best


# --------------------------------------------------------------------------- API


def _tables(code_or_trellis, c: Constellation):
    t = code_or_trellis if isinstance(code_or_trellis, Trellis) else build_trellis(code_or_trellis)
    if t.q != c.q:
        raise ValueError(f"code over GF({t.q}) cannot use a {c.q}-point constellation")
    D = np.ascontiguousarray(c.distance_table, dtype=np.int64)
    return (np.ascontiguousarray(t.systematic, dtype=np.int64),
            np.ascontiguousarray(t.parity, dtype=np.int64), D)


def compute_spectrum(code: CodeCoefficients | Trellis, c: Constellation,
                     convention: str = UNORDERED) -> DistanceSpectrum:
    """d1, n(d1), d2, n(d2) over all length-2 and length-3 DC pairs.

    Counts unordered pairs summed over every start and end state; pass
    ``convention="ordered"`` to double them.
    """
    sysl, par, D = _tables(code, c)
    d1, d2, counts = _spectrum_kernel(sysl, par, D, c.min_distance_num)
    n1 = tuple(int(x) for x in counts[0])
    n2 = tuple(int(x) for x in counts[1])
    spec = DistanceSpectrum(int(d1), sum(n1), int(d2), sum(n2), c.scale_sq, UNORDERED, n1, n2)
    if convention == ORDERED:
        return spec.as_ordered()
    if convention != UNORDERED:
        raise ValueError(f"unknown convention {convention!r}")
    return spec


def min_distance_num(code: CodeCoefficients | Trellis, c: Constellation, bound: int = 0) -> int:
    """Exact d1 numerator if it is >= ``bound``, else any value below ``bound``."""
    sysl, par, D = _tables(code, c)
    return int(_d1_kernel(sysl, par, D, int(bound), c.min_distance_num))


def verify_truncation(code: CodeCoefficients | Trellis, c: Constellation) -> Fraction:
    """Smallest 3-section distance among pairs still unmerged after three steps."""
    sysl, par, D = _tables(code, c)
    return Fraction(int(_truncated_kernel(sysl, par, D)), c.scale_sq)


def naive_spectrum(code: CodeCoefficients | Trellis, c: Constellation, lengths=(2, 3)) -> dict[int, int]:
    """Distance -> unordered pair count by walking every DC pair explicitly.

    Test oracle; only practical for q <= 16 (q^6 state tuples at L = 3).
    """
    t = code if isinstance(code, Trellis) else build_trellis(code)
    q = t.q
    hist: dict[int, int] = {}
    for L in lengths:
        for start in range(q):
            for end in range(q):
                interiors = list(itertools.product(range(q), repeat=L - 1))
                for i, mid1 in enumerate(interiors):
                    for mid2 in interiors[i + 1:]:
                        if any(x == y for x, y in zip(mid1, mid2)):
                            continue
                        pair = DcPair((start, *mid1, end), (start, *mid2, end))
                        d = cumulated_distance_num(t, c, pair)
                        hist[d] = hist.get(d, 0) + 1
    return hist


def union_bound_ser(spectrum: DistanceSpectrum, es_n0_db: float, q: int) -> float:
    """Two-term truncated union estimate of the symbol error rate.

    Each DC pair at squared distance d contributes Q(sqrt(d / (2 N0))) weighted by
    the probability of its reference path (q^-(L+1) including the start state),
    both orientations, and L erroneous symbols.
    """
    n0 = 10.0 ** (-es_n0_db / 10.0)
    if n0 == 0.0:
        return 0.0
    est = 0.0
    for d_num, by_len in ((spectrum.d1_num, spectrum.n1_by_length), (spectrum.d2_num, spectrum.n2_by_length)):
        if not any(by_len):
            by_len = (0, spectrum.n1 if d_num == spectrum.d1_num else spectrum.n2)
        d = d_num / spectrum.scale_sq
        pep = float(norm.sf(math.sqrt(d / (2.0 * n0))))
        factor = 1 if spectrum.convention == ORDERED else 2
        for L, n in zip((2, 3), by_len):
            est += L * factor * n / q ** (L + 1) * pep
    return est


@njit(nogil=True, cache=True)
def _profile_kernel(sysl, par, D, max_len):
    q = sysl.shape[0]
    out = np.full(max_len + 1, BIG, np.int64)
    v = np.full((q, q), BIG, np.int64)
    gmin = np.full((q, q), BIG, np.int64)
    for s in range(q):
        for a in range(q):
            for b in range(q):
                if a != b:
                    x = D[sysl[s, a], sysl[s, b]] + D[par[s, a], par[s, b]]
                    if x < v[a, b]:
                        v[a, b] = x
                    y = D[sysl[a, s], sysl[b, s]] + D[par[a, s], par[b, s]]
                    if y < gmin[a, b]:
                        gmin[a, b] = y
    for L in range(2, max_len + 1):
        best = BIG
        for a in range(q):
            for b in range(q):
                if a != b and v[a, b] + gmin[a, b] < best:
                    best = v[a, b] + gmin[a, b]
        out[L] = best
        nv = np.full((q, q), BIG, np.int64)
        for a in range(q):
            for a2 in range(q):
                if a == a2 or v[a, a2] >= BIG:
                    continue
                for b in range(q):
                    for b2 in range(q):
                        if b == b2:
                            continue
                        x = v[a, a2] + D[sysl[a, b], sysl[a2, b2]] + D[par[a, b], par[a2, b2]]
                        if x < nv[b, b2]:
                            nv[b, b2] = x
        v = nv
    return out


def dc_length_profile(code: CodeCoefficients | Trellis, c: Constellation, max_length: int = 6) -> dict[int, Fraction]:
    """Minimum cumulated distance of DC pairs of each exact length 2..max_length.

    Diagnostic for how far the length-2/3 truncation can be trusted: a value
    below d1 at some length >= 4 means longer pairs are closer than the
    truncated spectrum reports.
    """
    sysl, par, D = _tables(code, c)
    out = _profile_kernel(sysl, par, D, int(max_length))
    return {L: Fraction(int(out[L]), c.scale_sq) for L in range(2, max_length + 1)}
