"""Square QAM constellations on the odd-integer lattice with per-axis Gray labels."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gf import FieldSpec

# Per-axis Gray labels, label bits -> amplitude (MSB first within the axis).
AXIS_GRAY = {
    1: {0b0: +1, 0b1: -1},
    2: {0b00: +3, 0b01: +1, 0b11: -1, 0b10: -3},
    3: {0b000: +7, 0b001: +5, 0b011: +3, 0b010: +1,
        0b110: -1, 0b111: -3, 0b101: -5, 0b100: -7},
}


class MappingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Constellation:
    """Integer lattice points plus the symbol-to-point map.

    ``points[k]`` is (I, Q) of point k, ``mapping[x]`` the point index carrying
    field element x. Normalised coordinates are ``points / sqrt(scale_sq)``.
    """

    points: np.ndarray
    mapping: np.ndarray
    scale_sq: int

    def __post_init__(self):
        q = len(self.points)
        if sorted(self.mapping.tolist()) != list(range(q)):
            raise MappingError("mapping is not a bijection onto the points")
        energy = int((self.points.astype(np.int64) ** 2).sum())
        if energy != self.scale_sq * q:
            raise MappingError(f"scale_sq={self.scale_sq} does not match average energy {energy}/{q}")
        sym_pts = self.points[self.mapping].astype(np.int64)
        diff = sym_pts[:, None, :] - sym_pts[None, :, :]
        dist = (diff ** 2).sum(-1)
        dist.setflags(write=False)
        object.__setattr__(self, "_dist", dist)

    @property
    def q(self) -> int:
        return len(self.points)

    @property
    def distance_table(self) -> np.ndarray:
        """q x q integer table of squared distances between symbols (numerators)."""
        return self._dist

    @property
    def min_distance_num(self) -> int:
        d = self._dist
        return int(d[d > 0].min())

    def symbol_points(self) -> np.ndarray:
        """Integer (I, Q) of each field element, shape (q, 2)."""
        return self.points[self.mapping]

    def complex_points(self) -> np.ndarray:
        """Unit-energy complex signal of each field element."""
        p = self.symbol_points().astype(float)
        return (p[:, 0] + 1j * p[:, 1]) / np.sqrt(self.scale_sq)

    def labels(self) -> np.ndarray:
        """Binary label (field element value) carried by each point index."""
        lab = np.empty(self.q, dtype=np.int64)
        lab[self.mapping] = np.arange(self.q)
        return lab


def build_qam(f: FieldSpec | int) -> Constellation:
    """Square QAM for q in {4, 16, 64}.

    Odd-indexed bits of the symbol select the Q level, even-indexed bits the I
    level; within an axis the higher bit index is the more significant label bit.
    """
    q = f if isinstance(f, int) else f.q
    if q not in (4, 16, 64):
        raise MappingError(f"unsupported QAM order {q}")
    k = (q.bit_length() - 1) // 2
    pts = np.empty((q, 2), dtype=np.int64)
    for x in range(q):
        ib = qb = 0
        for j in range(k):
            ib |= ((x >> (2 * j)) & 1) << j
            qb |= ((x >> (2 * j + 1)) & 1) << j
        pts[x] = (AXIS_GRAY[k][ib], AXIS_GRAY[k][qb])
    scale_sq = int((pts ** 2).sum()) // q
    return Constellation(pts, np.arange(q), scale_sq)


def squared_distance(c: Constellation, x: int, y: int) -> Fraction:
    return Fraction(int(c.distance_table[x, y]), c.scale_sq)


def permute_mapping(c: Constellation, perm: Sequence[int]) -> Constellation:
    """Relabel: the new map sends element x to point ``perm[mapping[x]]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(c.q)):
        raise MappingError("permutation is not bijective")
    return Constellation(c.points, perm[c.mapping], c.scale_sq)


@dataclass(frozen=True)
class BpskImage:
    """Each symbol sent as m antipodal values; column j carries bit j (0 -> +1)."""

    m: int
    signs: np.ndarray

    @property
    def q(self) -> int:
        return 1 << self.m

    def modulate(self, symbols: np.ndarray) -> np.ndarray:
        return self.signs[np.asarray(symbols)]


def build_bpsk_image(f: FieldSpec | int) -> BpskImage:
    q = f if isinstance(f, int) else f.q
    m = q.bit_length() - 1
    bits = (np.arange(q)[:, None] >> np.arange(m)[None, :]) & 1
    return BpskImage(m, (1 - 2 * bits).astype(float))


def constellation_csv(c: Constellation) -> str:
    m = c.q.bit_length() - 1
    s = np.sqrt(c.scale_sq)
    rows = ["symbol,binary,I,Q,I_norm,Q_norm"]
    for x, (i, qv) in enumerate(c.symbol_points()):
        rows.append(f"{x},{x:0{m}b},{i},{qv},{i / s:.12g},{qv / s:.12g}")
    return "\n".join(rows) + "\n"
