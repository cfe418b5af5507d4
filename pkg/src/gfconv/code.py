"""Rate-1/2 recursive systematic encoders with one memory element over GF(q).

State update and parity for the general structure::

    next_state = s + a1 * state
    parity     = a2 * next_state + a3 * state

``a3 == 0`` gives the accumulator structure, where every edge entering a
state carries the same parity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import FieldSpec, default_field, field_from_dict


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class CodeCoefficients:
    field: FieldSpec
    a1: int
    a2: int
    a3: int = 0

    def __post_init__(self):
        q = self.field.q
        for name in ("a1", "a2", "a3"):
            v = getattr(self, name)
            if not 0 <= v < q:
                raise CodeError(f"{name}={v} outside GF({q})")
        if self.a1 == 0:
            raise CodeError("a1 == 0: recursion requires a nonzero feedback coefficient")
        if self.a2 == 0:
            raise CodeError("a2 == 0")
        if self.field.mul(self.a1, self.a2) ^ self.a3 == 0:
            raise CodeError("a1*a2+a3 == 0")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.a1, self.a2, self.a3)

    def to_dict(self) -> dict:
        return {"field": self.field.to_dict(), "a1": self.a1, "a2": self.a2, "a3": self.a3}

    @classmethod
    def from_dict(cls, d: dict) -> "CodeCoefficients":
        f = field_from_dict(d["field"]) if "field" in d else default_field(int(d["q"]))
        return cls(f, int(d["a1"]), int(d["a2"]), int(d.get("a3", 0)))


def step(code: CodeCoefficients, state: int, inp: int) -> tuple[int, int]:
    """One encoder transition: returns (next_state, parity)."""
    f = code.field
    nxt = inp ^ f.mul(code.a1, state)
    parity = f.mul(code.a2, nxt) ^ f.mul(code.a3, state)
    return nxt, parity


def tail_symbol(code: CodeCoefficients, state: int) -> int:
    return code.field.mul(code.a1, state)


def encode_frame(code: CodeCoefficients, inputs: Sequence[int], terminate: bool = False):
    """Encode from the zero state.

    Returns ``(systematic, parity, final_state)``; with ``terminate`` one tail
    symbol is appended that drives the encoder back to zero.
    """
    if len(inputs) == 0:
        raise CodeError("empty input frame")
    systematic = [int(u) for u in inputs]
    parity = []
    state = 0
    for u in systematic:
        state, p = step(code, state, u)
        parity.append(p)
    if terminate:
        t = tail_symbol(code, state)
        systematic.append(t)
        state, p = step(code, state, t)
        parity.append(p)
    return systematic, parity, state


def encode_batch(trellis: "Trellis", inputs: np.ndarray, terminate: bool = False):
    """Vectorised encoder for a (frames, length) array of symbols."""
    inputs = np.asarray(inputs, dtype=np.int64)
    nf, n = inputs.shape
    extra = 1 if terminate else 0
    sys_out = np.empty((nf, n + extra), dtype=np.int64)
    par_out = np.empty((nf, n + extra), dtype=np.int64)
    state = np.zeros(nf, dtype=np.int64)
    mul_a1 = trellis.field.mul_table[trellis.code.a1]
    for i in range(n + extra):
        u = inputs[:, i] if i < n else mul_a1[state]
        nxt = u ^ mul_a1[state]
        sys_out[:, i] = u
        par_out[:, i] = trellis.parity[state, nxt]
        state = nxt
    return sys_out, par_out, state


@dataclass(frozen=True, eq=False)
class Trellis:
    """Fully connected q-state trellis; labels indexed ``[from_state, to_state]``."""

    code: CodeCoefficients
    systematic: np.ndarray
    parity: np.ndarray

    @property
    def field(self) -> FieldSpec:
        return self.code.field

    @property
    def q(self) -> int:
        return self.code.q

    def edges(self):
        q = self.q
        for a in range(q):
            for b in range(q):
                yield a, b, int(self.systematic[a, b]), int(self.parity[a, b])

    def next_state(self, state: int, inp: int) -> int:
        return inp ^ int(self.field.mul_table[self.code.a1, state])


def build_trellis(code: CodeCoefficients) -> Trellis:
    mt = code.field.mul_table
    states = np.arange(code.q)
    sysl = states[None, :] ^ mt[code.a1][:, None]
    par = mt[code.a2][None, :] ^ mt[code.a3][:, None]
    sysl.setflags(write=False)
    par.setflags(write=False)
    return Trellis(code, sysl, par)
