"""Arithmetic in GF(2^m) through log/antilog tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Primitive polynomials used for the shipped default fields, bit i <-> D^i.
DEFAULT_POLYS = {
    4: 0b111,        # 1 + D + D^2
    16: 0b11001,     # 1 + D^3 + D^4
    64: 0b1101101,   # 1 + D^2 + D^3 + D^5 + D^6
}


class FieldError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FieldSpec:
    m: int
    poly: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return 1 << self.m

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.m, self.poly) == (other.m, other.poly)

    def __hash__(self):
        return hash((self.m, self.poly))

    def to_dict(self) -> dict:
        return {"m": self.m, "poly": self.poly}

    def add(self, x: int, y: int) -> int:
        return add(x, y)

    def mul(self, x: int, y: int) -> int:
        return mul(self, x, y)

    def inv(self, x: int) -> int:
        return inv(self, x)

    def power(self, x: int, n: int) -> int:
        if x == 0:
            return 0 if n else 1
        return int(self.antilog_table[(int(self.log_table[x]) * n) % (self.q - 1)])


def _degree(poly: int) -> int:
    return poly.bit_length() - 1


def build_field(m: int, poly: int) -> FieldSpec:
    """Build GF(2^m) from `poly` and check that D generates the multiplicative group.

    Raises FieldError naming the failed check (range, degree, constant term,
    primitivity).
    """
    if not 2 <= m <= 8:
        raise FieldError(f"degree m={m} outside supported range 2..8")
    if _degree(poly) != m:
        raise FieldError(f"polynomial {poly:#b} has degree {_degree(poly)}, expected {m}")
    if not poly & 1:
        raise FieldError(f"polynomial {poly:#b} has zero constant term")
    q = 1 << m
    log_table = np.zeros(q, dtype=np.int64)
    antilog_table = np.zeros(q, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        if k > 0 and x == 1:
            raise FieldError(f"polynomial {poly:#b} is not primitive: D has order {k} != {q - 1}")
        antilog_table[k] = x
        log_table[x] = k
        x <<= 1
        if x & q:
            x ^= poly
    if x != 1:
        # D^(q-1) != 1 means D is not even a unit of order dividing q-1 (reducible poly)
        raise FieldError(f"polynomial {poly:#b} is not primitive: D^{q - 1} != 1")
    # log_table[0] is meaningless; keep 0 and guard zero operands explicitly
    antilog_table[q - 1] = 1
    nz = np.arange(1, q)
    mt = np.zeros((q, q), dtype=np.int64)
    mt[1:, 1:] = antilog_table[(log_table[nz][:, None] + log_table[nz][None, :]) % (q - 1)]
    for arr in (log_table, antilog_table, mt):
        arr.setflags(write=False)
    return FieldSpec(m=m, poly=poly, log_table=log_table, antilog_table=antilog_table, mul_table=mt)


def default_field(q: int) -> FieldSpec:
    if q not in DEFAULT_POLYS:
        raise FieldError(f"no default field for q={q}; supported: {sorted(DEFAULT_POLYS)}")
    return build_field(q.bit_length() - 1, DEFAULT_POLYS[q])


def field_from_dict(d: dict) -> FieldSpec:
    return build_field(int(d["m"]), int(d["poly"]))


def _check(f: FieldSpec | None, *xs: int) -> None:
    if f is None:
        return
    for x in xs:
        if not 0 <= x < f.q:
            raise FieldError(f"element {x} outside GF({f.q})")


def add(x: int, y: int) -> int:
    return x ^ y


def mul(f: FieldSpec, x: int, y: int) -> int:
    _check(f, x, y)
    if x == 0 or y == 0:
        return 0
    return int(f.antilog_table[(f.log_table[x] + f.log_table[y]) % (f.q - 1)])


def inv(f: FieldSpec, x: int) -> int:
    _check(f, x)
    if x == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse")
    return int(f.antilog_table[(-f.log_table[x]) % (f.q - 1)])


def tables_csv(f: FieldSpec) -> str:
    """Log/antilog tables as CSV: element, log, power, antilog."""
    rows = ["element,log,power,antilog"]
    for k in range(f.q):
        lg = "" if k == 0 else str(int(f.log_table[k]))
        al = str(int(f.antilog_table[k])) if k < f.q - 1 else ""
        rows.append(f"{k},{lg},{k},{al}")
    return "\n".join(rows) + "\n"
