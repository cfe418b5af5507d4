import pytest
from hypothesis import given, strategies as st

from gfconv.gf import DEFAULT_POLYS, FieldError, build_field, default_field, field_from_dict, inv, tables_csv


def clmul_mod(x, y, poly, m):
    """Carry-less product reduced modulo poly, bit by bit."""
    r = 0
    while y:
        if y & 1:
            r ^= x
        y >>= 1
        x <<= 1
        if x >> m & 1:
            x ^= poly
    return r


@pytest.mark.parametrize("q", [4, 16, 64])
def test_mul_matches_polynomial_product(q):
    f = default_field(q)
    m = f.m
    for x in range(q):
        for y in range(q):
            assert f.mul(x, y) == clmul_mod(x, y, f.poly, m)


@pytest.mark.parametrize("q", [4, 16, 64])
def test_field_axioms(q):
    f = default_field(q)
    for x in range(1, q):
        assert f.mul(x, f.inv(x)) == 1
        assert f.mul(x, 1) == x
        assert f.add(x, x) == 0
    assert f.power(2, q - 1) == 1
    # D generates the whole multiplicative group
    assert len({f.power(2, k) for k in range(q - 1)}) == q - 1


@given(st.integers(0, 63), st.integers(0, 63), st.integers(0, 63))
def test_distributive(x, y, z):
    f = default_field(64)
    assert f.mul(x, y ^ z) == f.mul(x, y) ^ f.mul(x, z)
    assert f.mul(f.mul(x, y), z) == f.mul(x, f.mul(y, z))


def test_default_polys():
    assert DEFAULT_POLYS == {4: 0b111, 16: 0b11001, 64: 0b1101101}


@pytest.mark.parametrize("m,poly,msg", [
    (4, 0b11111, "primitive"),   # irreducible but D has order 5
    (4, 0b10101, "primitive"),   # reducible
    (4, 0b1011, "degree"),
    (4, 0b11000, "constant"),
    (1, 0b11, "m="),
    (9, 0b1000010001, "m="),
])
def test_rejects_bad_polynomials(m, poly, msg):
    with pytest.raises(FieldError, match=msg):
        build_field(m, poly)


def test_alternate_primitive_poly():
    f = build_field(4, 0b10011)
    assert f.mul(2, 8) == 0b0011
    assert f != default_field(16)


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        inv(default_field(16), 0)


def test_roundtrip_and_csv():
    f = default_field(16)
    assert field_from_dict(f.to_dict()) == f
    lines = tables_csv(f).strip().splitlines()
    assert lines[0] == "element,log,power,antilog"
    assert len(lines) == 17
