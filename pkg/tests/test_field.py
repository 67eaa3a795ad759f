import numpy as np
import pytest

from xorlab.field import build_field

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64]
LARGE_ORDERS = [128, 121, 243, 256]


def test_build_prime_field():
    f = build_field(2)
    assert (f.p, f.e, f.q) == (2, 1, 2)
    f5 = build_field(5)
    assert (f5.p, f5.e) == (5, 1)


def test_build_gf4_modulus():
    # the unique irreducible quadratic over GF(2): x^2 + x + 1
    f = build_field(4)
    assert (f.p, f.e) == (2, 2)
    assert f.modulus == (1, 1, 1)


def test_non_prime_power_rejected():
    for q in [1, 6, 12, 100]:
        with pytest.raises(ValueError):
            build_field(q)


def test_extension_table_limit():
    with pytest.raises(ValueError):
        build_field(2**17)


def test_gf2_add():
    f = build_field(2)
    assert f.add(1, 1) == 0


def test_gf5_inverse():
    f = build_field(5)
    assert f.inv(2) == 3  # 2 * 3 = 6 = 1 mod 5


def test_gf4_x_squared():
    # x encodes as 2, x + 1 as 3; modulus x^2 + x + 1 forces x * x = x + 1
    f = build_field(4)
    assert f.mul(2, 2) == 3


def test_inverse_of_zero_rejected():
    for q in [2, 4, 9]:
        with pytest.raises(ZeroDivisionError):
            build_field(q).inv(0)


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_field_axioms_exhaustive(q):
    # identities and all pairs for every order; full triple loops run in
    # test_field_axioms_all_triples for the tiny orders
    f = build_field(q)
    elts = list(f.elements())
    for a in elts:
        assert f.add(a, 0) == a
        assert f.mul(a, 1) == a
        assert f.mul(a, 0) == 0
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
    for a in elts:
        for b in elts:
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            assert f.add(a, b) in elts
    rng = np.random.default_rng(q)
    for _ in range(100):
        a, b, c = (int(x) for x in rng.integers(0, q, size=3))
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_field_axioms_all_triples(q):
    f = build_field(q)
    elts = list(f.elements())
    for a in elts:
        for b in elts:
            for c in elts:
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


@pytest.mark.parametrize("q", LARGE_ORDERS)
def test_field_axioms_sampled(q):
    f = build_field(q)
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, c = (int(x) for x in rng.integers(0, q, size=3))
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        if a:
            assert f.mul(a, f.inv(a)) == 1


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_characteristic(q):
    f = build_field(q)
    acc = 0
    for _ in range(f.p):
        acc = f.add(acc, 1)
    assert acc == 0


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 64])
def test_frobenius(q):
    # (a + b)^p = a^p + b^p in characteristic p
    f = build_field(q)
    for a in f.elements():
        for b in f.elements():
            lhs = f.pow(f.add(a, b), f.p)
            rhs = f.add(f.pow(a, f.p), f.pow(b, f.p))
            assert lhs == rhs


def test_pow_edge_cases():
    f = build_field(9)
    assert f.pow(0, 0) == 1
    assert f.pow(0, 5) == 0
    for a in f.nonzero_elements():
        assert f.pow(a, -1) == f.inv(a)
        assert f.pow(a, f.q - 1) == 1


def test_modulus_is_deterministic_and_cached():
    assert build_field(64) is build_field(64)
    # GF(8): smallest monic irreducible cubic over GF(2) is x^3 + x + 1
    assert build_field(8).modulus == (1, 1, 0, 1)


@pytest.mark.parametrize("q", [3, 4, 5, 9, 16])
def test_vectorized_ops_match_scalar(q):
    f = build_field(q)
    rng = np.random.default_rng(3)
    a = rng.integers(0, q, size=50)
    b = rng.integers(0, q, size=50)
    add = f.add_arrays(a, b)
    neg = f.neg_array(a)
    assert all(int(x) == f.add(int(u), int(v)) for x, u, v in zip(add, a, b))
    assert all(int(x) == f.neg(int(u)) for x, u in zip(neg, a))
    for c in f.nonzero_elements():
        mul = f.mul_scalar_array(c, a)
        assert all(int(x) == f.mul(c, int(u)) for x, u in zip(mul, a))
