import numpy as np
import pytest

from blackbox_linalg import PrimeField, ff_inv, matmul_mod
from blackbox_linalg.errors import DimensionError, NotInvertible
from blackbox_linalg.field import is_probable_prime

from _oracles import dense_mul_int, ext_euclid_inverse


def test_ff_inv_identity():
    assert ff_inv(1, PrimeField(7)) == 1


def test_ff_inv_known():
    assert ff_inv(2, PrimeField(7)) == 4  # 2*4 = 8 = 1 mod 7


def test_ff_inv_random_against_euclid_oracle():
    F = PrimeField(10007)
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = int(rng.integers(1, F.p))
        b = ff_inv(a, F)
        assert a * b % F.p == 1
        assert b == ext_euclid_inverse(a, F.p)


def test_ff_inv_zero_raises():
    with pytest.raises(NotInvertible):
        ff_inv(0, PrimeField(7))


def test_ff_inv_involution():
    F = PrimeField(10007)
    rng = np.random.default_rng(1)
    for a in rng.integers(1, F.p, size=50):
        assert ff_inv(ff_inv(int(a), F), F) == a


def test_prime_field_rejects_composite_and_small():
    with pytest.raises(ValueError):
        PrimeField(10)
    with pytest.raises(ValueError):
        PrimeField(2)
    with pytest.raises(ValueError):
        PrimeField(1 << 31)  # beyond the word-size build constant


def test_is_probable_prime():
    assert is_probable_prime(2147483629)
    assert not is_probable_prime(2147483629 - 2)  # odd composite
    assert is_probable_prime(10007)


def test_inv_vec_matches_scalar():
    F = PrimeField(10007)
    rng = np.random.default_rng(2)
    a = rng.integers(1, F.p, size=64, dtype=np.int64)
    got = F.inv_vec(a)
    for x, y in zip(a, got):
        assert int(x) * int(y) % F.p == 1


def test_matmul_mod_exact_near_word_bound():
    # entries close to 2**31: the 16-bit split must stay exact
    p = 2147483629
    rng = np.random.default_rng(3)
    A = rng.integers(p - 10**6, p, size=(40, 70), dtype=np.int64)
    B = rng.integers(p - 10**6, p, size=(70, 30), dtype=np.int64)
    assert np.array_equal(matmul_mod(A, B, p), dense_mul_int(A, B, p))


def test_matmul_mod_shapes():
    with pytest.raises(DimensionError):
        matmul_mod(np.ones((2, 3), dtype=np.int64),
                   np.ones((2, 3), dtype=np.int64), 7)
    out = matmul_mod(np.zeros((3, 0), dtype=np.int64),
                     np.zeros((0, 4), dtype=np.int64), 7)
    assert out.shape == (3, 4) and not out.any()
