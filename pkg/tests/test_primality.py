import pytest

from oracles import base2_strong_pseudoprimes, trial_is_prime
from smoothrep.arith import get_sieve
from smoothrep.errors import UsageError
from smoothrep.primality import is_prime_64, is_probable_prime_big


def test_examples():
    assert not is_prime_64(2047)
    assert is_prime_64(10007)
    assert not is_prime_64(1)
    assert is_prime_64(2)
    assert not is_prime_64(0)
    assert is_probable_prime_big(38709183810571)
    assert is_probable_prime_big(6221671)
    assert not is_probable_prime_big(4)


def test_10007_by_trial_division():
    assert trial_is_prime(10007)


def test_agrees_with_sieve_below_a_million():
    sieve = get_sieve(10**6)
    flags = sieve.spf == range(len(sieve.spf))
    for n in range(10**6 + 1):
        assert is_prime_64(n) == bool(flags[n] and n >= 2)


def test_base2_strong_pseudoprimes_rejected():
    sieve = get_sieve(10**6)
    psp = base2_strong_pseudoprimes(10**6, sieve.is_prime)
    assert psp[:3] == [2047, 3277, 4033]
    assert len(psp) == 46
    assert not any(is_prime_64(n) for n in psp)


def test_large_64_bit_values():
    assert is_prime_64(2**64 - 59)
    assert not is_prime_64(2**64 - 1)
    # strong pseudoprime to every prime base up to 23
    assert not is_prime_64(3825123056546413051)
    with pytest.raises(UsageError):
        is_prime_64(2**64)


def test_big_integers():
    assert is_probable_prime_big(2**127 - 1)
    assert not is_probable_prime_big(2**128 + 1)
    assert not is_probable_prime_big((2**61 - 1) * (2**89 - 1))
    assert is_probable_prime_big(2**521 - 1, rounds=5, seed=3)
