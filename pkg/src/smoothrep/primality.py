"""Strong probable-prime testing, exact for every 64-bit input."""

from __future__ import annotations

import random

# Strong tests to these bases are exact below 3.3e24, which covers 2**64.
WITNESSES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
LIMIT_64 = 1 << 64

_SMALL_PRIMES = WITNESSES_64 + (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def _strong_probable_prime(n: int, base: int, d: int, s: int) -> bool:
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _split_odd(n: int) -> tuple[int, int]:
    d = n - 1
    s = (d & -d).bit_length() - 1
    return d >> s, s


def _small_screen(n: int) -> bool | None:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if n < 97 * 97:
        return True
    return None


def is_prime_64(n: int) -> bool:
    """Exact primality for ``0 <= n < 2**64``."""
    if n >= LIMIT_64:
        from smoothrep.errors import UsageError

        raise UsageError(f"{n} does not fit in 64 bits")
    screened = _small_screen(n)
    if screened is not None:
        return screened
    d, s = _split_odd(n)
    return all(_strong_probable_prime(n, a, d, s) for a in WITNESSES_64)


def is_probable_prime_big(n: int, rounds: int = 40, seed: int = 0) -> bool:
    """Strong probable-prime test for arbitrary ``n``.

    Below 2**64 this is exact.  Above, base 2 is tried first and then
    ``rounds`` random bases drawn from a generator seeded with ``seed``, so
    repeated calls with the same arguments give the same answer.
    """
    if n < LIMIT_64:
        return is_prime_64(n)
    screened = _small_screen(n)
    if screened is not None:
        return screened
    d, s = _split_odd(n)
    if not _strong_probable_prime(n, 2, d, s):
        return False
    rng = random.Random(seed)
    for _ in range(rounds):
        if not _strong_probable_prime(n, rng.randrange(3, n - 1), d, s):
            return False
    return True
