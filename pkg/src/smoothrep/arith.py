"""Integer and modular arithmetic: sieve, symbols, roots, factoring, discrete logs."""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import gmpy2
import numpy as np

from smoothrep.config import DEFAULTS
from smoothrep.errors import (
    FactorBudgetExceeded,
    NonResidue,
    NotInvertible,
    UsageError,
)
from smoothrep.primality import is_prime_64, is_probable_prime_big


@dataclass(frozen=True)
class Residue:
    """A class ``value mod modulus`` kept in canonical form."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise UsageError(f"modulus must be at least 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class Factorization:
    """``value`` written as a product of prime powers.

    ``factors`` holds ``(prime, exponent)`` pairs with strictly increasing
    primes.  ``cofactor`` is 1 for a complete factorization; an early-exit
    factorization leaves the unfactored part there.  Zero has no factors.
    """

    value: int
    factors: tuple[tuple[int, int], ...] = ()
    cofactor: int = 1

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def primes(self) -> list[int]:
        return [q for q, _ in self.factors]

    def product(self) -> int:
        if self.is_zero:
            return 0
        out = self.cofactor
        for q, e in self.factors:
            out *= q**e
        return out

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


# ---------------------------------------------------------------------------
# Sieve


class Sieve:
    """Primes up to ``limit`` with a smallest-prime-factor table.

    The largest-prime-factor and squarefree tables are built on first use.
    Instances are read-only once constructed and safe to share.
    """

    def __init__(self, limit: int) -> None:
        self.limit = max(int(limit), 2)
        n = self.limit
        spf = np.zeros(n + 1, dtype=np.int32)
        root = math.isqrt(n)
        small = _simple_primes(root)
        for q in reversed(small):
            spf[q * q :: q] = q
        idx = np.nonzero(spf == 0)[0]
        idx = idx[idx >= 2]
        spf[idx] = idx
        self.spf = spf
        self.primes = idx.astype(np.int64)
        self._prime_list: list[int] | None = None

    @property
    def prime_list(self) -> list[int]:
        if self._prime_list is None:
            self._prime_list = self.primes.tolist()
        return self._prime_list

    def primes_upto(self, bound: int) -> list[int]:
        k = int(np.searchsorted(self.primes, bound, side="right"))
        return self.prime_list[:k]

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.limit and int(self.spf[n]) == n

    def factor(self, n: int) -> Factorization:
        out: list[tuple[int, int]] = []
        m = n
        while m > 1:
            q = int(self.spf[m])
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            out.append((q, e))
        return Factorization(n, tuple(out))

    @cached_property
    def largest_factor(self) -> np.ndarray:
        lpf = np.zeros(self.limit + 1, dtype=np.int32)
        for q in self.prime_list:
            lpf[q :: q] = q
        lpf[1] = 1
        return lpf

    @cached_property
    def squarefree(self) -> np.ndarray:
        sf = np.ones(self.limit + 1, dtype=bool)
        sf[0] = False
        for q in self.primes_upto(math.isqrt(self.limit)):
            sf[q * q :: q * q] = False
        return sf


def _simple_primes(n: int) -> list[int]:
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if flags[i]]


_sieve_lock = threading.Lock()
_shared_sieve: Sieve | None = None


def get_sieve(limit: int | None = None) -> Sieve:
    """Shared sieve covering at least ``limit`` (default from budgets)."""
    global _shared_sieve
    want = DEFAULTS.sieve_limit if limit is None else limit
    with _sieve_lock:
        if _shared_sieve is None or _shared_sieve.limit < want:
            _shared_sieve = Sieve(max(want, DEFAULTS.sieve_limit))
        return _shared_sieve


def prime_sieve(limit: int) -> tuple[list[int], np.ndarray]:
    """Primes up to ``limit`` and the smallest-prime-factor table.

    A limit below 2 gives an empty list.
    """
    if limit < 2:
        return [], np.zeros(max(limit + 1, 0), dtype=np.int32)
    s = Sieve(limit)
    return s.prime_list, s.spf


# ---------------------------------------------------------------------------
# Modular arithmetic


def _check_modulus(m: int) -> None:
    if m < 2:
        raise UsageError(f"modulus must be at least 2, got {m}")


def mod_pow(base: int, exp: int, m: int) -> int:
    _check_modulus(m)
    if exp < 0:
        raise UsageError("exponent must be nonnegative")
    return pow(base, exp, m)


def mod_inv(a: int, m: int) -> int:
    _check_modulus(m)
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(a, m) from None


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol ``(a/n)`` for odd positive ``n``."""
    if n <= 0 or n % 2 == 0:
        raise UsageError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int:
    """Smaller square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if jacobi(a, p) != 1:
        raise NonResidue(a, p)
    if p % 4 == 3:
        x = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while jacobi(z, p) != -1:
            z += 1
        m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, x = t * c % p, x * b % p
    return min(x, p - x)


# ---------------------------------------------------------------------------
# Factoring


def _brent_rho(n: int, max_iterations: int, rng: random.Random) -> int | None:
    """One nontrivial factor of the odd composite ``n``, or None on budget exhaustion."""
    N = gmpy2.mpz(n)
    batch = 128
    used = 0
    while used < max_iterations:
        y = gmpy2.mpz(rng.randrange(1, n))
        c = gmpy2.mpz(rng.randrange(1, n))
        g = q = gmpy2.mpz(1)
        x = ys = y
        r = 1
        while g == 1 and used < max_iterations:
            x = y
            for _ in range(r):
                y = (y * y + c) % N
            used += r
            k = 0
            while k < r and g == 1:
                ys = y
                step = min(batch, r - k)
                for _ in range(step):
                    y = (y * y + c) % N
                    q = q * abs(x - y) % N
                g = gmpy2.gcd(q, N)
                k += step
            used += k
            r *= 2
        if g == N:
            # the batched product overshot; replay one step at a time
            g = gmpy2.mpz(1)
            while g == 1:
                ys = (ys * ys + c) % N
                g = gmpy2.gcd(abs(x - ys), N)
        if 1 < g < N:
            return int(g)
    return None


def factorize(
    n: int,
    trial_bound: int | None = None,
    max_iterations: int | None = None,
    smallest_only: bool = False,
    seed: int = 0,
) -> Factorization:
    """Factor ``n`` by trial division then Pollard-rho (Brent).

    With ``smallest_only`` the search stops at the first trial-division hit,
    leaving the rest in ``cofactor``; past trial division the least prime
    factor is only known once everything is split, so the result is complete.  Raises
    FactorBudgetExceeded if rho spends ``max_iterations`` on one cofactor
    without splitting it.
    """
    if n < 0:
        raise UsageError("factorize expects a nonnegative integer")
    if n == 0:
        return Factorization(0)
    trial_bound = DEFAULTS.trial_bound if trial_bound is None else trial_bound
    max_iterations = DEFAULTS.rho_iterations if max_iterations is None else max_iterations
    sieve = get_sieve()
    if n <= sieve.limit:
        f = sieve.factor(n)
        if smallest_only and f.factors:
            q, e = f.factors[0]
            return Factorization(n, ((q, e),), n // q**e)
        return f

    found: dict[int, int] = {}
    rem = n
    trial_primes = sieve.prime_list if trial_bound >= sieve.limit else sieve.primes_upto(trial_bound)
    for q in trial_primes:
        if q * q > rem:
            break
        if rem % q == 0:
            e = 0
            while rem % q == 0:
                rem //= q
                e += 1
            found[q] = e
            if smallest_only:
                return Factorization(n, ((q, e),), rem)
    if rem == 1:
        return Factorization(n, tuple(sorted(found.items())))
    last_trial = trial_primes[-1] if trial_primes else 1
    if rem < last_trial * last_trial or is_probable_prime_big(rem):
        found[rem] = found.get(rem, 0) + 1
        return Factorization(n, tuple(sorted(found.items())))

    rng = random.Random(seed)
    stack = [rem]
    pending: list[int] = []
    while stack:
        m = stack.pop()
        if is_probable_prime_big(m):
            found[m] = found.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _brent_rho(m, max_iterations, rng)
        if d is None:
            pending.append(m)
            continue
        stack += [d, m // d]
    if pending:
        cof = math.prod(pending)
        partial = Factorization(n, tuple(sorted(found.items())), cof)
        raise FactorBudgetExceeded(partial, max(pending))
    return Factorization(n, tuple(sorted(found.items())))


def smallest_prime_factor(n: int, **kwargs) -> int:
    if n < 2:
        raise UsageError("smallest_prime_factor needs n >= 2")
    return factorize(n, smallest_only=True, **kwargs).factors[0][0]


def is_squarefree(n: int) -> bool:
    if n < 1:
        raise UsageError("is_squarefree expects a positive integer")
    sieve = get_sieve()
    if n <= sieve.limit:
        return bool(sieve.squarefree[n])
    return factorize(n).is_squarefree


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return factorize(n).omega


# ---------------------------------------------------------------------------
# Multiplicative group


@lru_cache(maxsize=4096)
def primitive_root(p: int) -> int:
    """Least primitive root modulo the prime ``p``."""
    if p == 2:
        return 1
    qs = factorize(p - 1).primes
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise UsageError(f"{p} is not prime")


@lru_cache(maxsize=64)
def _baby_steps(g: int, p: int) -> tuple[int, dict[int, int], int]:
    order = p - 1
    m = math.isqrt(order) + 1
    table: dict[int, int] = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * g % p
    return m, table, pow(g, -m, p)


def discrete_log(g: int, a: int, p: int) -> int:
    """The ``k`` in ``[0, p-1)`` with ``g**k == a (mod p)`` (baby-step giant-step).

    ``g`` must be a primitive root.  The baby-step table for ``(g, p)`` is
    cached, so repeated logs to one base are cheap.
    """
    a %= p
    if a == 0:
        raise UsageError("discrete log of 0 is undefined")
    if p == 2:
        return 0
    m, table, giant = _baby_steps(g % p, p)
    gamma = a
    for i in range(m):
        j = table.get(gamma)
        if j is not None:
            return (i * m + j) % (p - 1)
        gamma = gamma * giant % p
    raise UsageError(f"{a} is not a power of {g} modulo {p}")


def is_prime(n: int) -> bool:
    """Primality through the shared sieve where it reaches, else the strong tests."""
    sieve = get_sieve()
    if n <= sieve.limit:
        return sieve.is_prime(n) if n >= 2 else False
    return is_probable_prime_big(n)


__all__ = [
    "Factorization",
    "Residue",
    "Sieve",
    "discrete_log",
    "factorize",
    "get_sieve",
    "is_prime",
    "is_prime_64",
    "is_squarefree",
    "jacobi",
    "mod_inv",
    "mod_pow",
    "omega",
    "prime_sieve",
    "primitive_root",
    "smallest_prime_factor",
    "sqrt_mod",
]
