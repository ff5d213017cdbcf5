"""Squarefree p-smooth representatives of residue classes mod p.

Two regimes.  Small primes are handled by scanning ``a, a+p, a+2p, ...``
for the least squarefree p-smooth member of each class.  Larger primes get
a *representation chain*: pairwise coprime semiprimes ``m_i = q_i r_i``
with ``m_i == g**(2**i) (mod p)``, so that any nonzero class ``g**k`` is the
product of the ``m_i`` over the set bits of ``k``.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np

from smoothrep.arith import (
    discrete_log,
    get_sieve,
    primitive_root,
)
from smoothrep.config import DEFAULTS
from smoothrep.errors import (
    NotRepresentable,
    SearchExhausted,
    UsageError,
    VerificationFailure,
)
from smoothrep.primality import is_prime_64

BRUTE_CHAIN_THRESHOLD = 10**4
EXCEPTIONAL = {5: (4,), 7: (4,)}

Method = Literal["auto", "brute", "chain"]


@dataclass(frozen=True)
class SmoothRepresentation:
    """``a mod p`` witnessed by the product of the distinct primes in ``primes``."""

    p: int
    a: int
    primes: tuple[int, ...]

    @property
    def value(self) -> int:
        return math.prod(self.primes)

    def is_valid(self) -> bool:
        ps = self.primes
        return (
            len(set(ps)) == len(ps)
            and all(2 <= q <= self.p and is_prime_64(q) for q in ps)
            and self.value % self.p == self.a % self.p
            and (self.a % self.p != 0 or self.p in ps)
        )

    def to_json(self) -> dict:
        return {"p": str(self.p), "a": str(self.a), "primes": [str(q) for q in self.primes]}

    @classmethod
    def from_json(cls, obj: dict) -> "SmoothRepresentation":
        return cls(int(obj["p"]), int(obj["a"]), tuple(int(q) for q in obj["primes"]))


@dataclass(frozen=True)
class RepresentationChain:
    p: int
    g: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.pairs)

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "g": str(self.g),
            "pairs": [[str(q), str(r)] for q, r in self.pairs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RepresentationChain":
        pairs = tuple((int(q), int(r)) for q, r in obj["pairs"])
        return cls(int(obj["p"]), int(obj["g"]), pairs)


def chain_length(p: int) -> int:
    """Number of pairs needed: exponents ``k`` run over ``[0, p-2]``."""
    return max(p - 2, 1).bit_length()


def validate_chain(chain: RepresentationChain) -> bool:
    """Re-check every chain invariant from scratch.

    Uses only ``pow``, ``gcd`` and the strong-probable-prime test, never the
    sieve or the search that built the chain.
    """
    p, g = chain.p, chain.g
    if p < 3 or not is_prime_64(p):
        return False
    if len(chain.pairs) != chain_length(p):
        return False
    # g must generate the whole group
    n = p - 1
    m, q = n, 2
    while q * q <= m:
        if m % q == 0:
            if pow(g, n // q, p) == 1:
                return False
            while m % q == 0:
                m //= q
        q += 1
    if m > 1 and pow(g, n // m, p) == 1:
        return False
    target = g % p
    seen: list[int] = []
    for q, r in chain.pairs:
        if q == r or not (2 <= q < p and 2 <= r < p):
            return False
        if not (is_prime_64(q) and is_prime_64(r)):
            return False
        if q * r % p != target:
            return False
        mi = q * r
        if any(math.gcd(mi, mj) != 1 for mj in seen):
            return False
        seen.append(mi)
        target = target * target % p
    return True


def build_chain(p: int, q_scan_limit: int | None = None, g: int | None = None) -> RepresentationChain:
    """Greedy forward search for a representation chain mod ``p``.

    For each ``i`` the primes ``q`` are tried in increasing order; ``r`` is
    the least positive residue of ``g**(2**i) / q``.  The pair is taken when
    ``r`` is a prime distinct from ``q`` and from every prime already used.
    No backtracking: a dead end raises SearchExhausted with the partial chain.
    """
    if p < 3 or not is_prime_64(p):
        raise UsageError(f"build_chain needs an odd prime, got {p}")
    limit = DEFAULTS.q_scan_limit if q_scan_limit is None else q_scan_limit
    g = primitive_root(p) if g is None else g
    sieve = get_sieve()
    qs = sieve.primes_upto(min(limit, p - 1))
    spf = sieve.spf
    slimit = sieve.limit
    used: set[int] = set()
    pairs: list[tuple[int, int]] = []
    target = g % p
    for i in range(chain_length(p)):
        for q in qs:
            if q in used:
                continue
            r = target * pow(q, -1, p) % p
            if r < 2 or r == q or r in used:
                continue
            if (spf[r] == r) if r <= slimit else is_prime_64(r):
                break
        else:
            partial = RepresentationChain(p, g, tuple(pairs))
            raise SearchExhausted(f"no semiprime for step {i} mod {p}", partial)
        pairs.append((q, r))
        used.update((q, r))
        target = target * target % p
    return RepresentationChain(p, g, tuple(pairs))


def represent_with_chain(chain: RepresentationChain, a: int) -> SmoothRepresentation:
    p = chain.p
    a %= p
    if a == 0:
        raise UsageError("class 0 is represented by p itself, not by a chain")
    k = discrete_log(chain.g, a, p)
    primes: list[int] = []
    for i, (q, r) in enumerate(chain.pairs):
        if k >> i & 1:
            primes += (q, r)
    return SmoothRepresentation(p, a, tuple(sorted(primes)))


# ---------------------------------------------------------------------------
# Brute force


@lru_cache(maxsize=1024)
def _primorial_below(p: int) -> float | int:
    """Product of the primes below ``p``; beyond any reachable scan for large ``p``."""
    if p > 1000:
        return math.inf
    return math.prod(get_sieve(p).primes_upto(p - 1))


def squarefree_smooth_primes(n: int, p: int) -> tuple[int, ...] | None:
    """Prime set of ``n`` if it is squarefree and ``p``-smooth, else None."""
    sieve = get_sieve()
    if n <= sieve.limit:
        if not sieve.squarefree[n] or sieve.largest_factor[n] > p:
            return None
        return tuple(sieve.factor(n).primes)
    out: list[int] = []
    m = n
    for q in sieve.primes_upto(p):
        if m % q == 0:
            m //= q
            if m % q == 0:
                return None
            out.append(q)
            if m == 1:
                break
    return tuple(out) if m == 1 else None


def brute_force_representative(p: int, a: int, scan_cap: int | None = None) -> SmoothRepresentation:
    """Least positive squarefree ``p``-smooth ``n`` with ``n == a (mod p)``.

    For ``a != 0`` every candidate divides the product of the primes below
    ``p``, so passing that product without a hit proves the class is not
    representable.
    """
    if p < 2 or not is_prime_64(p):
        raise UsageError(f"{p} is not prime")
    a %= p
    if a == 0:
        return SmoothRepresentation(p, 0, (p,))
    cap = DEFAULTS.scan_cap if scan_cap is None else scan_cap
    ceiling = _primorial_below(p)
    n = a
    for _ in range(cap):
        if n > ceiling:
            raise NotRepresentable(p, a)
        primes = squarefree_smooth_primes(n, p)
        if primes is not None:
            return SmoothRepresentation(p, a, primes)
        n += p
    raise SearchExhausted(f"no witness for {a} mod {p} among {cap} candidates")


def minimal_witnesses(p: int) -> tuple[np.ndarray, list[int]]:
    """Least squarefree ``p``-smooth witness for every class mod ``p`` at once.

    Equivalent to calling brute_force_representative for each class, but
    scans the integers in increasing order over the sieve tables.  Returns
    the witness array (0 where uncovered) and the uncovered classes, which
    are proven unrepresentable.
    """
    if p < 2 or not is_prime_64(p):
        raise UsageError(f"{p} is not prime")
    sieve = get_sieve()
    ceiling = _primorial_below(p)
    bound = min(64 * p, sieve.limit)
    while True:
        ns = np.arange(1, bound + 1, dtype=np.int64)
        ok = sieve.squarefree[1 : bound + 1] & (sieve.largest_factor[1 : bound + 1] <= p)
        vals = ns[ok]
        res = vals % p
        witness = np.zeros(p, dtype=np.int64)
        # reversed assignment leaves the smallest value per class
        witness[res[::-1]] = vals[::-1]
        uncovered = np.nonzero(witness == 0)[0].tolist()
        if not uncovered:
            return witness, []
        if bound >= max(ceiling, p):
            return witness, uncovered
        if bound >= sieve.limit:
            break
        bound = min(bound * 4, sieve.limit)
    missing = []
    for a in uncovered:
        try:
            witness[a] = brute_force_representative(p, a).value
        except NotRepresentable:
            missing.append(a)
    return witness, missing


# ---------------------------------------------------------------------------
# Range verification


@dataclass
class PrimeReport:
    p: int
    method: str
    status: Literal["pass", "exception", "fail"]
    uncovered: tuple[int, ...] = ()
    certificate: list[dict] | dict | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out: dict = {"p": str(self.p), "method": self.method, "status": self.status}
        if self.uncovered:
            out["uncovered"] = [str(a) for a in self.uncovered]
        if self.detail:
            out["detail"] = self.detail
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def _brute_report(p: int, certificates: bool) -> PrimeReport:
    witness, missing = minimal_witnesses(p)
    expected = EXCEPTIONAL.get(p, ())
    if tuple(missing) == expected:
        status = "exception" if expected else "pass"
    else:
        status = "fail"
    cert = None
    if certificates:
        cert = []
        for a in range(p):
            if witness[a]:
                primes = squarefree_smooth_primes(int(witness[a]), p)
                cert.append(SmoothRepresentation(p, a, primes).to_json())
    return PrimeReport(p, "brute", status, tuple(missing), cert)


def verify_prime(p: int, method: Method = "auto", certificates: bool = False) -> PrimeReport:
    if method not in ("auto", "brute", "chain"):
        raise UsageError(f"unknown method {method!r}")
    use_chain = method == "chain" or (method == "auto" and p > BRUTE_CHAIN_THRESHOLD)
    if use_chain and p >= 5:
        try:
            chain = build_chain(p)
        except SearchExhausted as exc:
            report = _brute_report(p, certificates)
            report.detail = f"chain fallback: {exc}"
            return report
        if not validate_chain(chain):
            return PrimeReport(p, "chain", "fail", detail="chain failed re-validation")
        return PrimeReport(p, "chain", "pass", certificate=chain.to_json() if certificates else None)
    return _brute_report(p, certificates)


def _verify_block(args: tuple[list[int], str, bool]) -> list[PrimeReport]:
    primes, method, certificates = args
    return [verify_prime(p, method, certificates) for p in primes]


def _blocks(primes: list[int], size: int) -> Iterable[list[int]]:
    for i in range(0, len(primes), size):
        yield primes[i : i + size]


def verify_theorem_range(
    lo: int,
    hi: int,
    method: Method = "auto",
    workers: int = 1,
    certificates: bool = False,
    block_size: int = 256,
    raise_on_failure: bool = True,
) -> list[PrimeReport]:
    """Verify representability of every class for each prime in ``[lo, hi]``.

    Primes are split into contiguous blocks; with ``workers > 1`` blocks run
    in a process pool.  The report is always in increasing order of ``p``.
    """
    if lo < 2 or hi < lo:
        raise UsageError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    sieve = get_sieve(hi)
    primes = [q for q in sieve.primes_upto(hi) if q >= lo]
    jobs = [(block, method, certificates) for block in _blocks(primes, block_size)]
    reports: list[PrimeReport] = []
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            reports += _verify_block(job)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_verify_block, jobs):
                reports += chunk
    failed = [r for r in reports if r.status == "fail"]
    if failed and raise_on_failure:
        names = ", ".join(str(r.p) for r in failed[:10])
        raise VerificationFailure(f"representability failed for p = {names}", failed[0].p, reports)
    return reports


def default_workers() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Convenience


_chain_cache: dict[int, RepresentationChain] = {}


def represent(p: int, a: int) -> SmoothRepresentation:
    """Some squarefree ``p``-smooth representative of ``a mod p``.

    Minimal (brute force) below the chain threshold, chain-based above it.
    """
    a %= p
    if a == 0 or p <= BRUTE_CHAIN_THRESHOLD:
        return brute_force_representative(p, a)
    chain = _chain_cache.get(p)
    if chain is None:
        try:
            chain = build_chain(p)
        except SearchExhausted:
            return brute_force_representative(p, a)
        _chain_cache[p] = chain
    return represent_with_chain(chain, a)


def dumps_certificate(obj: SmoothRepresentation | RepresentationChain) -> str:
    return json.dumps(obj.to_json(), separators=(",", ":"))
