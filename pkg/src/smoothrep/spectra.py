"""M(p), y(p), and numerical checks of the analytic ingredients.

``M(p)`` is the least bound such that every class mod ``p`` has a
squarefree ``p``-smooth representative at most that large; ``y(p)`` is the
least ``y`` such that every nonzero class has a squarefree ``y``-smooth
representative.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from smoothrep.arith import get_sieve, primitive_root
from smoothrep.config import DEFAULTS
from smoothrep.errors import NotRepresentable, SearchExhausted, UsageError
from smoothrep.primality import is_prime_64


@dataclass
class CoverageTable:
    """First (least) squarefree p-smooth hit per residue class."""

    p: int
    witnesses: dict[int, tuple[int, tuple[int, ...]]] = field(default_factory=dict)

    @property
    def uncovered(self) -> list[int]:
        return [a for a in range(self.p) if a not in self.witnesses]

    @property
    def complete(self) -> bool:
        return len(self.witnesses) == self.p

    def max_witness(self) -> int:
        return max(v for v, _ in self.witnesses.values())


def _check_prime(p: int) -> None:
    if p < 2 or not is_prime_64(p):
        raise UsageError(f"{p} is not prime")


def coverage_table(p: int, heap_budget: int | None = None) -> CoverageTable:
    """Enumerate squarefree ``p``-smooth integers in increasing order until
    every class mod ``p`` has been hit.

    Each heap node is a value and the index of its largest prime.  A node
    spawns two children: append the next prime, or swap its largest prime
    for the next one.  That reaches every squarefree number exactly once.
    """
    _check_prime(p)
    budget = DEFAULTS.heap_budget if heap_budget is None else heap_budget
    primes = get_sieve(p).primes_upto(p)
    table = CoverageTable(p)
    heap: list[tuple[int, int, tuple[int, ...]]] = [(1, -1, ())]
    pops = 0
    while heap:
        v, j, fs = heapq.heappop(heap)
        pops += 1
        r = v % p
        if r not in table.witnesses:
            table.witnesses[r] = (v, fs)
            if len(table.witnesses) == p:
                return table
        if j + 1 < len(primes):
            nxt = primes[j + 1]
            heapq.heappush(heap, (v * nxt, j + 1, fs + (nxt,)))
            if j >= 0:
                heapq.heappush(heap, (v // primes[j] * nxt, j + 1, fs[:-1] + (nxt,)))
        if pops >= budget:
            raise SearchExhausted(f"heap budget {budget} exhausted for p = {p}", table)
    return table


def compute_M(p: int, heap_budget: int | None = None) -> int:
    table = coverage_table(p, heap_budget)
    if not table.complete:
        raise NotRepresentable(p, table.uncovered[0])
    return table.max_witness()


def compute_y(p: int, y_cap: int | None = None) -> int:
    """Least ``y`` making every nonzero class a subset product of primes ``<= y``.

    ``y`` may exceed ``p`` (it does for 5 and 7).  The default cap is the
    100th prime after ``p``.
    """
    _check_prime(p)
    reach = np.zeros(p, dtype=bool)
    reach[1] = True
    if p == 2:
        return 1
    if y_cap is None:
        sieve = get_sieve(max(2 * p + 1000, 2000))
        while True:
            later = [q for q in sieve.primes_upto(sieve.limit) if q > p]
            if len(later) >= 100:
                y_cap = later[99]
                break
            sieve = get_sieve(sieve.limit * 2)
    for q in get_sieve(y_cap).primes_upto(y_cap):
        if q % p == 0:
            continue
        idx = np.nonzero(reach)[0]
        reach[(idx * (q % p)) % p] = True
        if reach[1:].all():
            return q
    raise SearchExhausted(f"classes mod {p} not covered by primes up to {y_cap}")


def m_table(primes: list[int]) -> list[tuple[int, int, float]]:
    out = []
    for p in primes:
        if p in (5, 7):
            continue
        m = compute_M(p)
        out.append((p, m, m / p))
    return out


# ---------------------------------------------------------------------------
# Analytic checks


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "checked": str(self.checked),
            "violations": [str(v) for v in self.violations],
            "ok": self.ok,
            **{k: v for k, v in self.notes.items()},
        }


def squarefree_density_check(limit: int) -> CheckReport:
    """Count squarefree ``j < p`` for every prime ``p <= limit`` and compare
    against ``(53/88)(p - 1)`` in integer arithmetic."""
    if limit < 2:
        raise UsageError("limit must be at least 2")
    sieve = get_sieve(limit)
    cum = np.cumsum(sieve.squarefree[: limit + 1].astype(np.int64))
    primes = sieve.primes[sieve.primes <= limit]
    counts = cum[primes - 1]
    bad = primes[88 * counts < 53 * (primes - 1)]
    report = CheckReport("density", checked=len(primes), violations=bad.tolist())
    report.notes["min_ratio"] = float((counts / (primes - 1)).min()) if len(primes) else None
    return report


def omega_counts(limit: int) -> np.ndarray:
    omega = np.zeros(limit + 1, dtype=np.int8)
    for q in get_sieve(limit).primes_upto(limit):
        omega[q::q] += 1
    return omega


def omega_bound_check(limit: int) -> CheckReport:
    """``omega(n) < log n`` for ``6 < n <= limit``; also records that 6 fails."""
    if limit < 7:
        raise UsageError("limit must be at least 7")
    omega = omega_counts(limit)
    n = np.arange(7, limit + 1)
    bad = n[omega[7:] >= np.log(n)]
    report = CheckReport("omega", checked=len(n), violations=bad.tolist())
    report.notes["threshold_witness"] = {"n": "6", "omega": str(int(omega[6])), "holds": bool(omega[6] < math.log(6))}
    return report


# ---------------------------------------------------------------------------
# Characters


def cyclotomic(d: int) -> list[int]:
    """Integer coefficients (lowest degree first) of the ``d``-th cyclotomic polynomial."""
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            poly = _poly_divmod(poly, cyclotomic(e))[0]
    return poly


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial."""
    num = list(num)
    if len(num) < len(den):
        return [0], num
    quot = [0] * (len(num) - len(den) + 1)
    for i in range(len(quot) - 1, -1, -1):
        c = num[i + len(den) - 1]
        quot[i] = c
        if c:
            for j, b in enumerate(den):
                num[i + j] -= c * b
    rem = num[: len(den) - 1] or [0]
    return quot, rem


@dataclass
class CharacterContext:
    """The order-``d`` character ``chi(g**j) = exp(2 pi i j / d)`` mod ``p``.

    Values are kept exactly as exponents of a primitive ``d``-th root of
    unity; ``index[a]`` is that exponent for ``a`` in ``[1, p)`` and -1 for 0.
    """

    p: int
    d: int
    g: int = 0
    index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if self.d < 1 or (self.p - 1) % self.d:
            raise UsageError(f"{self.d} does not divide {self.p} - 1")
        if not self.g:
            self.g = primitive_root(self.p)
        p = self.p
        powers = np.empty(p - 1, dtype=np.int64)
        x = 1
        for j in range(p - 1):
            powers[j] = x
            x = x * self.g % p
        index = np.full(p, -1, dtype=np.int64)
        index[powers] = np.arange(p - 1) % self.d
        self.index = index

    def exponent(self, a: int, power: int = 1) -> int | None:
        """Exponent ``e`` with ``chi**power(a) = zeta_d**e``, None when ``p | a``."""
        e = int(self.index[a % self.p])
        return None if e < 0 else e * power % self.d

    def value(self, a: int, power: int = 1) -> complex:
        e = self.exponent(a, power)
        return 0j if e is None else cmath.exp(2j * math.pi * e / self.d)

    def root_counts(self, power: int = 1, upto: int | None = None) -> list[int]:
        """How often each root ``zeta_d**k`` occurs in ``chi**power(1..upto)``."""
        upto = self.p - 1 if upto is None else upto
        idx = self.index[1 : upto + 1]
        idx = idx[idx >= 0] * power % self.d
        return np.bincount(idx, minlength=self.d).tolist()

    def sum_is_zero(self, power: int = 1) -> bool:
        """Exact test that ``sum_a chi**power(a)`` vanishes, via reduction mod the
        ``d``-th cyclotomic polynomial."""
        rem = _poly_divmod(self.root_counts(power), cyclotomic(self.d))[1]
        return not any(rem)

    def kernel(self) -> list[int]:
        """The index-``d`` subgroup ``{h : h**((p-1)/d) == 1}``."""
        return [a for a in range(1, self.p) if self.index[a] == 0]


def pv_bound(p: int) -> float:
    return math.sqrt(p) * math.log(p) / (2 * math.pi) + math.sqrt(p)


def pv_partial_sum_check(p: int, d: int, p_cap: int = 10**4, slack: float = 1e-6) -> CheckReport:
    """Partial sums of every nonprincipal power of the order-``d`` character
    against the explicit Polya-Vinogradov bound, plus squarefree coset
    representatives below ``p`` for the index-``d`` subgroup."""
    if d <= 1:
        raise UsageError("d must exceed 1 (the principal character is excluded)")
    if p > p_cap:
        raise UsageError(f"p = {p} exceeds the cap {p_cap}")
    ctx = CharacterContext(p, d)
    bound = pv_bound(p)
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    report = CheckReport("pv", notes={"p": str(p), "d": str(d), "bound": bound})
    maxima = {}
    halved = {}
    idx = ctx.index[1:p]
    for i in range(1, d):
        e = idx * i % d
        onehot = np.zeros((p - 1, d), dtype=np.int64)
        onehot[np.arange(p - 1), e] = 1
        counts = np.cumsum(onehot, axis=0)
        sums = np.abs(counts @ roots)
        peak = float(sums.max())
        maxima[i] = peak
        report.checked += 1
        if peak > bound + slack:
            report.violations.append(f"i={i}: max {peak:.6f} > {bound:.6f}")
        if ctx.exponent(p - 1, i) == 0:
            halved[i] = peak <= bound / 2 + slack
    sf = get_sieve(p).squarefree[1:p]
    reps = {int(c): None for c in range(d)}
    for j in np.nonzero(sf)[0] + 1:
        c = int(ctx.index[j])
        if reps[c] is None:
            reps[c] = int(j)
    missing = [c for c, j in reps.items() if j is None]
    for c in missing:
        report.violations.append(f"coset {c} has no squarefree j < {p}")
    report.notes["max_partial_sums"] = {str(i): v for i, v in maxima.items()}
    report.notes["even_halved_bound_holds"] = {str(i): v for i, v in halved.items()}
    report.notes["coset_representatives"] = {str(c): str(j) for c, j in reps.items() if j is not None}
    return report
