"""Euclid-style prime generators with replayable step certificates.

Three rules are supported:

``mullin``
    next prime is the least prime factor of ``1 + n``.
``d_plus_one``
    next prime is the least prime ``q`` not dividing ``n`` with ``q | d + 1``
    for some divisor ``d`` of ``n``.
``d_plus_n_over_d``
    next prime is some prime factor of ``d + n/d`` for a divisor ``d`` of ``n``.

Here ``n`` is always the product of the primes generated so far.  Every step
stores a certificate that :func:`replay_validate` re-checks arithmetically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Literal

from smoothrep.arith import factorize, get_sieve, is_prime, jacobi, sqrt_mod
from smoothrep.config import DEFAULTS
from smoothrep.errors import (
    CapExceeded,
    FactorBudgetExceeded,
    NotFound,
    SearchExhausted,
    UsageError,
    VerificationFailure,
)
from smoothrep.primality import is_probable_prime_big

Rule = Literal["mullin", "d_plus_one", "d_plus_n_over_d"]

# (divisor d, chosen prime) for the opening of the d + n/d sequence 2, 3, 5, 13, 7
DND_BOOTSTRAP: tuple[tuple[int, int], ...] = ((1, 2), (1, 3), (2, 5), (3, 13), (3, 7))
D1_LITERAL_STEPS = 4


@dataclass(frozen=True)
class StepRecord:
    rule: Rule
    chosen_prime: int
    certificate: dict

    def to_json(self) -> dict:
        return {"rule": self.rule, "prime": str(self.chosen_prime), "certificate": _encode(self.certificate)}

    @classmethod
    def from_json(cls, obj: dict) -> "StepRecord":
        return cls(obj["rule"], int(obj["prime"]), _decode(obj["certificate"]))


def _encode(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__}")


_LABEL_FIELDS = {"branch", "mode"}


def _decode(value, key: str | None = None):
    if isinstance(value, dict):
        return {k: _decode(v, k) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    if isinstance(value, str) and key not in _LABEL_FIELDS and value.lstrip("-").isdigit():
        return int(value)
    return value


@dataclass
class GeneratorState:
    primes: list[int] = field(default_factory=list)
    n: int = 1
    steps: list[StepRecord] = field(default_factory=list)

    def push(self, record: StepRecord) -> None:
        q = record.chosen_prime
        if q in self.primes:
            raise VerificationFailure(f"prime {q} generated twice")
        self.primes.append(q)
        self.n *= q
        self.steps.append(record)

    def least_missing_prime(self) -> int:
        have = set(self.primes)
        q = 2
        while q in have:
            q = _next_prime(q)
        return q

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s.to_json(), separators=(",", ":")) + "\n" for s in self.steps)

    @classmethod
    def from_records(cls, records: Iterable[StepRecord]) -> "GeneratorState":
        state = cls()
        for rec in records:
            state.push(rec)
        return state

    @classmethod
    def from_jsonl(cls, text: str) -> "GeneratorState":
        return cls.from_records(
            StepRecord.from_json(json.loads(line)) for line in text.splitlines() if line.strip()
        )


def _next_prime(q: int) -> int:
    q += 1
    while not is_prime(q):
        q += 1
    return q


# ---------------------------------------------------------------------------
# Subset products


def _subset_residues(primes: list[int], p: int) -> list[int]:
    """Products mod ``p`` of every subset; bit ``j`` of the index selects ``primes[j]``."""
    out = [1]
    for q in primes:
        qm = q % p
        out += [x * qm % p for x in out]
    return out


def subset_product_search(
    primes: Iterable[int], target: int, p: int, cap: int | None = None
) -> tuple[int, ...]:
    """A subset of ``primes`` whose product is ``target`` mod ``p`` (meet in the middle).

    Subset products of the first half are tabulated; the second half is
    enumerated with inverted residues and looked up.  Raises NotFound when
    no subset works and CapExceeded for more than ``cap`` usable primes.
    """
    cap = DEFAULTS.subset_cap if cap is None else cap
    target %= p
    if target == 0:
        raise UsageError("subset_product_search needs a nonzero target")
    if target == 1:
        return ()
    ps = sorted({q for q in primes if q % p})
    if len(ps) > cap:
        raise CapExceeded(f"{len(ps)} primes exceeds the subset cap {cap}")
    half = len(ps) // 2
    left, right = ps[:half], ps[half:]
    table: dict[int, int] = {}
    for mask, r in enumerate(_subset_residues(left, p)):
        table.setdefault(r, mask)
    inv_right = _subset_residues([pow(q, -1, p) for q in right], p)
    for mask_r, ir in enumerate(inv_right):
        mask_l = table.get(target * ir % p)
        if mask_l is not None:
            chosen = [q for j, q in enumerate(left) if mask_l >> j & 1]
            chosen += [q for j, q in enumerate(right) if mask_r >> j & 1]
            return tuple(sorted(chosen))
    raise NotFound(f"no subset product is {target} mod {p}")


def find_divisor_in_class(primes: list[int], target: int, p: int) -> tuple[int, ...]:
    """Subset of ``primes`` with product ``target`` mod ``p``.

    Meet in the middle over growing prefixes of the smallest primes, up to
    ``subset_cap`` of them.  If that finds nothing, fall back to the
    representation machinery, which needs every prime below ``p`` present.
    """
    usable = sorted(q for q in primes if q % p)
    cap = DEFAULTS.subset_cap
    size = max(8, (p - 1).bit_length() + 4)
    while True:
        try:
            return subset_product_search(usable[: min(size, cap)], target, p)
        except NotFound:
            if size >= min(cap, len(usable)):
                break
            size += 8
    from smoothrep.represent import represent

    have = set(primes)
    if all(q in have for q in get_sieve(p).primes_upto(p - 1)):
        rep = represent(p, target)
        return rep.primes
    raise VerificationFailure(f"no divisor of n in class {target} mod {p}", p)


# ---------------------------------------------------------------------------
# Mullin


def _mullin_record(n: int, trial_bound: int | None, max_iterations: int | None, seed: int = 0) -> StepRecord:
    value = n + 1
    f = factorize(value, trial_bound=trial_bound, max_iterations=max_iterations, smallest_only=True, seed=seed)
    q = f.factors[0][0]
    # a trial-division hit certifies minimality by itself; a rho result is complete
    cert = {"value": value, "factors": [q for q, _ in f.factors], "complete": f.complete}
    if not f.complete:
        cert["cofactor"] = f.cofactor
    return StepRecord("mullin", q, cert)


def mullin_state(
    k: int,
    state: GeneratorState | None = None,
    trial_bound: int | None = None,
    max_iterations: int | None = None,
    seed: int = 0,
) -> GeneratorState:
    if k < 1:
        raise UsageError("need k >= 1")
    state = GeneratorState() if state is None else state
    while len(state.primes) < k:
        try:
            rec = _mullin_record(state.n, trial_bound, max_iterations, seed)
        except FactorBudgetExceeded as exc:
            exc.state = state
            raise
        state.push(rec)
    return state


def mullin_sequence(k: int, budget: int | None = None) -> list[int]:
    """First ``k`` terms of the Euclid-Mullin sequence.

    On a factoring stall the raised FactorBudgetExceeded carries the partial
    state in ``.state`` and the blocking composite in ``.composite``.
    """
    return mullin_state(k, max_iterations=budget).primes


# ---------------------------------------------------------------------------
# d + 1


def _divisors_with_subsets(primes: list[int]) -> Iterator[tuple[int, tuple[int, ...]]]:
    for size in range(len(primes) + 1):
        for combo in combinations(sorted(primes), size):
            yield math.prod(combo), combo


def _literal_d_plus_one(primes: list[int]) -> tuple[int, tuple[int, ...]]:
    """The definitional step: least new prime dividing some ``d + 1``."""
    have = set(primes)
    best: tuple[int, tuple[int, ...]] | None = None
    for d, subset in _divisors_with_subsets(primes):
        f = factorize(d + 1)
        for q in f.primes:
            if q not in have and (best is None or q < best[0]):
                best = (q, subset)
    assert best is not None
    return best


def d_plus_one_step(state: GeneratorState) -> StepRecord:
    if len(state.primes) < D1_LITERAL_STEPS:
        q, subset = _literal_d_plus_one(state.primes)
        return StepRecord("d_plus_one", q, {"d": math.prod(subset), "subset": list(subset), "mode": "literal"})
    p = state.least_missing_prime()
    subset = find_divisor_in_class(state.primes, p - 1, p)
    return StepRecord("d_plus_one", p, {"d": math.prod(subset), "subset": list(subset), "mode": "ordered"})


def d_plus_one_generator(k: int, state: GeneratorState | None = None) -> GeneratorState:
    """First ``k`` primes of the d + 1 generator.

    After the opening 2, 3, 7, 5 the primes come out in increasing order,
    so each later step only has to exhibit a divisor ``d == -1`` modulo the
    least missing prime.
    """
    if k < 1:
        raise UsageError("need k >= 1")
    state = GeneratorState() if state is None else state
    while len(state.primes) < k:
        state.push(d_plus_one_step(state))
    return state


# ---------------------------------------------------------------------------
# d + n/d

Policy = Callable[[GeneratorState], StepRecord]


def _nonresidue_factor(
    value: int, p: int, trial_bound: int | None, max_iterations: int | None, seed: int = 0
) -> int:
    """A prime factor ``q`` of ``value`` with Legendre symbol ``(q/p) == -1``.

    Trial division first, checking each factor as it appears; then the
    remaining cofactor, whole if prime or split by rho.
    """
    trial_bound = DEFAULTS.trial_bound if trial_bound is None else trial_bound
    rem = value
    for q in get_sieve(trial_bound).primes_upto(trial_bound):
        if rem % q == 0:
            if jacobi(q, p) == -1:
                return q
            while rem % q == 0:
                rem //= q
            if rem == 1:
                break
            if q * q > rem:
                break
    if rem > 1:
        if is_probable_prime_big(rem):
            if jacobi(rem, p) == -1:
                return rem
        else:
            f = factorize(rem, trial_bound=1, max_iterations=max_iterations, seed=seed)
            for q in f.primes:
                if jacobi(q, p) == -1:
                    return q
    raise VerificationFailure(f"{value} has no prime factor that is a non-residue mod {p}", p)


def dnd_step(
    state: GeneratorState,
    trial_bound: int | None = None,
    max_iterations: int | None = None,
    candidates: int = 4,
    seed: int = 0,
) -> StepRecord:
    """One step of the d + n/d generator under the completeness-proof policy.

    Let ``p`` be the least prime not yet generated.  If ``-n`` is a square
    mod ``p`` with root ``a``, any divisor ``d == a`` gives ``p | d + n/d``.
    Otherwise pick ``a`` with ``a + n/a`` a non-residue; ``d + n/d`` then has
    a non-residue prime factor ``q``, and adding ``q`` makes ``-n`` a square
    mod ``p`` for the next step.  Up to ``candidates`` values of ``a`` are
    tried before a factoring stall is reported.
    """
    k = len(state.primes)
    n = state.n
    if k < len(DND_BOOTSTRAP):
        d, q = DND_BOOTSTRAP[k]
        subset = tuple(x for x in state.primes if d % x == 0)
        return StepRecord(
            "d_plus_n_over_d", q, {"d": d, "subset": list(subset), "value": d + n // d, "branch": "bootstrap"}
        )
    p = state.least_missing_prime()
    if jacobi(-n, p) == 1:
        a = sqrt_mod(-n, p)
        subset = find_divisor_in_class(state.primes, a, p)
        d = math.prod(subset)
        cert = {"d": d, "subset": list(subset), "value": d + n // d, "branch": "+1", "target": p}
        return StepRecord("d_plus_n_over_d", p, cert)
    last_exc: FactorBudgetExceeded | None = None
    tried = 0
    for a in range(1, p):
        if jacobi(a + n * pow(a, -1, p), p) != -1:
            continue
        subset = find_divisor_in_class(state.primes, a, p)
        d = math.prod(subset)
        value = d + n // d
        try:
            q = _nonresidue_factor(value, p, trial_bound, max_iterations, seed)
        except FactorBudgetExceeded as exc:
            last_exc = exc
            tried += 1
            if tried >= candidates:
                break
            continue
        cert = {"d": d, "subset": list(subset), "value": value, "branch": "-1", "target": p, "a": a}
        return StepRecord("d_plus_n_over_d", q, cert)
    if last_exc is None:
        raise VerificationFailure(f"no a with (a + n/a / {p}) = -1", p)
    raise last_exc


def least_factor_policy(trial_bound: int = 10**4) -> Policy:
    """Choice hook: the least new prime found in any ``d + n/d`` by trial division.

    Enumerates every divisor, so only practical for short runs.
    """

    def choose(state: GeneratorState) -> StepRecord:
        n = state.n
        have = set(state.primes)
        best: tuple[int, tuple[int, ...]] | None = None
        for d, subset in _divisors_with_subsets(state.primes):
            value = d + n // d
            for q in get_sieve(trial_bound).primes_upto(trial_bound):
                if best is not None and q >= best[0]:
                    break
                if value % q == 0 and q not in have:
                    best = (q, subset)
                    break
        if best is None:
            raise SearchExhausted(f"no new prime below {trial_bound} divides any d + n/d")
        q, subset = best
        d = math.prod(subset)
        return StepRecord(
            "d_plus_n_over_d", q, {"d": d, "subset": list(subset), "value": d + n // d, "branch": "custom"}
        )

    return choose


def d_plus_n_over_d_generator(
    k: int,
    policy: str | Policy = "constructive",
    state: GeneratorState | None = None,
    trial_bound: int | None = None,
    max_iterations: int | None = None,
    candidates: int = 4,
    seed: int = 0,
) -> GeneratorState:
    """Run the d + n/d generator for ``k`` terms.

    ``policy`` is ``"constructive"`` (the constructive completeness policy)
    or a callable mapping the current state to the next StepRecord.  A
    factoring stall raises FactorBudgetExceeded with ``.state`` set to the
    partial run.
    """
    if k < 1:
        raise UsageError("need k >= 1")
    state = GeneratorState() if state is None else state
    while len(state.primes) < k:
        try:
            if policy == "constructive":
                rec = dnd_step(state, trial_bound, max_iterations, candidates, seed)
            elif callable(policy):
                rec = policy(state)
            else:
                raise UsageError(f"unknown policy {policy!r}")
        except FactorBudgetExceeded as exc:
            exc.state = state
            raise
        state.push(rec)
    return state


# ---------------------------------------------------------------------------
# Replay


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _check_subset(cert: dict, primes: list[int], n: int) -> int | None:
    subset = cert.get("subset", [])
    have = set(primes)
    if len(set(subset)) != len(subset) or any(q not in have for q in subset):
        return None
    d = cert["d"]
    if math.prod(subset) != d or n % d:
        return None
    return d


def _check_step(rec: StepRecord, index: int, primes: list[int], n: int) -> str:
    q = rec.chosen_prime
    cert = rec.certificate
    if q in primes:
        return "prime repeated"
    if not is_probable_prime_big(q):
        return "chosen value is not prime"
    if rec.rule == "mullin":
        value = cert["value"]
        if value != n + 1 or value % q:
            return "chosen prime does not divide 1 + n"
        factors = cert["factors"]
        if q != min(factors) or any(value % f for f in factors):
            return "bad factor list"
        if not all(is_probable_prime_big(f) for f in factors):
            return "non-prime factor"
        if cert["complete"]:
            rest = value
            for f in factors:
                while rest % f == 0:
                    rest //= f
            if rest != 1:
                return "factorization does not multiply back"
        elif q > get_sieve().limit:
            return "partial factorization cannot certify a large least factor"
        elif any(value % s == 0 for s in get_sieve().primes_upto(q - 1)):
            return "a smaller prime divides 1 + n"
        return ""
    d = _check_subset(cert, primes, n)
    if d is None:
        return "divisor certificate does not match the prefix"
    if rec.rule == "d_plus_one":
        if (d + 1) % q:
            return "chosen prime does not divide d + 1"
        if cert.get("mode") == "literal":
            best, _ = _literal_d_plus_one(primes)
            return "" if best == q else "not the least admissible prime"
        have = set(primes)
        if any(s not in have for s in get_sieve(q).primes_upto(q - 1)):
            return "a smaller prime was still available"
        return ""
    if rec.rule == "d_plus_n_over_d":
        value = d + n // d
        if cert.get("value", value) != value or value % q:
            return "chosen prime does not divide d + n/d"
        branch = cert.get("branch")
        if branch == "bootstrap":
            return "" if index < len(DND_BOOTSTRAP) and DND_BOOTSTRAP[index] == (d, q) else "bootstrap mismatch"
        if branch in ("+1", "-1"):
            p = cert["target"]
            have = set(primes)
            if p in have or any(s not in have for s in get_sieve(p).primes_upto(p - 1)):
                return "target is not the least missing prime"
            symbol = jacobi(-n, p)
            if branch == "+1":
                return "" if symbol == 1 and q == p else "+1 branch inconsistent"
            return "" if symbol == -1 and jacobi(q, p) == -1 else "-1 branch inconsistent"
        if branch == "custom":
            return ""
        return f"unknown branch {branch!r}"
    return f"unknown rule {rec.rule!r}"


def replay_validate(state: GeneratorState) -> ReplayResult:
    """Re-check every step certificate against the prefix it was made from."""
    primes: list[int] = []
    n = 1
    for i, rec in enumerate(state.steps):
        reason = _check_step(rec, i, primes, n)
        if reason:
            return ReplayResult(False, i, reason)
        primes.append(rec.chosen_prime)
        n *= rec.chosen_prime
    if primes != state.primes or n != state.n:
        return ReplayResult(False, len(state.steps), "state does not match its steps")
    return ReplayResult(True)
