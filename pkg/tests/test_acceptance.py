"""Exit criteria.  Each test prints one PASS/FAIL line in the terminal summary."""

import math
import time
from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE_LINES
from oracles import base2_strong_pseudoprimes, class_scan_witness, trial_factor, trial_primes
from smoothrep.arith import get_sieve
from smoothrep.errors import FactorBudgetExceeded, NotRepresentable
from smoothrep.generators import (
    d_plus_n_over_d_generator,
    d_plus_one_generator,
    mullin_state,
    replay_validate,
)
from smoothrep.primality import is_prime_64
from smoothrep.represent import (
    RepresentationChain,
    brute_force_representative,
    default_workers,
    validate_chain,
    verify_prime,
    verify_theorem_range,
)
from smoothrep.spectra import (
    compute_M,
    compute_y,
    omega_bound_check,
    pv_partial_sum_check,
    squarefree_density_check,
)


@contextmanager
def criterion(number: int, title: str, seconds: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        timely = elapsed < seconds
        status = "PASS" if ok and timely else "FAIL"
        ACCEPTANCE_LINES.append(f"{status} criterion {number}: {title} ({elapsed:.1f}s, limit {seconds:g}s)")
    assert timely, f"criterion {number} took {elapsed:.1f}s, limit {seconds}s"


def test_c1_exceptional_primes():
    with criterion(1, "only 4 mod 5 and 4 mod 7 unrepresentable", 1):
        for p in (5, 7):
            bad = []
            for a in range(p):
                try:
                    rep = brute_force_representative(p, a)
                    assert rep.is_valid()
                except NotRepresentable:
                    bad.append(a)
            assert bad == [4]
            report = verify_prime(p, "brute")
            assert report.status == "exception" and report.uncovered == (4,)


def test_c2_small_regime_brute_force():
    with criterion(2, "brute force for every prime 7 < p < 10^4", 60):
        reports = verify_theorem_range(8, 10**4 - 1, "brute", workers=1)
        assert len(reports) == len(trial_primes(10**4)) - 4
        assert all(r.status == "pass" and r.method == "brute" for r in reports)


@pytest.mark.slow
def test_c3_chain_regime():
    with criterion(3, "valid chain for every prime in (10^4, 10^6)", 600):
        reports = verify_theorem_range(
            10**4 + 1, 10**6 - 1, "chain", workers=default_workers(), certificates=True
        )
        assert len(reports) == 78498 - 1229
        for r in reports:
            assert r.status == "pass" and r.method == "chain", r.p
            assert validate_chain(RepresentationChain.from_json(r.certificate)), r.p


def test_c4_d_plus_one_generator():
    with criterion(4, "d+1 generator: 2,3,7,5 then 11, 13, ..., 89 in order, replayable", 30):
        state = d_plus_one_generator(25)
        ordered = [q for q in trial_primes(100) if q >= 11]
        assert state.primes[:4] == [2, 3, 7, 5]
        assert state.primes[4:] == ordered[:21]
        # 2, 3, 7, 5 plus the twenty primes 11..89 fill 24 slots; the 25th is 97
        assert state.primes[4:24] == [q for q in ordered if q <= 89]
        assert state.primes[24] == 97
        assert replay_validate(state)


@pytest.mark.slow
def test_c5_d_plus_n_over_d_generator():
    with criterion(5, "d+n/d generator: opens 2,3,5,13,7; >= 12 valid steps; all primes < 20", 300):
        assert d_plus_n_over_d_generator(5).primes == [2, 3, 5, 13, 7]
        with pytest.raises(FactorBudgetExceeded) as info:
            d_plus_n_over_d_generator(10**6, max_iterations=10**6, candidates=2)
        state = info.value.state
        assert len(state.steps) >= 12
        assert replay_validate(state)
        assert set(trial_primes(19)) <= set(state.primes)


def test_c6_mullin():
    with criterion(6, "Mullin sequence opens 2,3,7,43,13,53,5", 1):
        state = mullin_state(7)
        assert state.primes == [2, 3, 7, 43, 13, 53, 5]
        n = 1
        for q in state.primes:
            assert q == min(trial_factor(n + 1))
            n *= q
        assert replay_validate(state)


def test_c7_statistics():
    with criterion(7, "M(11)=42, y(11)=7, y(5)=7, M(p) matches oracle for 7 < p <= 500", 60):
        assert compute_M(11) == 42
        assert compute_y(11) == 7
        assert compute_y(5) == 7
        for p in trial_primes(500):
            if p > 7:
                assert compute_M(p) == max(class_scan_witness(p, a) for a in range(p)), p


def _pv_pairs():
    return [(p, d) for p in trial_primes(1000) for d in range(2, 11) if (p - 1) % d == 0]


def test_c8_analytic_sanity():
    with criterion(8, "density, omega, character-sum bound and coset representatives for every pair", 120):
        assert squarefree_density_check(10**6).violations == []
        assert omega_bound_check(10**6).violations == []
        bound_failures, coset_failures = [], []
        for p, d in _pv_pairs():
            report = pv_partial_sum_check(p, d)
            for v in report.violations:
                (coset_failures if v.startswith("coset") else bound_failures).append((p, d, v))
        assert bound_failures == []
        assert coset_failures == [], f"no squarefree coset representative below p: {coset_failures}"


def test_c8_within_proposition_hypothesis():
    """The same checks with the coset claim restricted to d < log p + 1."""
    for p, d in _pv_pairs():
        report = pv_partial_sum_check(p, d)
        coset_ok = len(report.notes["coset_representatives"]) == d
        assert not [v for v in report.violations if not v.startswith("coset")]
        if d < math.log(p) + 1:
            assert coset_ok, (p, d)


def test_c9_primality_hardening():
    with criterion(9, "strong pseudoprimes rejected, agreement with sieve below 10^6", 30):
        sieve = get_sieve(10**6)
        psp = base2_strong_pseudoprimes(10**6, sieve.is_prime)
        assert psp[:3] == [2047, 3277, 4033]
        assert not any(is_prime_64(n) for n in psp)
        assert all(is_prime_64(n) == sieve.is_prime(n) for n in range(10**6 + 1))
