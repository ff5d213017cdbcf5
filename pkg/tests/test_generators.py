import dataclasses
import math
import random

import pytest

from oracles import divisors_in_class, exhaustive_subset_products, trial_factor, trial_primes
from smoothrep.arith import jacobi
from smoothrep.errors import CapExceeded, FactorBudgetExceeded, NotFound, UsageError
from smoothrep.generators import (
    GeneratorState,
    StepRecord,
    d_plus_n_over_d_generator,
    d_plus_one_generator,
    least_factor_policy,
    mullin_sequence,
    mullin_state,
    replay_validate,
    subset_product_search,
)


def test_mullin_examples():
    assert mullin_sequence(1) == [2]
    assert mullin_sequence(4) == [2, 3, 7, 43]
    seq = mullin_sequence(7)
    assert seq == [2, 3, 7, 43, 13, 53, 5]
    # independent trial-division cross-check of every step
    n = 1
    for q in seq:
        assert q == min(trial_factor(n + 1))
        n *= q


def test_mullin_replay_and_large_terms():
    state = mullin_state(12)
    assert state.primes[7:9] == [6221671, 38709183810571]
    assert replay_validate(state)


def test_mullin_budget_reports_partial_state():
    # 1 + 2*3*7*43*13*53*5*6221671*38709183810571*139*2801*11*17*5471*52662739*23003 needs rho beyond this budget
    with pytest.raises(FactorBudgetExceeded) as info:
        mullin_state(17, trial_bound=100, max_iterations=10)
    assert info.value.state is not None
    assert replay_validate(info.value.state)


def test_subset_product_examples():
    assert subset_product_search({2, 3, 5, 7}, 10, 11) == (2, 5)
    assert subset_product_search({2, 3, 5, 7}, 1, 11) == ()
    with pytest.raises(NotFound):
        subset_product_search({2, 3}, 7, 11)
    with pytest.raises(UsageError):
        subset_product_search({2, 3}, 0, 11)
    with pytest.raises(CapExceeded):
        subset_product_search(trial_primes(200), 5, 211, cap=40)


def test_subset_product_random_against_enumeration():
    rng = random.Random(5)
    primes = trial_primes(400)
    for _ in range(300):
        p = rng.choice(primes[5:])
        subset = sorted(rng.sample([q for q in primes if q != p], rng.randrange(0, 15)))
        target = rng.randrange(1, p)
        reachable = exhaustive_subset_products(subset, p)
        try:
            found = subset_product_search(subset, target, p)
        except NotFound:
            assert target not in reachable
        else:
            assert set(found) <= set(subset)
            assert math.prod(found) % p == target


def test_d_plus_one_examples():
    assert d_plus_one_generator(4).primes == [2, 3, 7, 5]
    state = d_plus_one_generator(10)
    assert state.primes == [2, 3, 7, 5, 11, 13, 17, 19, 23, 29]
    assert replay_validate(state)


def test_d_plus_one_step_eleven_certificate():
    state = d_plus_one_generator(5)
    rec = state.steps[4]
    assert rec.chosen_prime == 11
    d = rec.certificate["d"]
    # both divisors of 210 congruent to -1 mod 11 are valid; the search returns the first
    assert divisors_in_class([2, 3, 5, 7], -1, 11) == [10, 21]
    assert d == 10
    assert 210 % d == 0 and (d + 1) % 11 == 0


def test_d_plus_one_order_property():
    state = d_plus_one_generator(60)
    assert state.primes[:4] == [2, 3, 7, 5]
    assert state.primes[4:] == [q for q in trial_primes(400) if q >= 11][:56]
    assert replay_validate(state)


def test_d_plus_one_beyond_subset_cap():
    state = d_plus_one_generator(48)
    assert len(state.primes) > 40
    assert replay_validate(state)


def test_divisor_search_falls_back_to_representation(monkeypatch):
    import smoothrep.generators as gen
    import smoothrep.represent as rep

    monkeypatch.setattr(gen, "DEFAULTS", dataclasses.replace(gen.DEFAULTS, subset_cap=3))
    calls = []
    real = rep.represent
    monkeypatch.setattr(rep, "represent", lambda p, a: calls.append(p) or real(p, a))
    state = d_plus_one_generator(30)
    assert calls
    assert state.primes[4:] == [q for q in trial_primes(200) if q >= 11][:26]
    assert replay_validate(state)


def test_replay_detects_tampering():
    state = d_plus_one_generator(10)
    rec = state.steps[6]
    cert = dict(rec.certificate, d=rec.certificate["d"] + 1)
    state.steps[6] = dataclasses.replace(rec, certificate=cert)
    result = replay_validate(state)
    assert not result and result.failed_step == 6


def test_replay_detects_wrong_literal_choice():
    state = d_plus_one_generator(4)
    bad = StepRecord("d_plus_one", 11, {"d": 21, "subset": [3, 7], "mode": "literal"})
    state.steps[3] = bad
    result = replay_validate(state)
    assert not result and result.failed_step == 3


def test_dnd_opening():
    state = d_plus_n_over_d_generator(5)
    assert state.primes == [2, 3, 5, 13, 7]
    rec = state.steps[3]
    assert rec.certificate["d"] == 3 and rec.certificate["value"] == 13
    assert replay_validate(state)


def test_dnd_legendre_branches():
    state = d_plus_n_over_d_generator(20, max_iterations=10**5)
    assert replay_validate(state)
    assert set(trial_primes(19)) <= set(state.primes)
    n = 1
    for i, rec in enumerate(state.steps):
        branch = rec.certificate["branch"]
        if branch == "-1":
            p = rec.certificate["target"]
            assert jacobi(-n, p) == -1
            assert jacobi(rec.chosen_prime, p) == -1
            if i + 1 < len(state.steps):
                assert state.steps[i + 1].chosen_prime == p
        elif branch == "+1":
            assert jacobi(-n, rec.chosen_prime) == 1
        n *= rec.chosen_prime


def test_dnd_custom_policy():
    state = d_plus_n_over_d_generator(8, policy=least_factor_policy())
    assert replay_validate(state)
    assert state.primes[:3] == [2, 3, 5]
    for rec in state.steps:
        assert rec.certificate["branch"] == "custom"


def test_state_jsonl_round_trip_and_resume():
    state = d_plus_n_over_d_generator(12, max_iterations=10**5)
    text = state.to_jsonl()
    assert len(text.splitlines()) == 12
    again = GeneratorState.from_jsonl(text)
    assert again.primes == state.primes and again.n == state.n
    assert replay_validate(again)
    head = GeneratorState.from_jsonl("".join(text.splitlines(True)[:7]))
    resumed = d_plus_n_over_d_generator(12, state=head, max_iterations=10**5)
    assert resumed.primes == state.primes


def test_mullin_state_wrapped_replays():
    state = GeneratorState.from_records(mullin_state(7).steps)
    assert replay_validate(state)
