"""Search and factoring budgets, overridable through environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_PREFIX = "SMOOTHREP_"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


@dataclass(frozen=True)
class Budgets:
    trial_bound: int = 10**6
    rho_iterations: int = 10**7
    sieve_limit: int = 10**6
    q_scan_limit: int = 104729  # the 10^4-th prime
    scan_cap: int = 10**7
    heap_budget: int = 5 * 10**7
    subset_cap: int = 40
    primality_rounds: int = 40

    @classmethod
    def from_env(cls) -> "Budgets":
        base = cls()
        return cls(
            trial_bound=_env_int("TRIAL_BOUND", base.trial_bound),
            rho_iterations=_env_int("FACTOR_ITERATIONS", base.rho_iterations),
            sieve_limit=_env_int("SIEVE_LIMIT", base.sieve_limit),
            q_scan_limit=_env_int("Q_SCAN_LIMIT", base.q_scan_limit),
            scan_cap=_env_int("SCAN_CAP", base.scan_cap),
            heap_budget=_env_int("HEAP_BUDGET", base.heap_budget),
            subset_cap=_env_int("SUBSET_CAP", base.subset_cap),
            primality_rounds=_env_int("PRIMALITY_ROUNDS", base.primality_rounds),
        )


DEFAULTS = Budgets.from_env()
