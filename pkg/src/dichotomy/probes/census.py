"""Exact counting census for the expressibility-limitation inequalities.

All arithmetic is on Python integers; nothing is rounded.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

DEFAULT_CAP = 64


def arity_threshold(n: int, m: int, cap: int = DEFAULT_CAP) -> int | None:
    """Least N with 2^(N^(n+1)) > m^2 * 2^(N^n)."""
    for big_n in range(1, cap + 1):
        if pow(2, big_n ** (n + 1)) > m * m * pow(2, big_n ** n):
            return big_n
    return None


def arity_threshold_by_exponent(n: int, m: int, cap: int = DEFAULT_CAP) -> int | None:
    """Same threshold through the exponent form N^n (N-1) >= bitlength(m^2)."""
    need = (m * m).bit_length()
    for big_n in range(1, cap + 1):
        if big_n ** n * (big_n - 1) >= need:
            return big_n
    return None


def root_threshold(n: int, m: int, cap: int = DEFAULT_CAP) -> int | None:
    """Least N with N > (log2 m^2)^(1/n), i.e. 2^(N^n) > m^2."""
    for big_n in range(1, cap + 1):
        if pow(2, big_n ** n) > m * m:
            return big_n
    return None


def _least_and_eventual(holds, cap: int):
    values = [holds(N) for N in range(1, cap + 1)]
    least = next((i + 1 for i, v in enumerate(values) if v), None)
    if not values[-1]:
        return least, None
    eventual = cap
    while eventual > 1 and values[eventual - 2]:
        eventual -= 1
    return least, eventual


@dataclass(frozen=True)
class CensusReport:
    n: int
    m: int
    cap: int
    arity_threshold: int | None  # 2^(N^(n+1)) > m^2 2^(N^n)
    root_threshold: int | None  # N^n > log2(m^2)
    injection_least: int | None  # m * N! < 2^(N^n)
    injection_from: int | None  # holds for every N from here up to the cap
    equivalence_least: int | None  # m * N^N < 2^(N^n)
    equivalence_from: int | None
    values: dict  # exact integers at the arity threshold

    @property
    def root_sufficient(self) -> bool:
        """The root bound implies the arity inequality once N >= 2."""
        if self.arity_threshold is None or self.root_threshold is None:
            return False
        return self.arity_threshold <= max(self.root_threshold, 2)

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "cap": self.cap, "arity_threshold": self.arity_threshold,
                "root_threshold": self.root_threshold, "root_sufficient": self.root_sufficient,
                "injection_least": self.injection_least, "injection_from": self.injection_from,
                "equivalence_least": self.equivalence_least, "equivalence_from": self.equivalence_from,
                "values": {k: v for k, v in self.values.items()}}


def count_census(n: int, m: int, cap: int = DEFAULT_CAP) -> CensusReport:
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    at = arity_threshold(n, m, cap)
    assert at == arity_threshold_by_exponent(n, m, cap)
    rt = root_threshold(n, m, cap)
    # x < 2^e exactly when x has at most e bits
    inj = _least_and_eventual(lambda N: (m * factorial(N)).bit_length() <= N ** n, cap)
    eqv = _least_and_eventual(lambda N: (m * N ** N).bit_length() <= N ** n, cap)
    values = {}
    if at is not None:
        values = {"N": at, "two_pow_N_pow_n": pow(2, at ** n), "two_pow_N_pow_n1": pow(2, at ** (n + 1)),
                  "m_squared": m * m, "N_factorial": factorial(at), "N_pow_N": at ** at}
    return CensusReport(n, m, cap, at, rt, inj[0], inj[1], eqv[0], eqv[1], values)
