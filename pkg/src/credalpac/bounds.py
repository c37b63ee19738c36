"""Closed-form concentration inequalities and PAC epsilon formulas.

Logarithms are natural throughout. Tail bounds return a :class:`BoundReport`
carrying the raw expression and its value clipped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

KINDS = (
    "markov",
    "hoeffding",
    "mcdiarmid",
    "union",
    "pac_finite_realisable",
    "pac_finite_agnostic",
    "pac_rademacher",
)


@dataclass(frozen=True)
class BoundReport:
    kind: str
    inputs: dict = field(compare=False)
    raw_value: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}")

    @property
    def clipped_value(self) -> float:
        return min(1.0, max(0.0, self.raw_value))

    def __float__(self):
        return self.clipped_value

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inputs": dict(self.inputs),
            "raw_value": self.raw_value,
            "clipped_value": self.clipped_value,
        }


def _check_delta(delta: float, *, closed: bool = True) -> None:
    ok = 0 < delta <= 1 if closed else 0 < delta < 1
    if not ok:
        raise ValueError(f"delta must lie in (0, 1{']' if closed else ')'}, got {delta}")


def _check_class_size(class_size: int) -> None:
    if class_size < 1:
        raise ValueError(f"class_size must be >= 1, got {class_size}")


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")


def markov_bound(expectation: float, t: float) -> BoundReport:
    """P[Z >= t] <= E[Z] / t for non-negative Z."""
    if expectation < 0:
        raise ValueError("Markov's inequality needs a non-negative variable")
    if t <= 0:
        raise ValueError("t must be positive")
    return BoundReport("markov", {"expectation": expectation, "t": t}, expectation / t)


def hoeffding_tail(n: int, eps: float, ranges: Sequence[float]) -> BoundReport:
    """Tail of the sample mean: P[mean >= E[mean] + eps] for independent bounded terms.

    ``ranges`` are the widths ``b_i - a_i`` of the individual variables.
    """
    _check_n(n)
    widths = [float(w) for w in ranges]
    if len(widths) != n:
        raise ValueError(f"expected {n} ranges, got {len(widths)}")
    if any(w <= 0 for w in widths):
        raise ValueError("every range width must be positive")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    denom = math.fsum(w * w for w in widths)
    raw = math.exp(-2.0 * n * n * eps * eps / denom)
    return BoundReport("hoeffding", {"n": n, "eps": eps, "sum_sq_width": denom}, raw)


def mcdiarmid_tail(eps: float, c: Sequence[float]) -> BoundReport:
    """P[f - E f >= eps] <= exp(-2 eps^2 / sum c_i^2) under bounded differences ``c_i``."""
    cs = [float(ci) for ci in c]
    if not cs or any(ci <= 0 for ci in cs):
        raise ValueError("bounded-difference constants must be positive")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    denom = math.fsum(ci * ci for ci in cs)
    raw = math.exp(-2.0 * eps * eps / denom)
    return BoundReport("mcdiarmid", {"eps": eps, "sum_sq_c": denom, "count": len(cs)}, raw)


def gn_tail(n: int, eps: float) -> BoundReport:
    """Tail of the uniform deviation for losses in [0, 1]: exp(-2 n eps^2)."""
    _check_n(n)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    # McDiarmid with c_i = 1/n
    return BoundReport("mcdiarmid", {"n": n, "eps": eps, "sum_sq_c": 1.0 / n}, math.exp(-2.0 * n * eps * eps))


def union_bound(probs: Sequence[float]) -> BoundReport:
    ps = [float(p) for p in probs]
    bad = [p for p in ps if not 0.0 <= p <= 1.0]
    if bad:
        raise ValueError(f"probabilities outside [0, 1]: {bad}")
    return BoundReport("union", {"count": len(ps)}, math.fsum(ps))


def _eps_finite_realisable(class_size: float, delta: float, n: int) -> float:
    return (math.log(class_size) + math.log(1.0 / delta)) / n


def eps_finite_realisable(class_size: int, delta: float, n: int) -> float:
    """Risk level the ERM stays under with probability >= 1 - delta when some hypothesis is perfect."""
    _check_class_size(class_size)
    _check_delta(delta)
    _check_n(n)
    return _eps_finite_realisable(class_size, delta, n)


def realisable_tail(class_size: int, n: int, eps: float) -> BoundReport:
    """The inverted form |H| exp(-eps n) of :func:`eps_finite_realisable`."""
    _check_class_size(class_size)
    _check_n(n)
    raw = class_size * math.exp(-eps * n)
    return BoundReport("pac_finite_realisable", {"class_size": class_size, "n": n, "eps": eps}, raw)


def sample_complexity_realisable(class_size: int, delta: float, eps: float) -> int:
    _check_class_size(class_size)
    _check_delta(delta)
    if eps <= 0:
        raise ValueError("eps must be positive")
    need = (math.log(class_size) + math.log(1.0 / delta)) / eps
    # absorb round-off when eps itself came from eps_finite_realisable
    return max(0, math.ceil(need * (1.0 - 1e-12)))


def _eps_finite_agnostic(class_size: float, delta: float, n: int) -> float:
    return math.sqrt(2.0 * (math.log(class_size) + math.log(2.0 / delta)) / n)


def eps_finite_agnostic(class_size: int, delta: float, n: int) -> float:
    _check_class_size(class_size)
    _check_delta(delta)
    _check_n(n)
    return _eps_finite_agnostic(class_size, delta, n)


def agnostic_tail(class_size: int, n: int, eps: float) -> BoundReport:
    """Inverse of :func:`eps_finite_agnostic`: 2 |H| exp(-n eps^2 / 2)."""
    _check_class_size(class_size)
    _check_n(n)
    raw = 2.0 * class_size * math.exp(-n * eps * eps / 2.0)
    return BoundReport("pac_finite_agnostic", {"class_size": class_size, "n": n, "eps": eps}, raw)


def _eps_rademacher(rademacher: float, delta: float, n: int) -> float:
    return 4.0 * rademacher + math.sqrt(2.0 * math.log(2.0 / delta) / n)


def eps_rademacher(rademacher: float, delta: float, n: int) -> float:
    if rademacher < 0:
        raise ValueError("Rademacher complexity is non-negative")
    _check_delta(delta, closed=False)
    _check_n(n)
    return _eps_rademacher(rademacher, delta, n)
