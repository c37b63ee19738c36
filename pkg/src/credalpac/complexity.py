"""Rademacher complexity of a finite loss class and the uniform deviation G_n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    ZERO_ONE,
    Dataset,
    Distribution,
    DomainSpace,
    HypothesisClass,
    LossFunction,
    _same_domain,
    empirical_risks,
    expected_risks,
    sample_dataset,
)
from .errors import EmptyDatasetError, SizeGuardError
from .seeding import DATA, SIGNS, SeedSpec, as_generator

EXACT_MAX_N = 20
_BLOCK = 1 << 14


@dataclass(frozen=True, eq=False)
class LossClass:
    """The functions ``z -> l(z, h)`` for ``h`` in a class, tabulated per outcome.

    ``table[j, k]`` is the value of the ``j``-th function at flattened outcome ``k``.
    Build from a hypothesis class with :meth:`of`, or from raw values with
    :meth:`from_values` (handy for hand-made function classes).
    """

    domain: DomainSpace
    table: np.ndarray
    lo: float
    hi: float
    hypothesis_class: Optional[HypothesisClass] = None
    loss: Optional[LossFunction] = None

    def __post_init__(self):
        table = np.array(self.table, dtype=float, ndmin=2)
        if table.shape[1] != self.domain.size or table.shape[0] < 1:
            raise ValueError(f"loss table shape {table.shape} does not fit domain of size {self.domain.size}")
        if table.min() < self.lo or table.max() > self.hi:
            raise ValueError("loss table values outside the declared range")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def of(cls, H: HypothesisClass, loss: LossFunction = ZERO_ONE) -> "LossClass":
        return cls(H.domain, loss.matrix(H), loss.lo, loss.hi, H, loss)

    @classmethod
    def from_values(cls, domain: DomainSpace, values, lo: float | None = None, hi: float | None = None) -> "LossClass":
        values = np.array(values, dtype=float, ndmin=2)
        lo = float(values.min()) if lo is None else lo
        hi = float(values.max()) if hi is None else hi
        return cls(domain, values, lo, hi)

    def __len__(self):
        return self.table.shape[0]

    def at(self, d: Dataset) -> np.ndarray:
        """Function values on the sample, shape ``(|A|, n)``."""
        _same_domain(self.domain, d.domain)
        return self.table[:, d.outcomes]


@dataclass(frozen=True)
class RademacherEstimate:
    value: float
    std_error: float
    method: str  # "exact" | "monte_carlo"
    n: int
    sample_count: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method,
            "n": self.n,
            "sample_count": self.sample_count,
        }


def _sign_block(start: int, stop: int, n: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(float)


def _sup_sums(signs: np.ndarray, values: np.ndarray) -> np.ndarray:
    # sup over the class of sum_i sigma_i f(z_i), one entry per sign vector
    return (signs @ values.T).max(axis=1)


def empirical_rademacher_exact(A: LossClass, d: Dataset) -> RademacherEstimate:
    """Average over all ``2^n`` sign vectors of the sup correlation with the sample."""
    n = d.n
    if n == 0:
        raise EmptyDatasetError("Rademacher complexity needs a non-empty sample")
    if n > EXACT_MAX_N:
        raise SizeGuardError(
            f"exact enumeration needs 2^{n} sign vectors; n is capped at {EXACT_MAX_N}, "
            "use empirical_rademacher_mc instead"
        )
    values = A.at(d)
    total = 2**n
    sums = []
    for start in range(0, total, _BLOCK):
        block = _sign_block(start, min(total, start + _BLOCK), n)
        sums.append(float(_sup_sums(block, values).sum()))
    # integer-valued losses keep every partial sum exact; divide once at the end
    return RademacherEstimate(math.fsum(sums) / (n * total), 0.0, "exact", n, total)


def empirical_rademacher_mc(A: LossClass, d: Dataset, draws: int, seed) -> RademacherEstimate:
    """Monte Carlo version over ``draws`` i.i.d. uniform sign vectors."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    n = d.n
    if n == 0:
        raise EmptyDatasetError("Rademacher complexity needs a non-empty sample")
    rng = as_generator(seed)
    values = A.at(d)
    sups = np.empty(draws)
    for start in range(0, draws, _BLOCK):
        stop = min(draws, start + _BLOCK)
        signs = 2.0 * rng.integers(0, 2, size=(stop - start, n)) - 1.0
        sups[start:stop] = _sup_sums(signs, values) / n
    se = float(sups.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return RademacherEstimate(float(sups.mean()), se, "monte_carlo", n, draws)


def rademacher_complexity(
    A: LossClass,
    p: Distribution,
    n: int,
    dataset_draws: int,
    sign_draws: int | None,
    seed,
) -> RademacherEstimate:
    """Average of empirical Rademacher values over fresh samples of size ``n`` from ``p``.

    ``sign_draws=None`` uses exact enumeration for each sample. The standard
    error is the spread of the per-sample values over ``sqrt(dataset_draws)``,
    which covers both sources of noise.
    """
    if dataset_draws < 1 or n < 1:
        raise ValueError("dataset_draws and n must be positive")
    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    values = np.empty(dataset_draws)
    for j in range(dataset_draws):
        d = sample_dataset(p, n, seed.generator(j, DATA))
        if sign_draws is None:
            est = empirical_rademacher_exact(A, d)
        else:
            est = empirical_rademacher_mc(A, d, sign_draws, seed.generator(j, SIGNS))
        values[j] = est.value
    se = float(values.std(ddof=1) / math.sqrt(dataset_draws)) if dataset_draws > 1 else 0.0
    method = "exact" if sign_draws is None else "monte_carlo"
    per_sample = 2**n if sign_draws is None else sign_draws
    return RademacherEstimate(float(values.mean()), se, method, n, per_sample * dataset_draws)


def sup_deviation(
    H: HypothesisClass,
    p: Distribution,
    d: Dataset,
    loss: LossFunction = ZERO_ONE,
    absolute: bool = False,
) -> tuple[float, int]:
    """``max_h L(h) - L_hat(h)`` (or its absolute value) and the lowest index attaining it."""
    gaps = expected_risks(H, p, loss) - empirical_risks(H, d, loss)
    if absolute:
        gaps = np.abs(gaps)
    i = int(np.argmax(gaps))
    return float(gaps[i]), i
