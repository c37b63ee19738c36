"""Finite probability spaces, lookup-table hypotheses, losses and risks.

Outcomes of a domain with ``input_count`` inputs and ``label_count`` labels
are flattened as ``x * label_count + y``. All values are immutable; numpy
arrays held by them are marked read-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainMismatchError, EmptyDatasetError
from .seeding import as_generator

NORMALIZATION_TOL = 1e-9


def _frozen(array) -> np.ndarray:
    out = np.array(array, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DomainSpace:
    input_count: int
    label_count: int

    def __post_init__(self):
        if self.input_count < 1 or self.label_count < 1:
            raise ValueError(f"domain sizes must be >= 1, got {self.input_count}x{self.label_count}")

    @property
    def size(self) -> int:
        return self.input_count * self.label_count

    def outcome(self, x: int, y: int) -> int:
        if not (0 <= x < self.input_count and 0 <= y < self.label_count):
            raise DomainMismatchError(f"pair ({x}, {y}) outside {self.input_count}x{self.label_count} domain")
        return x * self.label_count + y

    def pair(self, outcome: int) -> tuple[int, int]:
        return divmod(int(outcome), self.label_count)


def _same_domain(a: DomainSpace, b: DomainSpace) -> None:
    if a != b:
        raise DomainMismatchError(f"domain mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability mass over the flattened outcomes of a domain.

    The input vector must sum to one within ``1e-9``; it is then divided by its
    sum once so that downstream arithmetic sees an exactly normalised vector.
    """

    domain: DomainSpace
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float).ravel()
        if mass.shape != (self.domain.size,):
            raise ValueError(f"mass has length {mass.size}, domain needs {self.domain.size}")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ValueError("mass entries must be finite and non-negative")
        total = float(mass.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"mass sums to {total!r}, not 1 (tolerance {NORMALIZATION_TOL})")
        object.__setattr__(self, "mass", _frozen(mass / total))

    @classmethod
    def point(cls, domain: DomainSpace, x: int, y: int) -> "Distribution":
        mass = np.zeros(domain.size)
        mass[domain.outcome(x, y)] = 1.0
        return cls(domain, mass)

    @classmethod
    def uniform(cls, domain: DomainSpace) -> "Distribution":
        return cls(domain, np.full(domain.size, 1.0 / domain.size))

    @classmethod
    def labelled_by(cls, h: "Hypothesis", input_mass: Sequence[float] | None = None) -> "Distribution":
        """Inputs drawn from ``input_mass`` (uniform by default), labels given by ``h``."""
        domain = h.domain
        if input_mass is None:
            input_mass = np.full(domain.input_count, 1.0 / domain.input_count)
        mass = np.zeros(domain.size)
        for x, px in enumerate(input_mass):
            mass[domain.outcome(x, h.table[x])] = px
        return cls(domain, mass)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(int(k) for k in np.flatnonzero(self.mass > 0))

    def mix(self, other: "Distribution", weight: float) -> "Distribution":
        """``weight * self + (1 - weight) * other``."""
        _same_domain(self.domain, other.domain)
        return Distribution(self.domain, weight * self.mass + (1.0 - weight) * other.mass)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.mass, other.mass)

    def __hash__(self):
        return hash((self.domain, self.mass.tobytes()))

    def __repr__(self):
        return f"Distribution({self.domain.input_count}x{self.domain.label_count}, mass={self.mass.tolist()})"


@dataclass(frozen=True)
class Hypothesis:
    """A total classifier given as a lookup table ``x -> table[x]``."""

    domain: DomainSpace
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if len(table) != self.domain.input_count:
            raise ValueError(f"table has {len(table)} entries, domain has {self.domain.input_count} inputs")
        if any(not 0 <= v < self.domain.label_count for v in table):
            raise ValueError(f"table {table} has labels outside [0, {self.domain.label_count})")
        object.__setattr__(self, "table", table)

    def __call__(self, x: int) -> int:
        return self.table[x]


@dataclass(frozen=True)
class HypothesisClass:
    """Ordered finite model space; the order breaks ERM ties."""

    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        hyps = tuple(self.hypotheses)
        if not hyps:
            raise ValueError("hypothesis class must be non-empty")
        domain = hyps[0].domain
        for h in hyps[1:]:
            _same_domain(domain, h.domain)
        if len({h.table for h in hyps}) != len(hyps):
            raise ValueError("hypothesis tables must be pairwise distinct")
        object.__setattr__(self, "hypotheses", hyps)

    @classmethod
    def from_tables(cls, domain: DomainSpace, tables: Iterable[Sequence[int]]) -> "HypothesisClass":
        return cls(tuple(Hypothesis(domain, tuple(t)) for t in tables))

    @classmethod
    def all_tables(cls, domain: DomainSpace, cap: int = 4096) -> "HypothesisClass":
        """Every map X -> Y, in lexicographic order of the table (x = 0 most significant)."""
        count = domain.label_count ** domain.input_count
        if count > cap:
            raise ValueError(f"all_tables would create {count} hypotheses, above the cap of {cap}")
        return cls.from_tables(domain, itertools.product(range(domain.label_count), repeat=domain.input_count))

    @property
    def domain(self) -> DomainSpace:
        return self.hypotheses[0].domain

    def __len__(self):
        return len(self.hypotheses)

    def __getitem__(self, i):
        return self.hypotheses[i]

    def __iter__(self):
        return iter(self.hypotheses)

    def index(self, h: Hypothesis) -> int:
        return self.hypotheses.index(h)

    @cached_property
    def tables(self) -> np.ndarray:
        return _frozen([h.table for h in self.hypotheses])


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered training sample stored as flattened outcome indices."""

    domain: DomainSpace
    outcomes: np.ndarray

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=np.int64).ravel()
        if outcomes.size and (outcomes.min() < 0 or outcomes.max() >= self.domain.size):
            raise DomainMismatchError("dataset outcome index outside the domain")
        object.__setattr__(self, "outcomes", _frozen(outcomes))

    @classmethod
    def from_pairs(cls, domain: DomainSpace, pairs: Iterable[tuple[int, int]]) -> "Dataset":
        return cls(domain, [domain.outcome(x, y) for x, y in pairs])

    @property
    def n(self) -> int:
        return int(self.outcomes.size)

    def __len__(self):
        return self.n

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [self.domain.pair(k) for k in self.outcomes]

    def counts(self) -> np.ndarray:
        return np.bincount(self.outcomes, minlength=self.domain.size)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.outcomes, other.outcomes)

    def __hash__(self):
        return hash((self.domain, self.outcomes.tobytes()))


@dataclass(frozen=True)
class LossFunction:
    """A bounded loss ``l((x, y), h)`` that depends on the true and predicted label.

    ``zero_one`` is the built-in; :meth:`bounded` wraps any other function of
    ``(y_true, y_pred)`` with a declared range, which the concentration bounds need.
    """

    kind: str
    lo: float
    hi: float
    fn: Callable[[int, int], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError("loss range must have lo <= hi")
        if self.kind != "zero_one" and self.fn is None:
            raise ValueError(f"loss kind {self.kind!r} needs a function")

    @classmethod
    def bounded(cls, fn: Callable[[int, int], float], lo: float, hi: float, name: str = "custom") -> "LossFunction":
        return cls(name, float(lo), float(hi), fn)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __call__(self, y_true: int, y_pred: int) -> float:
        if self.kind == "zero_one":
            return float(y_true != y_pred)
        value = float(self.fn(y_true, y_pred))
        if not self.lo <= value <= self.hi:
            raise ValueError(f"loss value {value} outside declared range [{self.lo}, {self.hi}]")
        return value

    def label_matrix(self, label_count: int) -> np.ndarray:
        """``M[y_true, y_pred]``."""
        if self.kind == "zero_one":
            return 1.0 - np.eye(label_count)
        return np.array([[self(y, yp) for yp in range(label_count)] for y in range(label_count)])

    def matrix(self, H: HypothesisClass) -> np.ndarray:
        """Loss of every hypothesis on every outcome, shape ``(|H|, |X|*|Y|)``."""
        return _loss_matrix(H, self)


ZERO_ONE = LossFunction("zero_one", 0.0, 1.0)


def _loss_matrix(H: HypothesisClass, loss: LossFunction) -> np.ndarray:
    domain = H.domain
    M = loss.label_matrix(domain.label_count)
    ys = np.arange(domain.label_count)
    # out[h, x, y] = M[y, table[h, x]]
    out = M[ys[None, None, :], H.tables[:, :, None]]
    return out.reshape(len(H), domain.size)


def _loss_vector(h: Hypothesis, loss: LossFunction) -> np.ndarray:
    return _loss_matrix(HypothesisClass((h,)), loss)[0]


class Minimiser(NamedTuple):
    hypothesis: Hypothesis
    risk: float


def zero_one_loss(pair: tuple[int, int], h: Hypothesis) -> float:
    x, y = pair
    h.domain.outcome(x, y)
    return 1.0 if h.table[x] != y else 0.0


def expected_risk(h: Hypothesis, p: Distribution, loss: LossFunction = ZERO_ONE) -> float:
    _same_domain(h.domain, p.domain)
    return float(np.dot(p.mass, _loss_vector(h, loss)))


def empirical_risk(h: Hypothesis, d: Dataset, loss: LossFunction = ZERO_ONE) -> float:
    _same_domain(h.domain, d.domain)
    if d.n == 0:
        raise EmptyDatasetError("empirical risk needs at least one example")
    return float(np.dot(d.counts(), _loss_vector(h, loss)) / d.n)


def empirical_distribution(d: Dataset) -> Distribution:
    if d.n == 0:
        raise EmptyDatasetError("empty dataset has no empirical distribution")
    return Distribution(d.domain, d.counts() / d.n)


def empirical_risks(H: HypothesisClass, d: Dataset, loss: LossFunction = ZERO_ONE) -> np.ndarray:
    _same_domain(H.domain, d.domain)
    if d.n == 0:
        raise EmptyDatasetError("empirical risk needs at least one example")
    return loss.matrix(H) @ d.counts() / d.n


def expected_risks(H: HypothesisClass, p: Distribution, loss: LossFunction = ZERO_ONE) -> np.ndarray:
    _same_domain(H.domain, p.domain)
    return loss.matrix(H) @ p.mass


def erm(H: HypothesisClass, d: Dataset, loss: LossFunction = ZERO_ONE) -> Minimiser:
    """Empirical risk minimiser; ties go to the lowest index in class order."""
    risks = empirical_risks(H, d, loss)
    i = int(np.argmin(risks))
    return Minimiser(H[i], float(risks[i]))


def expected_risk_minimiser(H: HypothesisClass, p: Distribution, loss: LossFunction = ZERO_ONE) -> Minimiser:
    risks = expected_risks(H, p, loss)
    i = int(np.argmin(risks))
    return Minimiser(H[i], float(risks[i]))


def excess_risk(H: HypothesisClass, d: Dataset, p: Distribution, loss: LossFunction = ZERO_ONE) -> float:
    h_hat, _ = erm(H, d, loss)
    _, best = expected_risk_minimiser(H, p, loss)
    # minimiser optimality; clamp round-off from the separate dot products
    return max(0.0, expected_risk(h_hat, p, loss) - best)


def is_realisable(H: HypothesisClass, p: Distribution, loss: LossFunction = ZERO_ONE, tol: float = 1e-9) -> bool:
    return expected_risk_minimiser(H, p, loss).risk - loss.lo <= tol


def sample_outcomes(p: Distribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of flattened outcome indices."""
    cdf = np.cumsum(p.mass)
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    # cumulative round-off can leave cdf[-1] a hair below 1
    last = int(np.flatnonzero(p.mass > 0)[-1])
    return np.minimum(idx, last)


def sample_dataset(p: Distribution, n: int, seed) -> Dataset:
    """Draw ``n`` i.i.d. pairs from ``p``.

    ``seed`` may be a :class:`~credalpac.seeding.SeedSpec`, an integer or a
    numpy Generator; equal seeds give equal datasets.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return Dataset(p.domain, sample_outcomes(p, n, as_generator(seed)))
