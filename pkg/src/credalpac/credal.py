"""Credal sets given by their extreme points, and realisability checks over them.

Expected risk is linear in the distribution, so for a fixed hypothesis the
maximum and minimum over the convex hull are attained at vertices. That
turns every sup/inf over the hull below into a finite scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    ZERO_ONE,
    Distribution,
    DomainSpace,
    Hypothesis,
    HypothesisClass,
    LossFunction,
    _loss_vector,
    _same_domain,
)
from .seeding import as_generator

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CredalSet:
    """Convex hull of finitely many distributions over one domain."""

    vertices: tuple[Distribution, ...]
    duplicates: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if not vertices:
            raise ValueError("a credal set needs at least one vertex")
        for v in vertices[1:]:
            _same_domain(vertices[0].domain, v.domain)
        dups = tuple(
            (i, j)
            for i in range(len(vertices))
            for j in range(i + 1, len(vertices))
            if vertices[i] == vertices[j]
        )
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "duplicates", dups)

    @classmethod
    def of(cls, *vertices: Distribution) -> "CredalSet":
        return cls(tuple(vertices))

    @property
    def domain(self) -> DomainSpace:
        return self.vertices[0].domain

    def __len__(self):
        return len(self.vertices)

    @property
    def masses(self) -> np.ndarray:
        """Vertex masses stacked as rows."""
        return np.stack([v.mass for v in self.vertices])

    def mixture(self, weights: Sequence[float]) -> Distribution:
        w = np.asarray(weights, dtype=float)
        return Distribution(self.domain, w @ self.masses)


def vertex_risks(h: Hypothesis, P: CredalSet, loss: LossFunction = ZERO_ONE) -> np.ndarray:
    _same_domain(h.domain, P.domain)
    return P.masses @ _loss_vector(h, loss)


def risk_table(H: HypothesisClass, P: CredalSet, loss: LossFunction = ZERO_ONE) -> np.ndarray:
    """``R[h, v]`` = expected risk of hypothesis ``h`` under vertex ``v``."""
    _same_domain(H.domain, P.domain)
    return loss.matrix(H) @ P.masses.T


def upper_risk(h: Hypothesis, P: CredalSet, loss: LossFunction = ZERO_ONE) -> tuple[float, int]:
    """Worst-case expected risk over the hull and the vertex attaining it."""
    risks = vertex_risks(h, P, loss)
    k = int(np.argmax(risks))
    return float(risks[k]), k


def lower_risk(h: Hypothesis, P: CredalSet, loss: LossFunction = ZERO_ONE) -> tuple[float, int]:
    risks = vertex_risks(h, P, loss)
    k = int(np.argmin(risks))
    return float(risks[k]), k


def support_union(P: CredalSet) -> frozenset[int]:
    return frozenset(int(k) for k in np.flatnonzero((P.masses > 0).any(axis=0)))


class CredalRealisability(NamedTuple):
    holds: bool
    witnesses: list[tuple[int, int]]


class UniformRealisability(NamedTuple):
    holds: bool
    # hypotheses correct on the whole vertex-support union
    hull_witnesses: list[int]
    # (vertex, hypothesis) pairs with zero risk: the vertex-only reading
    vertex_witnesses: list[tuple[int, int]]
    every_vertex_realisable: bool


@dataclass(frozen=True)
class RealisabilityReport:
    credal_realisable: bool
    uniform_credal_realisable: bool
    witnesses: list[tuple[int, int]]
    uniform_witnesses: list[int]
    vertex_witnesses: list[tuple[int, int]]
    every_vertex_realisable: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "credal_realisable": self.credal_realisable,
            "uniform_credal_realisable": self.uniform_credal_realisable,
            "every_vertex_realisable": self.every_vertex_realisable,
            "witnesses": [{"hypothesis": h, "vertex": v} for h, v in self.witnesses],
            "uniform_witnesses": list(self.uniform_witnesses),
            "vertex_witnesses": [{"vertex": v, "hypothesis": h} for v, h in self.vertex_witnesses],
            "tolerance": self.tolerance,
        }


def check_credal_realisability(
    H: HypothesisClass, P: CredalSet, tol: float = DEFAULT_TOL, loss: LossFunction = ZERO_ONE
) -> CredalRealisability:
    """Is there a hypothesis with zero risk under some member of the hull?

    For fixed ``h`` the hull minimum equals the vertex minimum, so scanning
    the ``(h, vertex)`` grid is exact. Witnesses are ``(hypothesis, vertex)``.
    """
    R = risk_table(H, P, loss) - loss.lo
    hits = np.argwhere(R <= tol)
    witnesses = [(int(h), int(v)) for h, v in hits]
    return CredalRealisability(bool(witnesses), witnesses)


def check_uniform_credal_realisability(
    H: HypothesisClass, P: CredalSet, tol: float = DEFAULT_TOL, loss: LossFunction = ZERO_ONE
) -> UniformRealisability:
    """Does every member of the hull admit a zero-risk hypothesis?

    Any point in the relative interior of the hull charges every outcome in
    the union of vertex supports. A hypothesis has zero risk there only if its
    loss is minimal on the whole union, and such a hypothesis is then zero-risk
    on every face as well. So the hull-wide condition holds iff one hypothesis
    is correct on ``support_union(P)``.
    """
    support = sorted(support_union(P))
    L = loss.matrix(H)[:, support] - loss.lo
    hull_witnesses = [int(i) for i in np.flatnonzero((L <= 0).all(axis=1))]

    R = risk_table(H, P, loss) - loss.lo
    vertex_witnesses = [(int(v), int(h)) for h, v in np.argwhere(R <= tol)]
    vertex_witnesses.sort()
    every_vertex = bool((R <= tol).any(axis=0).all())
    return UniformRealisability(bool(hull_witnesses), hull_witnesses, vertex_witnesses, every_vertex)


def realisability_report(
    H: HypothesisClass, P: CredalSet, tol: float = DEFAULT_TOL, loss: LossFunction = ZERO_ONE
) -> RealisabilityReport:
    existential = check_credal_realisability(H, P, tol, loss)
    uniform = check_uniform_credal_realisability(H, P, tol, loss)
    return RealisabilityReport(
        credal_realisable=existential.holds,
        uniform_credal_realisable=uniform.holds,
        witnesses=existential.witnesses,
        uniform_witnesses=uniform.hull_witnesses,
        vertex_witnesses=uniform.vertex_witnesses,
        every_vertex_realisable=uniform.every_vertex_realisable,
        tolerance=tol,
    )


def per_vertex_minimisers(
    H: HypothesisClass, P: CredalSet, loss: LossFunction = ZERO_ONE
) -> list[tuple[int, int, float]]:
    """``(vertex, best hypothesis, its risk)`` for each vertex, ties to the lowest index."""
    R = risk_table(H, P, loss)
    best = np.argmin(R, axis=0)
    return [(v, int(best[v]), float(R[best[v], v])) for v in range(len(P))]


def mixture_weights(P: CredalSet, count: int, seed) -> np.ndarray:
    """``count`` weight vectors drawn uniformly from the simplex (Dirichlet(1))."""
    rng = as_generator(seed)
    return rng.dirichlet(np.ones(len(P)), size=count)


def sample_mixture(P: CredalSet, seed) -> Distribution:
    if len(P) == 1:
        return P.vertices[0]
    return P.mixture(mixture_weights(P, 1, seed)[0])
