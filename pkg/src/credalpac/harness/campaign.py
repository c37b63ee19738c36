"""Seeded Monte Carlo campaigns over classical and credal training regimes."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .. import bounds
from ..core import Distribution, HypothesisClass, LossFunction, ZERO_ONE, sample_outcomes
from ..credal import CredalSet, mixture_weights, risk_table
from ..seeding import DATA, SELECT, SeedSpec, as_generator
from .config import ExperimentConfig, Instance
from .report import Calibration, ViolationReport, ViolationRow

log = logging.getLogger(__name__)

SLACK_SE = 3.0
UNCALIBRATABLE = "uncalibratable on grid"


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    training_distribution: str
    erm_index: int
    empirical_risk: float
    test_risk: float
    worst_case_risk: float
    worst_case_vertex: int
    excess_risk: float
    sup_deviation: float
    abs_sup_deviation: float


def _vertex_choice(P: CredalSet, mode: str, H: HypothesisClass | None, loss: LossFunction, vertex: int = 0) -> int | None:
    """Vertex picked by a deterministic mode, or None for the random modes."""
    if mode == "fixed_vertex":
        if not 0 <= vertex < len(P):
            raise ValueError(f"vertex {vertex} out of range for {len(P)} vertices")
        return vertex
    if mode in ("uniform_vertex", "random_mixture"):
        return None
    if mode not in ("oracle_aligned", "adversarial"):
        raise ValueError(f"unknown training mode {mode!r}")
    if H is None:
        raise ValueError(f"mode {mode} needs the hypothesis class")
    R = risk_table(H, P, loss)
    if mode == "oracle_aligned":
        # minimax hypothesis, then the vertex under which it does best
        h_star = int(np.argmin(R.max(axis=1)))
        return int(np.argmin(R[h_star]))
    return int(np.argmax(R.min(axis=0)))


def _draw_training(P: CredalSet, mode: str, fixed: int | None, rng) -> tuple[Distribution, str, int | None]:
    """Training distribution, its label, and its vertex index (None for a mixture)."""
    if fixed is not None or len(P) == 1:
        k = 0 if fixed is None else fixed
        return P.vertices[k], f"vertex:{k}", k
    if mode == "uniform_vertex":
        k = int(as_generator(rng).integers(len(P)))
        return P.vertices[k], f"vertex:{k}", k
    return P.mixture(mixture_weights(P, 1, rng)[0]), "mixture", None


def select_training_distribution(
    P: CredalSet,
    mode: str,
    H: HypothesisClass | None = None,
    loss: LossFunction = ZERO_ONE,
    seed=0,
    vertex: int = 0,
) -> Distribution:
    """The distribution a trial trains on.

    ``fixed_vertex`` uses ``vertex``; ``uniform_vertex`` picks a vertex at
    random; ``random_mixture`` draws a uniform-simplex mixture;
    ``oracle_aligned`` takes the minimax hypothesis and the vertex where its
    risk is lowest; ``adversarial`` takes the vertex whose best achievable
    risk is highest. Ties go to the lowest index.
    """
    fixed = _vertex_choice(P, mode, H, loss, vertex)
    return _draw_training(P, mode, fixed, seed)[0]


class Campaign:
    """Precomputed state for running the trials of one config."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.instance = Instance(config)
        inst = self.instance
        self.H = inst.hypotheses
        self.P = inst.credal_set
        self.loss = inst.loss
        self.seed = inst.seed
        self.n = config.n
        self.L = self.loss.matrix(self.H)  # (|H|, K)
        self.R = self.L @ self.P.masses.T  # (|H|, V)
        self.upper = self.R.max(axis=1)
        self.upper_vertex = self.R.argmax(axis=1)
        self.mode = config.training_mode
        self.fixed = _vertex_choice(self.P, self.mode, self.H, self.loss, config.training_vertex)
        self._vertex_risks = [self.R[:, k] for k in range(len(self.P))]

    @cached_property
    def classical_realisable(self) -> bool:
        return bool(self.R[:, 0].min() <= 1e-9) if len(self.P) == 1 else False

    def trial(self, i: int) -> TrialOutcome:
        p, label, k = _draw_training(self.P, self.mode, self.fixed, self.seed.generator(i, SELECT))
        counts = np.bincount(sample_outcomes(p, self.n, self.seed.generator(i, DATA)), minlength=p.domain.size)
        emp = self.L @ counts / self.n
        j = int(np.argmin(emp))
        risks = self.L @ p.mass if k is None else self._vertex_risks[k]
        test = float(risks[j])
        gaps = risks - emp
        return TrialOutcome(
            trial=i,
            training_distribution=label,
            erm_index=j,
            empirical_risk=float(emp[j]),
            test_risk=test,
            worst_case_risk=float(self.upper[j]),
            worst_case_vertex=int(self.upper_vertex[j]),
            excess_risk=max(0.0, test - float(risks.min())),
            sup_deviation=float(gaps.max()),
            abs_sup_deviation=float(np.abs(gaps).max()),
        )

    def run(self, threads: int = 1, trials: int | None = None) -> list[TrialOutcome]:
        total = self.config.trials if trials is None else trials
        return run_indexed(self.trial, total, threads)


def run_indexed(fn: Callable[[int], object], total: int, threads: int = 1) -> list:
    """``[fn(0), ..., fn(total - 1)]``, optionally spread over threads.

    Each index owns its random stream, so the result does not depend on ``threads``.
    """
    if threads <= 1 or total < 2:
        return [fn(i) for i in range(total)]
    step = math.ceil(total / threads)
    chunks = [range(s, min(total, s + step)) for s in range(0, total, step)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda r: [fn(i) for i in r], chunks))
    return [x for part in parts for x in part]


def run_classical_trial(config: ExperimentConfig, i: int) -> TrialOutcome:
    if not config.classical:
        raise ValueError("run_classical_trial needs a config with a single distribution")
    return Campaign(config).trial(i)


def run_credal_trial(config: ExperimentConfig, i: int) -> TrialOutcome:
    if config.classical:
        raise ValueError("run_credal_trial needs a config with a credal_set")
    return Campaign(config).trial(i)


def _statistic(outcomes: Sequence[TrialOutcome], name: str) -> np.ndarray:
    return np.array([getattr(o, name) for o in outcomes], dtype=float)


def frequency_rows(
    values: np.ndarray,
    eps_grid: Sequence[float],
    bound: Callable[[float], float | None],
    *,
    shift: float = 0.0,
    inclusive: bool = False,
) -> list[ViolationRow]:
    """Fraction of ``values`` beyond ``shift + eps`` for each grid point, checked against ``bound``."""
    trials = len(values)
    rows = []
    for eps in eps_grid:
        hits = values >= shift + eps if inclusive else values > shift + eps
        f = float(np.count_nonzero(hits)) / trials
        se = math.sqrt(f * (1.0 - f) / trials)
        b = bound(eps)
        verdict = "consistent" if b is None or f <= b + SLACK_SE * se else "violated_beyond_slack"
        rows.append(ViolationRow(eps=float(eps), frequency=f, std_error=se, analytic_bound=b, verdict=verdict))
    return rows


def _candidate(campaign: Campaign, statistic: str) -> tuple[str, Callable[[float], float | None]]:
    cfg = campaign.config
    kind = cfg.candidate_bound
    if kind == "auto":
        if statistic == "excess_risk":
            kind = "agnostic"
        elif cfg.classical and not campaign.classical_realisable:
            kind = "none"
        else:
            kind = "realisable"
    size, n = len(campaign.H), cfg.n
    if kind == "realisable":
        return kind, lambda e: bounds.realisable_tail(size, n, e).clipped_value
    if kind == "agnostic":
        return kind, lambda e: bounds.agnostic_tail(size, n, e).clipped_value
    return kind, lambda e: None


def estimate_violation_probability(config: ExperimentConfig, threads: int = 1) -> ViolationReport:
    """Run the campaign and tabulate ``P[statistic > eps]`` over the grid."""
    start = time.perf_counter()
    campaign = Campaign(config)
    outcomes = campaign.run(threads)
    statistic = config.resolved_statistic()
    bound_kind, bound = _candidate(campaign, statistic)
    rows = frequency_rows(_statistic(outcomes, statistic), config.eps_grid, bound)
    classical = frequency_rows(_statistic(outcomes, "test_risk"), config.eps_grid, lambda e: None)
    worst = frequency_rows(_statistic(outcomes, "worst_case_risk"), config.eps_grid, lambda e: None)
    for row, c, w in zip(rows, classical, worst):
        row.classical_frequency = c.frequency
        row.worst_case_frequency = w.frequency
    emp = _statistic(outcomes, "empirical_risk")
    report = ViolationReport(
        kind="risk",
        statistic=statistic,
        candidate_bound=bound_kind,
        rows=rows,
        metadata={
            "name": config.name,
            "config_digest": config.digest(),
            "seed": config.seed,
            "mode": "classical" if config.classical else "credal",
            "training_mode": config.training_mode,
            "n": config.n,
            "trials": config.trials,
            "delta": config.delta,
            "class_size": len(campaign.H),
            "vertex_count": len(campaign.P),
            "max_erm_empirical_risk": float(emp.max()),
            "mean_statistic": float(_statistic(outcomes, statistic).mean()),
            "evidence": "empirical Monte Carlo estimate",
        },
    )
    report.calibration = calibrate_epsilon(report, config.delta)
    report.wall_time = time.perf_counter() - start
    log.info("campaign %s: %d trials in %.2fs", config.name or config.digest()[:15], config.trials, report.wall_time)
    return report


def calibrate_epsilon(source: ExperimentConfig | ViolationReport, delta: float, threads: int = 1) -> Calibration:
    """Smallest grid ``eps`` whose violation frequency is at most ``delta``."""
    report = source if isinstance(source, ViolationReport) else estimate_violation_probability(source, threads)
    for row in report.rows:
        if row.frequency <= delta:
            return Calibration(delta=delta, eps=row.eps, status="calibrated")
    return Calibration(delta=delta, eps=None, status=UNCALIBRATABLE)


def gn_tail_campaign(
    config: ExperimentConfig,
    eps_grid: Sequence[float] | None = None,
    mean: float | None = None,
    threads: int = 1,
) -> ViolationReport:
    """Empirical ``P[G_n >= E[G_n] + eps]`` against ``exp(-2 n eps^2 / width^2)``.

    ``mean`` should be the exact expectation when known; otherwise the
    campaign's own average stands in for it.
    """
    campaign = Campaign(config)
    outcomes = campaign.run(threads)
    g = _statistic(outcomes, "sup_deviation")
    centre = float(g.mean()) if mean is None else float(mean)
    width = campaign.loss.width
    grid = config.eps_grid if eps_grid is None else eps_grid
    rows = frequency_rows(
        g, grid, lambda e: bounds.gn_tail(config.n, e / width).clipped_value, shift=centre, inclusive=True
    )
    return ViolationReport(
        kind="gn_tail",
        statistic="sup_deviation",
        candidate_bound="mcdiarmid",
        rows=rows,
        metadata={
            "config_digest": config.digest(),
            "seed": config.seed,
            "n": config.n,
            "trials": config.trials,
            "centre": centre,
            "centre_source": "supplied" if mean is not None else "sample mean",
        },
    )


def uniform_convergence_check(config: ExperimentConfig, eps_grid: Sequence[float] | None = None, threads: int = 1):
    """Frequencies of ``excess >= eps`` and ``sup |L - L_hat| >= eps/2`` per grid point.

    Returns ``(eps, excess_frequency, deviation_frequency, std_error)`` tuples;
    the first frequency should never exceed the second beyond sampling error.
    """
    outcomes = Campaign(config).run(threads)
    excess = _statistic(outcomes, "excess_risk")
    dev = _statistic(outcomes, "abs_sup_deviation")
    grid = config.eps_grid if eps_grid is None else eps_grid
    out = []
    for eps in grid:
        fe = float(np.count_nonzero(excess >= eps)) / len(outcomes)
        fd = float(np.count_nonzero(dev >= eps / 2)) / len(outcomes)
        se = math.sqrt((fe * (1 - fe) + fd * (1 - fd)) / len(outcomes))
        out.append((float(eps), fe, fd, se))
    return out


def hoeffding_campaign(
    success: float,
    n: int,
    trials: int,
    eps_grid: Sequence[float],
    seed: int | SeedSpec = 0,
    threads: int = 1,
) -> ViolationReport:
    """Sample means of ``n`` Bernoulli(``success``) draws against the Hoeffding tail."""
    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))

    def one(i: int) -> float:
        return float(np.count_nonzero(seed.generator(i, DATA).random(n) < success)) / n

    means = np.array(run_indexed(one, trials, threads))
    widths = [1.0] * n
    rows = frequency_rows(
        means, eps_grid, lambda e: bounds.hoeffding_tail(n, e, widths).clipped_value, shift=success, inclusive=True
    )
    return ViolationReport(
        kind="hoeffding",
        statistic="sample_mean",
        candidate_bound="hoeffding",
        rows=rows,
        metadata={"seed": seed.master_seed, "n": n, "trials": trials, "success": success},
    )
