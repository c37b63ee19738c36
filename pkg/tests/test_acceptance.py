"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""

import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from credalpac import (
    CredalSet,
    Dataset,
    Distribution,
    DomainSpace,
    HypothesisClass,
    LossClass,
    check_uniform_credal_realisability,
    empirical_rademacher_exact,
    empirical_rademacher_mc,
    eps_finite_agnostic,
    eps_finite_realisable,
    eps_rademacher,
    hoeffding_tail,
    lower_risk,
    upper_risk,
)
from credalpac.cli import main as cli_main
from credalpac.credal import mixture_weights
from credalpac.harness import (
    UNCALIBRATABLE,
    calibrate_epsilon,
    estimate_violation_probability,
    from_dict,
    gn_tail_campaign,
    hoeffding_campaign,
    load_config,
)

from .conftest import H_ID, H_NEG, P_DET, P_FLIP, record_acceptance

pytestmark = pytest.mark.acceptance

EXAMPLES = Path(__file__).resolve().parent.parent / "configs" / "examples"
REALISABLE = EXAMPLES / "finite_class_realisable.yaml"


def test_ac1_closed_form_bounds():
    start = time.perf_counter()
    checks = [
        ("eps_finite_realisable(16,0.05,100)", eps_finite_realisable(16, 0.05, 100), 0.0576832, 1e-6),
        ("eps_finite_agnostic(16,0.05,100)", eps_finite_agnostic(16, 0.05, 100), 0.359485, 1e-6),
        ("eps_rademacher(0.1,0.05,100)", eps_rademacher(0.1, 0.05, 100), 0.671620, 1e-6),
        ("hoeffding_tail(100,0.1,1s)", hoeffding_tail(100, 0.1, [1.0] * 100).raw_value, math.exp(-2), 1e-9),
    ]
    elapsed = time.perf_counter() - start
    ok = all(abs(got - want) <= tol for _, got, want, tol in checks) and elapsed < 1.0
    detail = ", ".join(f"{name}={got:.7f}" for name, got, _, _ in checks) + f"; {elapsed * 1e3:.1f} ms"
    record_acceptance("AC1 closed-form bounds", ok, detail)
    assert ok


def test_ac2_finite_class_realisable_bound():
    cfg = load_config(REALISABLE)
    assert (cfg.domain.inputs, cfg.domain.labels, cfg.n, cfg.trials) == (4, 2, 20, 100_000)
    assert cfg.eps_grid == [round(0.05 * k, 2) for k in range(1, 11)]
    start = time.perf_counter()
    report = estimate_violation_probability(cfg, threads=1)
    elapsed = time.perf_counter() - start
    worst_margin = -math.inf
    ok = True
    for row in report.rows:
        bound = min(1.0, 16 * math.exp(-20 * row.eps))
        worst_margin = max(worst_margin, row.frequency - bound - 3 * row.std_error)
        ok &= row.frequency <= bound + 3 * row.std_error
    perfect_fit = report.metadata["max_erm_empirical_risk"] == 0.0
    ok = ok and perfect_fit and elapsed < 60
    record_acceptance(
        "AC2 finite-class realisable bound",
        ok,
        f"max(freq - bound - 3SE)={worst_margin:.4g}, all ERM empirical risks 0: {perfect_fit}, {elapsed:.1f}s",
    )
    assert ok


def exact_gn_mean(n: int) -> float:
    """E[G_n] on the 4-input realisable instance, summing over multinomial count vectors."""
    H = HypothesisClass.all_tables(DomainSpace(4, 2))
    h_star = (0, 1, 1, 0)
    disagree = [[x for x in range(4) if h.table[x] != h_star[x]] for h in H]
    total = 0.0
    for counts in itertools.product(range(n + 1), repeat=3):
        last = n - sum(counts)
        if last < 0:
            continue
        c = counts + (last,)
        prob = math.factorial(n) / math.prod(math.factorial(k) for k in c) / 4**n
        g = max(len(S) / 4 - sum(c[x] for x in S) / n for S in disagree)
        total += prob * g
    return total


def test_ac3_concentration_falsification():
    grid = [round(0.02 * k, 2) for k in range(1, 16)]
    start = time.perf_counter()
    hoeff = hoeffding_campaign(0.5, 50, 100_000, grid, seed=2024)
    cfg = load_config(REALISABLE)
    mean = exact_gn_mean(cfg.n)
    gn = gn_tail_campaign(cfg, grid, mean=mean)
    elapsed = time.perf_counter() - start
    ok = not hoeff.violated and not gn.violated and elapsed < 120
    slack = max(r.frequency - r.analytic_bound - 3 * r.std_error for r in hoeff.rows + gn.rows)
    record_acceptance(
        "AC3 concentration falsification",
        ok,
        f"Hoeffding + G_n tail (E[G_n]={mean:.5f}) max(freq - bound - 3SE)={slack:.4g}, {elapsed:.1f}s",
    )
    assert ok


def test_ac4_rademacher_oracle_equivalence():
    rng = np.random.default_rng(4)
    dom = DomainSpace(4, 2)
    all_h = HypothesisClass.all_tables(dom)
    start = time.perf_counter()
    good, worst = 0, 0.0
    for k in range(25):
        size = int(rng.integers(1, 17))
        H = HypothesisClass(tuple(all_h[i] for i in sorted(rng.choice(16, size, replace=False))))
        A = LossClass.of(H)
        d = Dataset(dom, rng.integers(0, dom.size, 10))
        exact = empirical_rademacher_exact(A, d)
        assert exact.sample_count == 2**10
        mc = empirical_rademacher_mc(A, d, 100_000, 1000 + k)
        diff = abs(mc.value - exact.value)
        worst = max(worst, diff)
        good += diff <= 0.01
    elapsed = time.perf_counter() - start
    ok = good >= 24 and elapsed < 60
    record_acceptance("AC4 Rademacher MC vs exact", ok, f"{good}/25 within 0.01 (max diff {worst:.4g}), {elapsed:.1f}s")
    assert ok


DOMAINS_8 = [DomainSpace(2, 2), DomainSpace(4, 2), DomainSpace(2, 3), DomainSpace(2, 4), DomainSpace(3, 2), DomainSpace(1, 8)]


def random_vertex(rng, dom, sparsity=0.4):
    mass = rng.uniform(0.05, 1.0, dom.size) * (rng.random(dom.size) >= sparsity)
    if not mass.any():
        mass[rng.integers(dom.size)] = 1.0
    return Distribution(dom, mass / mass.sum())


def test_ac5_credal_vertex_optimisation():
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    violations = 0
    for k in range(1000):
        dom = DOMAINS_8[rng.integers(len(DOMAINS_8))]
        P = CredalSet(tuple(random_vertex(rng, dom) for _ in range(int(rng.integers(1, 5)))))
        h = HypothesisClass.all_tables(dom)[int(rng.integers(dom.label_count**dom.input_count))]
        up, _ = upper_risk(h, P)
        low, _ = lower_risk(h, P)
        W = mixture_weights(P, 10_000, 10_000 + k)
        loss = np.array([float(h(x) != y) for x in range(dom.input_count) for y in range(dom.label_count)])
        risks = (W @ P.masses) @ loss
        violations += int(np.count_nonzero(risks > up + 1e-12) + np.count_nonzero(risks < low - 1e-12))
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30
    record_acceptance("AC5 credal vertex optimisation", ok, f"{violations} bracket violations over 10^7 mixtures, {elapsed:.1f}s")
    assert ok


def brute_uniform(H, P, mixtures, tol=1e-9):
    """For every sampled mixture, does some hypothesis have risk <= tol?"""
    L = np.array([[float(h(x) != y) for x in range(P.domain.input_count) for y in range(P.domain.label_count)] for h in H])
    risks = (mixtures @ P.masses) @ L.T
    return bool((risks.min(axis=1) <= tol).all())


def test_ac6_uniform_realisability_exactness():
    rng = np.random.default_rng(6)
    start = time.perf_counter()
    canonical = CredalSet.of(P_DET, P_FLIP)
    Hc = HypothesisClass((H_ID, H_NEG))
    W = mixture_weights(canonical, 1000, 1)
    canonical_ok = (not check_uniform_credal_realisability(Hc, canonical).holds) and not brute_uniform(Hc, canonical, W)

    agree, trues = 0, 0
    for k in range(1000):
        dom = DOMAINS_8[rng.integers(len(DOMAINS_8))]
        all_h = HypothesisClass.all_tables(dom)
        g = all_h[int(rng.integers(len(all_h)))]
        verts = []
        for _ in range(int(rng.integers(1, 5))):
            if rng.random() < 0.5:
                marginal = rng.uniform(0.05, 1, dom.input_count) * (rng.random(dom.input_count) >= 0.3)
                if not marginal.any():
                    marginal[0] = 1.0
                verts.append(Distribution.labelled_by(g, marginal / marginal.sum()))
            else:
                verts.append(random_vertex(rng, dom, 0.6))
        P = CredalSet(tuple(verts))
        size = int(rng.integers(1, min(6, len(all_h)) + 1))
        members = {int(i) for i in rng.choice(len(all_h), size, replace=False)}
        if rng.random() < 0.5:
            members.add(all_h.index(g))
        H = HypothesisClass(tuple(all_h[i] for i in sorted(members)))
        exact = check_uniform_credal_realisability(H, P).holds
        brute = brute_uniform(H, P, mixture_weights(P, 1000, 20_000 + k))
        agree += exact == brute
        trues += exact
    elapsed = time.perf_counter() - start
    ok = canonical_ok and agree == 1000
    record_acceptance(
        "AC6 uniform credal realisability",
        ok,
        f"canonical false case ok: {canonical_ok}; {agree}/1000 agree ({trues} realisable), {elapsed:.1f}s",
    )
    assert ok


GAP = {
    "domain": {"inputs": 2, "labels": 2},
    "hypotheses": {"tables": [[0, 1]]},
    "credal_set": [[0.5, 0, 0, 0.5], [0, 0.5, 0.5, 0]],
    "training": {"mode": "fixed_vertex", "vertex": 0},
    "trials": 2000,
    "delta": 0.05,
}


def test_ac7_credal_gap():
    results = []
    for n in (5, 20, 100):
        eps_star = eps_finite_realisable(1, 0.05, n)
        grid = sorted({0.01, 0.25, 0.5, 0.75, 0.99, eps_star})
        cfg = from_dict({**GAP, "n": n, "eps_grid": grid})
        report = estimate_violation_probability(cfg)
        classical_zero = report.row(eps_star).classical_frequency == 0.0
        worst_one = all(r.frequency == 1.0 and r.worst_case_frequency == 1.0 for r in report.rows if r.eps < 1)
        shown = all(r.classical_frequency == 0.0 for r in report.rows)
        cal = calibrate_epsilon(report, 0.05)
        results.append(classical_zero and worst_one and shown and cal.status == UNCALIBRATABLE and report.violated)
    ok = all(results)
    record_acceptance("AC7 credal gap", ok, f"n in (5,20,100): classical freq 0, worst-case 1.0, uncalibratable: {results}")
    assert ok


def test_ac8_full_pipeline_determinism(tmp_path):
    configs = sorted(EXAMPLES.glob("*.yaml"))
    assert configs
    identical = []
    for path in configs:
        outs = []
        for i, threads in enumerate((1, 1, 8, 8)):
            out = tmp_path / f"{path.stem}-{i}.json"
            code = cli_main(["run", str(path), "--threads", str(threads), "--out", str(out)])
            assert code in (0, 2)
            outs.append(out.read_bytes())
        identical.append(all(o == outs[0] for o in outs))
    ok = all(identical)
    record_acceptance("AC8 full-pipeline determinism", ok, f"{sum(identical)}/{len(configs)} shipped configs byte-identical at 1 and 8 threads")
    assert ok
