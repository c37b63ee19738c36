import numpy as np
import pytest

from credalpac import CredalSet, Distribution, DomainSpace, Hypothesis, HypothesisClass

D22 = DomainSpace(2, 2)


def hyp(*table):
    return Hypothesis(D22, table)


H_ID = hyp(0, 1)
H_0 = hyp(0, 0)
H_1 = hyp(1, 1)
H_NEG = hyp(1, 0)

# outcome order for 2x2: (0,0), (0,1), (1,0), (1,1)
P_DET = Distribution(D22, [0.5, 0, 0, 0.5])
P_FLIP = Distribution(D22, [0, 0.5, 0.5, 0])
P_NOISE = Distribution(D22, [0.25] * 4)


@pytest.fixture
def gap_set():
    return CredalSet.of(P_DET, P_FLIP)


def random_distribution(rng, domain, sparsity=0.0):
    """Masses bounded away from zero on a random support (never empty)."""
    mass = rng.uniform(0.05, 1.0, domain.size)
    if sparsity:
        keep = rng.random(domain.size) >= sparsity
        keep[rng.integers(domain.size)] = True
        mass = np.where(keep, mass, 0.0)
    return Distribution(domain, mass / mass.sum())


def random_class(rng, domain, max_size):
    all_h = HypothesisClass.all_tables(domain)
    size = int(rng.integers(1, min(max_size, len(all_h)) + 1))
    pick = sorted(rng.choice(len(all_h), size=size, replace=False))
    return HypothesisClass(tuple(all_h[i] for i in pick))


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
