from __future__ import annotations

import random

import pytest

from latmax.geometry import AffineUnimodularMap

ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def random_unimodular(rng: random.Random, d: int = 3, steps: int = 6, shift: int = 3) -> AffineUnimodularMap:
    """Product of random elementary integer row operations plus a translation."""
    m = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(steps):
        i, j = rng.sample(range(d), 2)
        kind = rng.random()
        if kind < 0.6:
            c = rng.choice([-2, -1, 1, 2])
            m[i] = [a + c * b for a, b in zip(m[i], m[j])]
        elif kind < 0.8:
            m[i], m[j] = m[j], m[i]
        else:
            m[i] = [-a for a in m[i]]
    t = tuple(rng.randint(-shift, shift) for _ in range(d))
    return AffineUnimodularMap(tuple(tuple(r) for r in m), t)


def record_acceptance(number: int, title: str, passed: bool) -> None:
    ACCEPTANCE[number] = (title, passed)
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {title}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, passed = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{n}] {'PASS' if passed else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def full_search():
    from latmax.search import SearchConfig, run_search

    return run_search(SearchConfig())


@pytest.fixture(scope="session")
def oracle_default():
    from latmax.classification import brute_force_2d_oracle

    return brute_force_2d_oracle()
