import numpy as np
import pytest
from hypothesis import settings, strategies as st

from approxsubmod import SetFunction, from_callable, modular

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

PAIR_BONUS = [0, 0, 0, 0, 0, 0, 1, 1]


@pytest.fixture
def pair_bonus():
    return SetFunction(3, PAIR_BONUS)


@pytest.fixture
def min2():
    return from_callable(3, lambda s: min(len(s), 2))


@pytest.fixture
def mod312():
    return modular([3, 1, 2])


def monotone_closure(vals, n):
    """f(S) = max_{T subset S} v(T): increasing, and normalized when v(0) = 0."""
    vv = np.array(vals, dtype=float)
    for i in range(n):
        hi = [m for m in range(1 << n) if m >> i & 1]
        vv[hi] = np.maximum(vv[hi], vv[[m ^ (1 << i) for m in hi]])
    return vv


def random_increasing(rng, n, integer=False, normalized=True):
    """Mixture of families so both submodular and strongly non-submodular cases show up."""
    kind = rng.integers(3)
    bm = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(float)
    if kind == 0:
        v = rng.integers(0, 20, 1 << n) if integer else rng.random(1 << n) * 10
        if normalized:
            v[0] = 0
        vals = monotone_closure(v, n)
    elif kind == 1:
        # coverage (submodular) plus pairwise bonuses (supermodular)
        universe = 6
        cov = rng.random((n, universe)) < 0.4
        w = rng.integers(1, 5, universe) if integer else rng.random(universe) * 3
        covered = (bm @ cov.astype(float)) > 0
        vals = covered.astype(float) @ w
        bonus = rng.integers(0, 3, (n, n)) if integer else rng.random((n, n)) * rng.random() * 2
        bonus = np.triu(bonus, 1)
        vals = vals + np.einsum("mi,ij,mj->m", bm, bonus, bm)
    else:
        # concave (or convex) of a modular weight sum
        w = rng.integers(1, 4, n) if integer else rng.random(n) * 2 + 0.1
        p = rng.choice([0.5, 1.0, 1.5, 2.0])
        vals = (bm @ w) ** p
        if integer:
            vals = np.round(vals)
    return SetFunction(n, vals)


@st.composite
def tables(draw, min_n=1, max_n=5, integer=True):
    n = draw(st.integers(min_n, max_n))
    elems = st.integers(-8, 8) if integer else st.floats(-10, 10, allow_nan=False, width=32)
    vals = draw(st.lists(elems, min_size=1 << n, max_size=1 << n))
    return SetFunction(n, vals)


@st.composite
def increasing_tables(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    vals = draw(st.lists(st.integers(0, 12), min_size=1 << n, max_size=1 << n))
    vals[0] = 0
    return SetFunction(n, monotone_closure(vals, n))


@st.composite
def points(draw, n):
    return np.array(draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=n, max_size=n)))


# acceptance lines collected by test_acceptance and echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
