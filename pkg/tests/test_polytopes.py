import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from approxsubmod import (
    SetFunction,
    extended_cover_cut,
    gamma_of_perm,
    gamma_vertices,
    is_cover,
    is_minimal_cover,
    marginal_violation,
    modular,
)
from approxsubmod.apps import ask_D_bound, build_ask
from approxsubmod.errors import Infeasible, InvalidParams, InvalidPerm, InvalidTable, NotACover, NotInGamma
from approxsubmod.polytopes import (
    EpigraphInstance,
    KnapsackInstance,
    epigraph_cut,
    gamma_slack_check,
    knapsack_brute_force,
    load_instance,
    pf_membership,
    point_checks,
    set_extension,
    trivial_facet_predicates,
)
from conftest import increasing_tables, random_increasing


@pytest.fixture(scope="module")
def ask():
    return build_ask()


# -- covers ---------------------------------------------------------------------------------

def test_cover_examples(ask):
    s = [1, 2, 3, 4]
    assert ask.f.eval(s) == 36
    assert is_cover(ask.f, s, ask.b) and is_minimal_cover(ask.f, s, ask.b)
    for e in s:
        assert ask.f.eval([x for x in s if x != e]) == 27
    assert not is_cover(ask.f, [], ask.b)
    small = modular([1, 1, 1])
    assert not is_cover(small, 7, 5)
    assert not is_minimal_cover(ask.f, [1, 2, 3, 4, 5], ask.b)


def test_set_extension_examples(ask):
    cover = ask.f.mask([1, 2, 3, 4])
    ext = set_extension(ask.f, cover, (5, 6))
    assert ext == ask.f.mask([1, 2, 3, 4, 5])
    g5 = ask.f.eval([1, 2, 3, 4, 5]) - 36
    g6 = ask.f.eval([1, 2, 3, 4, 5, 6]) - ask.f.eval([1, 2, 3, 4, 5])
    assert g5 == pytest.approx(9.85) and g6 == pytest.approx(2 ** 1.1 - 1, abs=1e-12)
    assert g6 < 9
    eq = modular([2, 2, 2, 2])
    assert set_extension(eq, 3, (3, 4)) == 15
    assert set_extension(eq, 15, ()) == 15
    with pytest.raises(InvalidPerm):
        set_extension(ask.f, cover, (5,))


def test_set_extension_tests_every_outside_element():
    # a small gain in the middle of pi does not stop later elements entering U
    f = modular([5, 5, 1, 9])
    assert set_extension(f, 3, (3, 4)) == 3 | 8
    assert set_extension(f, 3, (4, 3)) == 3 | 8


def test_ask_extended_cover_cut(ask):
    d = ask_D_bound()
    assert d == pytest.approx(1.1 * 2 ** 0.1, abs=1e-12)
    cut = extended_cover_cut(ask.f, [1, 2, 3, 4], (5, 6), ask.b, d)
    assert list(cut.coeffs) == [1, 1, 1, 1, 1, 0] and cut.rhs == 3
    assert cut.guarantee is True
    assert 36 > 6 * d + 28.3
    assert cut.certificate.valid and cut.certificate.checked_points == int(np.sum(ask.f.values <= ask.b))
    assert cut.details["facet_witnesses"] == {"5": [1, 2]}
    assert cut.details["facet_condition"] is True
    assert cut.provenance == "extended_cover" and cut.z_coeff == 0


def test_cut_not_a_cover(ask):
    with pytest.raises(NotACover):
        extended_cover_cut(ask.f, [1, 2, 3], (4, 5, 6), ask.b, 1.0)


def test_classic_extended_cover_modular():
    # weights 3,3,3,4 with b = 8: {1,2,3} is a minimal cover and 4 is heavier than every member
    f = modular([3, 3, 3, 4])
    cut = extended_cover_cut(f, [1, 2, 3], (4,), 8, 0.0)
    assert list(cut.coeffs) == [1, 1, 1, 1] and cut.rhs == 2
    assert cut.guarantee and cut.certificate.valid


def test_invalid_cut_is_reported_not_hidden():
    # supermodular jump at {1,2,3}: element 3 enters the extension, yet {1,3} is feasible
    f = SetFunction(3, [0, 1, 1, 10, 0.5, 1.5, 1.5, 12])
    cut = extended_cover_cut(f, [1, 2], (3,), 9.0, marginal_violation(f).value)
    assert cut.details["extension"] == [1, 2, 3]
    assert not cut.guarantee
    assert not cut.certificate.valid and cut.certificate.max_violation == 1


def test_knapsack_instance_validation():
    with pytest.raises(InvalidParams):
        KnapsackInstance(SetFunction(2, [0, 2, 1, 1]), 1.0, [1, 1])
    with pytest.raises(InvalidParams):
        KnapsackInstance(modular([1, 1]), 1.0, [1, 1, 1])


@pytest.mark.parametrize("seed", range(40))
def test_sufficient_condition_implies_valid(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    f = random_increasing(rng, n)
    d = marginal_violation(f).value
    b = float(np.quantile(f.values, rng.uniform(0.2, 0.8)))
    for s in rng.integers(1, 1 << n, 10):
        s = int(s)
        if not is_cover(f, s, b):
            continue
        perm = [e for e in range(1, n + 1) if not s >> (e - 1) & 1]
        rng.shuffle(perm)
        cut = extended_cover_cut(f, s, perm, b, d)
        if cut.guarantee:
            assert cut.certificate.valid


def test_brute_force_examples(ask):
    mask, obj = knapsack_brute_force(ask)
    assert mask == ask.f.mask([1, 2, 3, 6]) and obj == 11
    f = modular([1, 2, 3])
    with pytest.raises(Infeasible):
        knapsack_brute_force(KnapsackInstance(f, -1.0, [1, 1, 1]))
    assert knapsack_brute_force(KnapsackInstance(f, 6.0, [1, 1, 1])) == (7, 3)


def test_point_checks(ask):
    cut = extended_cover_cut(ask.f, [1, 2, 3, 4], (5, 6), ask.b, ask_D_bound())
    rep = point_checks(ask, [1 / 30, 1, 1, 1, 0, 1], [cut])
    assert rep.objective == pytest.approx(11.1, abs=1e-9)
    assert rep.F_value == pytest.approx(28.3, abs=1e-12) and rep.feasible
    assert rep.violated == [0] and rep.lhs[0] == pytest.approx(3 + 1 / 30)
    rep = point_checks(ask, np.zeros(6), [cut])
    assert rep.feasible and rep.violated == []
    rep = point_checks(ask, [1, 1, 1, 0, 0, 1], [cut])
    assert rep.violated == [] and rep.objective == 11


def test_trivial_facets(ask):
    p = trivial_facet_predicates(ask)
    assert p["full_dimensional"] and p["upper_bound_facets"] == [1, 2, 3, 4, 5, 6]
    f = modular([1, 1])
    assert not trivial_facet_predicates(KnapsackInstance(f, -1.0, [1, 1]))["full_dimensional"]
    assert trivial_facet_predicates(KnapsackInstance(f, 2.0, [1, 1]))["upper_bound_facets"] == [1, 2]


# -- epigraph -------------------------------------------------------------------------------

def test_epigraph_square_fixture():
    inst = EpigraphInstance("power", [1, 1], 0.0, p=2.0)
    g = inst.g_sigma()
    assert list(g.values) == [0, 1, 1, 4]
    assert marginal_violation(g).value == 2
    gamma = gamma_of_perm(g, (1, 2))
    cut = epigraph_cut(inst, gamma)
    assert list(cut.coeffs) == [1, 3] and cut.rhs == 4 and cut.z_coeff == 1
    assert cut.lhs([1, 0], z=1) == pytest.approx(0)   # x1 + 3 x2 - z = 0 <= 4
    assert not cut.violated_by([1, 0], z=1) and not cut.violated_by([1, 1], z=4)
    assert cut.certificate.valid and cut.certificate.checked_points == 4


def test_epigraph_sqrt_has_no_slack_term():
    inst = EpigraphInstance("sqrt", [1, 2, 0.5], sigma=1.0)
    g = inst.g_sigma()
    assert marginal_violation(g).value == 0
    for gv in gamma_vertices(g):
        cut = epigraph_cut(inst, gv)
        assert cut.rhs == pytest.approx(-1.0) and cut.certificate.valid


def test_epigraph_linear_is_tight():
    inst = EpigraphInstance("power", [1, 2, 3], sigma=0.5, p=1.0)
    gv = gamma_of_perm(inst.g_sigma(), (3, 1, 2))
    cut = epigraph_cut(inst, gv)
    assert cut.certificate.valid
    assert cut.certificate.max_violation == pytest.approx(0.0, abs=1e-12)


def test_epigraph_rejects_foreign_gamma():
    inst = EpigraphInstance("power", [1, 1], p=2.0)
    bad = gamma_of_perm(SetFunction(2, [0, 1, 1, 5]), (1, 2))
    with pytest.raises(NotInGamma):
        epigraph_cut(inst, bad)


def test_epigraph_table_phi():
    inst = EpigraphInstance("table", [1, 1, 1], grid=[0, 1, 2, 3], values=[0, 1, 3, 6])
    for gv in gamma_vertices(inst.g_sigma()):
        assert epigraph_cut(inst, gv).certificate.valid
    with pytest.raises(InvalidParams):
        EpigraphInstance("table", [1], grid=[0, 1], values=[1, 0])
    with pytest.raises(InvalidParams):
        EpigraphInstance("power", [-1, 1], p=2.0)
    with pytest.raises(InvalidParams):
        EpigraphInstance("cubic", [1])


def test_pf_examples(pair_bonus, mod312):
    assert pf_membership(mod312, [3, 1, 2])
    assert gamma_slack_check(mod312, [3, 1, 2]) == 0
    gv = gamma_of_perm(pair_bonus, (2, 3, 1))
    assert not pf_membership(pair_bonus, gv.gamma)
    assert gamma_slack_check(pair_bonus, gv) >= 0
    assert pf_membership(pair_bonus, [0, 0, 0])


@given(increasing_tables(max_n=5))
def test_gamma_slack_nonnegative(f):
    for gv in gamma_vertices(f):
        assert gamma_slack_check(f, gv) >= -1e-9


@given(increasing_tables(max_n=4))
def test_pf_equals_enumeration(f):
    for gv in gamma_vertices(f):
        ok = all(sum(gv.gamma[e - 1] for e in range(1, f.n + 1) if m >> (e - 1) & 1) <= f.values[m]
                 for m in range(1 << f.n))
        assert pf_membership(f, gv.gamma) == ok


# -- loading ----------------------------------------------------------------------------------

def test_load_instances(tmp_path, ask):
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"n": 6, "values": ask.f.values.tolist(), "b": 28.3, "c": ask.c.tolist()}))
    inst = load_instance(p)
    assert isinstance(inst, KnapsackInstance) and inst.b == 28.3
    p.write_text(json.dumps({"phi": {"kind": "power", "p": 2}, "c": [1, 1], "sigma": 0}))
    inst = load_instance(p)
    assert isinstance(inst, EpigraphInstance) and inst.p == 2
    p.write_text(json.dumps({"n": 1, "values": [0, 1]}))
    with pytest.raises(InvalidTable):
        load_instance(p)
    with pytest.raises(InvalidTable):
        load_instance(tmp_path / "nope.json")
