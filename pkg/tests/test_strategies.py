import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import VALID_FIXTURES, load
from unaware.strategies import PartialStrategy, StrategyUniverse


@pytest.fixture(scope="module")
def u(g2):
    return StrategyUniverse(g2)


def names(xs):
    return [str(x) for x in xs]


def test_colin_strategies(u):
    assert names(u.all_strategies("C")) == ["BB", "BS", "SB", "SS", "MB", "MS", "B", "S"]


def test_rowena_counts(u):
    assert len(u.strategies("R", "T")) == 36
    assert names(u.strategies("R", "T'")) == ["B", "S"]


@pytest.mark.parametrize("name", VALID_FIXTURES)
def test_count_is_product_of_action_sets(name):
    f = load(name)
    uu = StrategyUniverse(f)
    for p in f.players:
        for t in f.trees:
            hs = f.info_sets_in(p, t)
            assert len(uu.strategies(p, t)) == math.prod(len(h.actions) for h in hs)


def test_vacuous_strategy(chain):
    uu = StrategyUniverse(chain)
    # A has no information set located in T2, but reaches T3
    assert names(uu.strategies("A", "T3")) == ["a"]
    assert uu.info_sets_in_tree("A", "T2") == ()


def test_induce(u):
    mb = u.parse_strategy("C", "T", "MB")
    assert str(u.induce(mb, "T'")) == "B"
    assert u.induce(mb, "T") == mb
    assert str(u.induce(u.parse_strategy("R", "T", "nMBS"), "T'")) == "S"
    with pytest.raises(ValueError):
        u.induce(u.parse_strategy("C", "T'", "B"), "T")


def test_equivalence_class(u, g2):
    s = u.parse_strategy("C", "T'", "S")
    assert names(u.equivalence_class(s)) == ["BS", "SS", "MS", "S"]
    single = StrategyUniverse(load("centipede"))
    x = single.full_strategies("A")[0]
    assert single.equivalence_class(x) == [x]


def test_equivalence_class_on_chain(chain):
    uu = StrategyUniverse(chain)
    s = uu.strategies("B", "T3")[0]
    cls = uu.equivalence_class(s)
    assert {x.scope for x in cls} == {"T1", "T2", "T3"}
    brute = [x for t in ("T1", "T2", "T3") for x in uu.strategies("B", t) if uu.induce(x, "T3") == s]
    assert cls == brute


def test_allows(u, g2):
    r = g2.info_sets["R"]
    prof = (u.parse_strategy("R", "T", "nMBB"), u.parse_strategy("C", "T", "MB"))
    assert u.allows(prof, r[1])
    assert not u.allows(prof, r[2])
    for s in u.full_strategies("C"):
        assert u.allows(s, r[0])
    # Colin's upper strategy allows his own information set in the lower tree
    assert u.allows(u.parse_strategy("C", "T", "MB"), g2.info_sets["C"][1])


def test_replace(u, g2):
    k = u.index(g2.info_sets["R"][1])
    s, t = u.parse_strategy("R", "T", "nBBB"), u.parse_strategy("R", "T", "tMMS")
    assert str(u.replace(s, t, k)) == "nMBB"
    assert u.replace(s, s, k) == s
    # replacing at the root overwrites every successor in the same tree
    root = u.index(g2.info_sets["R"][0])
    assert str(u.replace(s, t, root)) == "tMMB"


def test_replacements_cover_replace(u, g2):
    k = u.index(g2.info_sets["R"][0])
    s = u.parse_strategy("R", "T", "nBBB")
    reps = u.replacements(s, k)
    assert len(reps) == 18
    assert set(reps) == {u.replace(s, t, k) for t in u.strategies("R", "T")}


def test_play_and_payoff(u, g2):
    prof = {"R": u.parse_strategy("R", "T", "nMBB"), "C": u.parse_strategy("C", "T", "MB")}
    assert u.play(prof, "T") == "nMB"
    low = {"R": u.parse_strategy("R", "T'", "B"), "C": u.parse_strategy("C", "T'", "S")}
    assert u.play(low, "T'") == "nBS"
    assert u.payoff(low, "T'") == u.payoff({"R": u.parse_strategy("R", "T", "nBBB"),
                                            "C": u.parse_strategy("C", "T", "BS")}, "T")


def test_conditional_play(u, g2):
    h = g2.info_sets["R"][1]
    s = u.parse_strategy("R", "T", "tBMB")
    assert u.conditional_play(h, s, {"C": u.parse_strategy("C", "T", "MB")}) == "nBB"
    hc = g2.info_sets["C"][1]
    assert u.conditional_play(hc, u.parse_strategy("C", "T'", "S"), {"R": u.parse_strategy("R", "T'", "B")}) == "nBS"
    root = g2.info_sets["R"][0]
    for s in u.full_strategies("R")[::5]:
        for c in u.full_strategies("C"):
            assert u.conditional_play(root, s, {"C": c}) == u.play({"R": s, "C": c}, "T")


def test_parse_strategy_unknown(u):
    with pytest.raises(KeyError):
        u.parse_strategy("C", "T'", "Q")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(VALID_FIXTURES), st.data())
def test_induce_is_transitive(name, data):
    f = load(name)
    uu = StrategyUniverse(f)
    p = data.draw(st.sampled_from(f.players))
    s = data.draw(st.sampled_from(uu.full_strategies(p)))
    for t, t2 in itertools.permutations(f.trees, 2):
        if uu.reaches(f.base_tree, t) and uu.reaches(t, t2):
            assert uu.induce(uu.induce(s, t), t2) == uu.induce(s, t2)


def test_render_multi_letter():
    assert str(PartialStrategy("A", "T", ("go", "stop"))) == "go.stop"
    assert str(PartialStrategy("A", "T", ())) == "-"
