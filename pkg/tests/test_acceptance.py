"""Acceptance suite: eight criteria, exact comparisons only.

Each test records one PASS/FAIL line; the lines are printed at the end of the
pytest run (see ``conftest.py``) and also when this file is run as a script.
"""
import itertools
import random
import sys
from fractions import Fraction
from functools import lru_cache

import pytest

from conftest import VALID_FIXTURES, load, record_acceptance
from reference import textbook_levels
from unaware.dominance import (exists_fullsupport_justifying_belief, exists_justifying_belief,
                               strictly_dominated, weakly_dominated)
from unaware.elimination import Mutations, iterate
from unaware.normal_form import GeneralizedNormalForm
from unaware.rationalizability import Oracle
from unaware.testkit import GeneratorConfig, cross_check, generate

GENERATED = 500
DENSITIES = (0.6, 0.8)
TABLES = 5000
SINGLE_TREE = 200
EPSILONS = (Fraction(1, 2), Fraction(1, 10), Fraction(1, 100))


def _report(n, title, ok, detail):
    line = f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'} {detail}"
    record_acceptance(line)
    return line


# -- criteria 1 to 3: one pass of the cross-check harness ----------------------------

@lru_cache(maxsize=None)
def sweep():
    """Cross-check reports for G2, the stored counterexample and GENERATED fresh games."""
    games = [("g2", load("g2")), ("counterexample", load("counterexample"))]
    # alternate two unawareness densities; the sparser one produces more disagreements
    games += [(f"seed {s} density {d}", generate(GeneratorConfig(seed=s, unawareness=d)))
              for s in range(GENERATED) for d in [DENSITIES[s % 2]]]
    return [(name, cross_check(f)) for name, f in games]


def _suite(checks):
    bad = []
    for name, rep in sweep():
        for c in checks:
            r = rep.result(c)
            if not r.passed:
                bad.append(f"{name}: {c} at level {r.level} for {r.player} "
                           f"(only left {r.only_left}, only right {r.only_right})")
    return bad


def _run_suite(n, title, checks):
    bad = _suite(checks)
    games = len(sweep())
    detail = f"{games} games, {len(bad)} mismatches" + ("" if not bad else "; " + "; ".join(bad))
    _report(n, title, not bad, detail)
    assert not bad, detail


def test_criterion_1_icsd_equals_efr():
    _run_suite(1, "ICSD = EFR", ["icsd=efr", "efr-nested"])


def test_criterion_2_icwd_equals_pr():
    _run_suite(2, "ICWD = PR", ["icwd=pr"])


def test_criterion_3_ia_equals_prr_and_pr():
    _run_suite(3, "IA = PRR = PR, IA = ICWD", ["ia=prr", "prr=pr", "ia=pr", "ia=icwd"])


# -- criterion 4: the two-tree example ------------------------------------------

def _payoffs(forest):
    """Terminal payoffs per tree, read straight off the document (copies inherit from the base)."""
    base = forest.trees[forest.base_tree]
    out = {}
    for t, tree in forest.trees.items():
        out[t] = {}
        for nid, node in tree.nodes.items():
            if node.terminal:
                src = node if node.payoffs else base.nodes[node.copy_of]
                out[t][nid] = src.payoffs
    return out


def _verbal_claims(forest):
    """Brute-force the dominance claims the example's payoffs were chosen to satisfy."""
    u = _payoffs(forest)
    up, low = u["T"], u["T'"]
    claims = {}
    # after n, M beats B and S for Rowena against either Colin action
    claims["after n: M strictly best for R"] = all(
        up[f"nM{c}"]["R"] > up[f"n{a}{c}"]["R"] for a in "BS" for c in "BS")
    # after t, M beats B and S for Rowena against every Colin action
    claims["after t: M strictly best for R"] = all(
        up[f"tM{c}"]["R"] > up[f"t{a}{c}"]["R"] for a in "BS" for c in "BSM")
    # after t, M beats B and S for Colin
    claims["after t: M strictly best for C"] = all(
        up[f"t{a}M"]["C"] > up[f"t{a}{c}"]["C"] for a in "BSM" for c in "BS")
    # in the lower tree, S is strictly dominated by B for Colin
    claims["lower tree: B beats S for C"] = all(low[f"n{a}B"]["C"] > low[f"n{a}S"]["C"] for a in "BS")
    # in the lower tree, B is the unique best reply of Rowena to B
    claims["lower tree: B best reply of R to B"] = low["nBB"]["R"] > low["nSB"]["R"]
    # facing MB, Rowena gets strictly more with n then M than with any t-strategy
    claims["against MB: nM beats every t-plan"] = all(up["nMB"]["R"] > up[f"t{a}M"]["R"] for a in "BSM")
    # nSBB is beaten by nMBB against every Colin strategy of the upper tree
    cols = [(x, y) for x in "BSM" for y in "BS"]
    claims["nSBB beaten by nMBB"] = all(up[f"nM{y}"]["R"] > up[f"nS{y}"]["R"] for _, y in cols)
    # MS is a best reply after t to some Rowena plan, so only the lower tree can remove it
    claims["MS undominated after t"] = any(
        up[f"t{a}M"]["C"] >= max(up[f"t{a}{c}"]["C"] for c in "BSM") for a in "BSM")
    # naive second round: MS and MB agree after t, and MS does better after nM
    claims["naive second round: MS weakly beats MB"] = up["nMS"]["C"] > up["nMB"]["C"]
    return claims


def _g2_reproduction():
    f = load("g2")
    gnf = GeneralizedNormalForm(f)
    u = gnf.universe
    names = lambda xs: {str(s) for s in xs}
    icsd = iterate(gnf, "icsd")
    efr = Oracle(gnf).efr_levels()
    out = _verbal_claims(f)
    out["S_C"] = names(u.all_strategies("C")) == {"BB", "BS", "SB", "SS", "MB", "MS", "B", "S"}
    s_low = u.parse_strategy("C", "T'", "S")
    out['["S"]'] = names(u.equivalence_class(s_low)) == {"BS", "SS", "MS", "S"}
    union = lambda k, p: {str(s) for t in u.trees for s in icsd.survivors(k, p, t)}
    out["U_C^1"] = union(1, "C") == {"MB", "B"}
    out["U_R^2"] = union(2, "R") == {"nMBB", "nMSB", "nMMB", "B"}
    out["fixed point at 2"] = icsd.fixed_level == 2 and efr.fixed_level == 2
    rows = efr.survivors(efr.fixed_level, "R")
    cols = efr.survivors(efr.fixed_level, "C")
    ends = {u.play({"R": r, "C": c}, "T") for r in rows for c in cols}
    out["EFR outcome n, M then B"] = ends == {"nMB"}
    return out


def test_criterion_4_example_reproduction():
    claims = _g2_reproduction()
    bad = [k for k, ok in claims.items() if not ok]
    _report(4, "two-tree example", not bad, f"{len(claims)} claims" + (f", failed: {bad}" if bad else ""))
    assert not bad


# -- criterion 5: duality on random tables --------------------------------------------

def _random_table(rng):
    m, n = rng.randint(1, 6), rng.randint(1, 6)
    den = rng.choice((1, 1, 2, 3))
    # a narrow range makes ties (and so weak-but-not-strict cases) common
    span = rng.choice((1, 2, 5))
    return m, n, [[Fraction(rng.randint(-span, span), den) for _ in range(n)] for _ in range(m)]


def duality_discrepancies(tables, seed=2024, require_positive=True):
    rng = random.Random(seed)
    bad = []
    for k in range(tables):
        m, n, a = _random_table(rng)
        pay = lambda s, o, a=a: a[s][o]
        rows, cols = range(m), range(n)
        for s in rows:
            sd = strictly_dominated(s, rows, cols, pay) is not None
            jb = exists_justifying_belief(s, rows, cols, pay) is not None
            wd = weakly_dominated(s, rows, cols, pay) is not None
            fs = exists_fullsupport_justifying_belief(s, rows, cols, pay,
                                                      require_positive=require_positive) is not None
            if sd == jb or wd == fs:
                bad.append((k, s))
    return bad


def test_criterion_5_duality():
    bad = duality_discrepancies(TABLES)
    _report(5, "dominance/belief duality", not bad, f"{TABLES} tables, {len(bad)} discrepancies")
    assert not bad


# -- criterion 6: single-tree games against a textbook implementation -------------------

def test_criterion_6_single_tree_regression():
    bad = []
    for seed in range(SINGLE_TREE):
        f = generate(GeneratorConfig(seed=seed, trees=(1, 1)))
        gnf = GeneralizedNormalForm(f)
        for concept in ("icsd", "ia"):
            tr = iterate(gnf, concept)
            ref = textbook_levels(f, concept)
            ours = [{p: [str(s) for s in tr.survivors(k, p)] for p in f.players} for k in range(tr.fixed_level + 1)]
            if ours != ref:
                bad.append((seed, concept))
    _report(6, "single-tree regression", not bad, f"{SINGLE_TREE} games x 2 procedures, {len(bad)} mismatches {bad}")
    assert not bad


# -- criterion 7: constructions ---------------------------------------------------------

def _conditioning_failures(name):
    gnf = GeneralizedNormalForm(load(name))
    o = Oracle(gnf)
    efr = o.efr_levels()
    u = gnf.universe
    bad = []
    for k in range(1, efr.fixed_level + 1):
        for p in gnf.players:
            for j in efr.level(k)[p]:
                s = u.full_strategies(p)[j]
                conditioned = o.construct_conditioned_beliefs(p, o.generalized_system(efr, k, p, j))
                for m, b in conditioned.items():
                    if sum(b.values()) != 1 or not o.rational_at(s, b, u.info_set(p, m)):
                        bad.append((name, k, p, str(s), m))
    return bad


def _partition_failures(name):
    gnf = GeneralizedNormalForm(load(name))
    o = Oracle(gnf)
    pr = o.pr_levels()
    u = gnf.universe
    bad = []
    for p in gnf.players:
        for t in u.trees:
            own = u.info_sets_in_tree(p, t)
            if not own:
                continue
            for k in range(pr.fixed_level + 1):
                blocks = [o.survivors_allowing(pr, k, p, m) for m in o.rank_partition(p, t, pr, k)]
                target = frozenset().union(*(o.survivors_allowing(pr, k, p, m) for m in own))
                disjoint = all(not a & b for a, b in itertools.combinations(blocks, 2))
                if frozenset().union(*blocks) != target or not disjoint:
                    bad.append((name, p, t, k))
    return bad


def _epsilon_failures(name):
    """Compare every mass with the closed form, for uniform conditional beliefs on each block."""
    gnf = GeneralizedNormalForm(load(name))
    o = Oracle(gnf)
    pr = o.pr_levels()
    u = gnf.universe
    bad = []
    for p in gnf.players:
        for t in u.trees:
            if not u.info_sets_in_tree(p, t):
                continue
            for k in range(pr.fixed_level + 1):
                part = o.rank_partition(p, t, pr, k)
                survivors = o.induced_opponents(pr.level(k), p, t)
                if not survivors:
                    continue
                blocks = {g: sorted(o.survivors_allowing(pr, k, p, g)) for g in part}
                live = [g for g in part if blocks[g]]
                beliefs = {g: {x: Fraction(1, len(blocks[g])) for x in blocks[g]} for g in live}
                covered = set().union(*map(set, blocks.values()))
                uncovered = [x for x in survivors if x not in covered]
                for eps in EPSILONS:
                    got = dict(o.epsilon_fullsupport_belief(p, t, beliefs, eps, survivors, part).belief)
                    main = (1 - eps) if uncovered else Fraction(1)
                    want = {}
                    for g in live:
                        for x, q in beliefs[g].items():
                            want[x] = want.get(x, Fraction(0)) + main / len(live) * q
                    for x in uncovered:
                        want[x] = (eps if live else Fraction(1)) / len(uncovered)
                    if got != want or sum(got.values()) != 1:
                        bad.append((name, p, t, k, eps))
    return bad


def test_criterion_7_constructions():
    bad = {"conditioning": [], "rank partition": [], "epsilon": []}
    for name in VALID_FIXTURES:
        bad["conditioning"] += _conditioning_failures(name)
        bad["rank partition"] += _partition_failures(name)
        bad["epsilon"] += _epsilon_failures(name)
    ok = not any(bad.values())
    detail = f"{len(VALID_FIXTURES)} fixtures; " + ", ".join(f"{k}: {len(v)} failures" for k, v in bad.items())
    _report(7, "constructions", ok, detail)
    assert ok, bad


# -- criterion 8: mutation sensitivity --------------------------------------------------

MUTATIONS = {
    "no class propagation": Mutations(propagate=False),
    "no reflexive tree": Mutations(reflexive=False),
    "no positivity": Mutations(require_positive=False),
}


def caught_by(mutation, games=20):
    """Names of failing harness checks (and duality) under ``mutation``."""
    failed = set()
    forests = [load("g2")] + [generate(GeneratorConfig(seed=s)) for s in range(games)]
    for f in forests:
        failed |= {r.name for r in cross_check(f, mutation).failures()}
    if not mutation.require_positive and duality_discrepancies(200, require_positive=False):
        failed.add("duality")
    return failed


def test_criterion_8_mutations_are_caught():
    found = {label: sorted(caught_by(m)) for label, m in MUTATIONS.items()}
    g2_check = cross_check(load("g2"), MUTATIONS["no class propagation"]).result("icsd=efr")
    colin_ms = g2_check.level == 1 and g2_check.player == "C" and g2_check.only_left == ["MS"]
    ok = all(found.values()) and colin_ms
    _report(8, "mutation sensitivity", ok, "; ".join(f"{k}: caught by {v or 'nothing'}" for k, v in found.items()))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
