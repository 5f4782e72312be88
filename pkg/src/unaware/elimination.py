"""Iterated conditional strict/weak dominance and iterated admissibility.

The state of every procedure is an :class:`ExtendedRestriction`.  One step
computes, for every tree ``T'`` and player, the ``T'``-partial strategies
that are dominated on some conditioning set of ``T'``; a strategy scoped to
``T`` is then removed when its induced strategy in ``T`` itself or in a tree
reachable from ``T`` is among them.  All removals of a step are decided
against the same incoming restriction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dominance import DominanceWitness, strictly_dominated, weakly_dominated
from .normal_form import ExtendedRestriction, GeneralizedNormalForm, Restriction, intersect
from .strategies import PartialStrategy

CONCEPTS = {
    "icsd": ("strict", "conditional"),
    "icwd": ("weak", "conditional"),
    "ia": ("weak", "normal-form"),
}


@dataclass(frozen=True)
class Mutations:
    """Switches that cripple the engines; used to check the test suite has teeth."""

    propagate: bool = True
    reflexive: bool = True
    require_positive: bool = True


DEFAULT = Mutations()


@dataclass(frozen=True)
class Condition:
    """Where a dominance was found: a normal-form information set or a whole normal form."""

    tree: str
    sources: tuple  # information sets; empty for a whole normal form

    def describe(self) -> str:
        if not self.sources:
            return f"normal form of {self.tree}"
        h = self.sources[0]
        return f"{h.player}@{self.tree}{{{','.join(sorted(h.nodes))}}}"


@dataclass(frozen=True)
class Removal:
    strategy: PartialStrategy
    via: PartialStrategy  # the induced strategy found dominated
    condition: Condition
    witness: DominanceWitness


@dataclass
class EliminationTrace:
    concept: str
    gnf: GeneralizedNormalForm
    levels: list = field(default_factory=list)
    removals: list = field(default_factory=list)  # removals[k]: those leading from level k to k+1

    @property
    def fixed_level(self) -> int:
        return len(self.levels) - 1

    def level(self, k: int) -> ExtendedRestriction:
        return self.levels[min(k, self.fixed_level)]

    def survivors(self, k: int, player: str, tree: Optional[str] = None) -> list:
        tree = tree or self.gnf.universe.base
        strategies = self.gnf.universe.strategies(player, tree)
        return [strategies[j] for j in sorted(self.level(k)[tree][player])]

    def full_sets(self, k: int) -> dict:
        return {p: frozenset(self.survivors(k, p)) for p in self.gnf.players}

    def union_sets(self, k: int) -> dict:
        """Survivors over all trees, as sets of partial strategies."""
        u = self.gnf.universe
        return {p: frozenset(s for t in u.trees for s in self.survivors(k, p, t)) for p in self.gnf.players}


def conditioning_sets(gnf: GeneralizedNormalForm, player: str, tree: str, kind: str) -> list:
    if kind == "conditional":
        return [(x.restriction, Condition(tree, x.sources)) for x in gnf.nf_info_sets_in(player, tree)]
    if tree in gnf.normal_forms(player):
        return [(gnf.normal_form(player, tree), Condition(tree, ()))]
    return []


def dominated_in_tree(gnf: GeneralizedNormalForm, y: ExtendedRestriction, player: str, tree: str,
                      mode: str, kind: str) -> dict:
    """``{index: (Condition, witness)}`` for the ``tree``-partial strategies dominated on
    some conditioning set intersected with ``y`` (first set in canonical order)."""
    test = strictly_dominated if mode == "strict" else weakly_dominated
    out: dict = {}
    for x, cond in conditioning_sets(gnf, player, tree, kind):
        r: Restriction = intersect(x, y)
        if r.empty:
            continue
        own = sorted(r.own)
        opp = sorted(r.opp)

        def pay(s, o, _t=tree):
            return gnf.payoff(player, _t, s, o)

        for s in own:
            if s in out:
                continue
            w = test(s, own, opp, pay, scope=cond)
            if w is not None:
                out[s] = (cond, w)
    return out


def conditionally_dominated(gnf: GeneralizedNormalForm, s: PartialStrategy, y: ExtendedRestriction,
                            concept: str, mutations: Mutations = DEFAULT) -> Optional[Removal]:
    """Reason ``s`` is conditionally dominated on ``y`` under ``concept``, or ``None``."""
    mode, kind = CONCEPTS[concept]
    u = gnf.universe
    for t2 in candidate_trees(gnf, s.scope, mutations):
        via = u.induce(s, t2)
        dom = dominated_in_tree(gnf, y, s.player, t2, mode, kind)
        j = u.strategy_index(via)
        if j in dom:
            return Removal(s, via, *dom[j])
    return None


def conditionally_strictly_dominated(gnf, s, y, mutations: Mutations = DEFAULT):
    return conditionally_dominated(gnf, s, y, "icsd", mutations)


def conditionally_weakly_dominated(gnf, s, y, mutations: Mutations = DEFAULT):
    return conditionally_dominated(gnf, s, y, "icwd", mutations)


def nf_conditionally_weakly_dominated(gnf, s, y, mutations: Mutations = DEFAULT):
    return conditionally_dominated(gnf, s, y, "ia", mutations)


def candidate_trees(gnf: GeneralizedNormalForm, tree: str, mutations: Mutations = DEFAULT) -> list:
    """``tree`` itself and the trees it reaches, in canonical order (as allowed by ``mutations``)."""
    u = gnf.universe
    out = []
    for t in u.trees:
        if t == tree:
            if mutations.reflexive:
                out.append(t)
        elif mutations.propagate and u.reaches(tree, t):
            out.append(t)
    return out


def step(gnf: GeneralizedNormalForm, y: ExtendedRestriction, concept: str,
         mutations: Mutations = DEFAULT) -> tuple:
    """One application of the operator; returns ``(new restriction, removals)``."""
    mode, kind = CONCEPTS[concept]
    u = gnf.universe
    dominated = {(p, t): dominated_in_tree(gnf, y, p, t, mode, kind) for p in gnf.players for t in u.trees}
    new: dict = {}
    removals = []
    for t in u.trees:
        new[t] = {}
        targets = candidate_trees(gnf, t, mutations)
        for p in gnf.players:
            strategies = u.strategies(p, t)
            keep = set()
            for j in sorted(y[t][p]):
                reason = None
                for t2 in targets:
                    j2 = gnf.induce_index(p, t, t2)[j]
                    hit = dominated[(p, t2)].get(j2)
                    if hit is not None:
                        reason = Removal(strategies[j], u.strategies(p, t2)[j2], *hit)
                        break
                if reason is None:
                    keep.add(j)
                else:
                    removals.append(reason)
            new[t][p] = keep
    return ExtendedRestriction(new), removals


def U_step(gnf, y, mutations: Mutations = DEFAULT):
    return step(gnf, y, "icsd", mutations)[0]


def W_step(gnf, y, mutations: Mutations = DEFAULT):
    return step(gnf, y, "icwd", mutations)[0]


def IA_step(gnf, y, mutations: Mutations = DEFAULT):
    return step(gnf, y, "ia", mutations)[0]


def iterate(gnf: GeneralizedNormalForm, concept: str, mutations: Mutations = DEFAULT) -> EliminationTrace:
    """Apply the operator from the full strategy space until nothing changes."""
    if concept not in CONCEPTS:
        raise ValueError(f"unknown elimination concept {concept!r}")
    trace = EliminationTrace(concept, gnf)
    y = ExtendedRestriction.full(gnf)
    trace.levels.append(y)
    while True:
        nxt, removed = step(gnf, y, concept, mutations)
        if nxt == y:
            return trace
        trace.levels.append(nxt)
        trace.removals.append(removed)
        y = nxt
