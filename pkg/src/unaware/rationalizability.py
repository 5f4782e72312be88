"""Belief-based solution concepts, computed independently of the elimination engines.

Three level procedures over full strategies:

* extensive-form rationalizability, tested one information set at a time
  (beliefs at different information sets need not be linked);
* prudent rationalizability, with full-support conditional beliefs on the
  surviving profiles that allow the information set;
* prudent relaxed rationalizability, with full-support ex-ante beliefs.

Opponent profiles of a tree are tuples of strategy indices (see
:mod:`unaware.normal_form`); beliefs are dicts from such tuples to
probabilities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dominance import BeliefWitness, exists_fullsupport_justifying_belief, exists_justifying_belief
from .elimination import DEFAULT, Mutations
from .model import InfoSet, terminal_payoffs
from .normal_form import GeneralizedNormalForm
from .strategies import PartialStrategy

_ONE = Fraction(1)


@dataclass
class LevelSets:
    concept: str
    gnf: GeneralizedNormalForm
    levels: list = field(default_factory=list)  # levels[k][player] = frozenset of base indices
    witnesses: list = field(default_factory=list)  # witnesses[k][(player, index)] = {h index: BeliefWitness}
    converged: bool = True
    final_witnesses: dict = field(default_factory=dict)  # from the check that confirmed the fixed point

    @property
    def fixed_level(self) -> int:
        return len(self.levels) - 1

    def level(self, k: int) -> dict:
        return self.levels[min(k, self.fixed_level)]

    def survivors(self, k: int, player: str) -> list:
        full = self.gnf.universe.full_strategies(player)
        return [full[j] for j in sorted(self.level(k)[player])]

    def full_sets(self, k: int) -> dict:
        return {p: frozenset(self.survivors(k, p)) for p in self.gnf.players}

    def induced(self, k: int, player: str, tree: str) -> frozenset:
        u = self.gnf.universe
        m = self.gnf.induce_index(player, u.base, tree)
        return frozenset(m[j] for j in self.level(k)[player])


class Oracle:
    """Level procedures and belief utilities for one game."""

    def __init__(self, gnf: GeneralizedNormalForm, mutations: Mutations = DEFAULT):
        self.gnf = gnf
        self.u = gnf.universe
        self.mutations = mutations
        self.players = gnf.players
        self._nf = {(p, k): gnf.nf_infoset(h) for p in self.players for k, h in enumerate(self.u.info_sets[p])}
        self._cond: dict = {}

    # -- payoffs --------------------------------------------------------------

    def allowing(self, player: str, k: int) -> frozenset:
        """Opponent profiles of ``T_h`` that allow information set ``k``."""
        return self._nf[(player, k)].opp

    def own_allowing(self, player: str, k: int) -> frozenset:
        return self._nf[(player, k)].own

    def conditional_payoff(self, player: str, k: int, own: int, opp: tuple):
        key = (player, k, own, opp)
        v = self._cond.get(key)
        if v is None:
            h = self.u.info_set(player, k)
            t = h.tree
            others = self.gnf.opponents(player)
            profile = {q: self.u.strategies(q, t)[j] for q, j in zip(others, opp)}
            z = self.u.conditional_play(h, self.u.strategies(player, t)[own], profile)
            v = terminal_payoffs(self.u.forest, t, z)[player]
            self._cond[key] = v
        return v

    def _h(self, h) -> tuple:
        if isinstance(h, InfoSet):
            return h.player, self.u.index(h)
        return h

    def _own_index(self, s: PartialStrategy, tree: str) -> int:
        return self.u.strategy_index(self.u.induce(s, tree))

    def expected_payoff_at(self, h: InfoSet, s: PartialStrategy, belief: dict) -> Fraction:
        p, k = self._h(h)
        allowing = self.allowing(p, k)
        for o, q in belief.items():
            if q and o not in allowing:
                raise ValueError(f"belief support contains {o}, which does not allow the information set")
        j = self._own_index(s, h.tree)
        return sum((q * self.conditional_payoff(p, k, j, o) for o, q in belief.items() if q), Fraction(0))

    def rational_at(self, s: PartialStrategy, belief: dict, h: InfoSet) -> bool:
        s = self.u.induce(s, h.tree)
        if not self.u.allows(s, h):
            return True
        value = self.expected_payoff_at(h, s, belief)
        return all(self.expected_payoff_at(h, r, belief) <= value for r in self.u.replacements(s, self.u.index(h)))

    def relaxed_rational(self, s: PartialStrategy, belief: dict, h: InfoSet) -> bool:
        t = h.tree
        p = s.player
        j = self._own_index(s, t)

        def ev(own):
            return sum(q * self.gnf.payoff(p, t, own, o) for o, q in belief.items())

        value = ev(j)
        return all(ev(a) <= value for a in range(len(self.u.strategies(p, t))))

    # -- domains ----------------------------------------------------------------

    def induced_opponents(self, prev: dict, player: str, tree: str) -> list:
        """Product of the opponents' surviving strategies induced on ``tree``."""
        base = self.u.base
        sets = []
        for q in self.gnf.opponents(player):
            m = self.gnf.induce_index(q, base, tree)
            sets.append(sorted({m[j] for j in prev[q]}))
        return list(itertools.product(*sets))

    def _replacement_indices(self, player: str, k: int, own: int, tree: str) -> list:
        s = self.u.strategies(player, tree)[own]
        return [self.u.strategy_index(r) for r in self.u.replacements(s, k)]

    # -- level procedures -------------------------------------------------------

    def _run(self, concept: str, check, nested: bool) -> LevelSets:
        out = LevelSets(concept, self.gnf)
        full = {p: frozenset(range(len(self.u.full_strategies(p)))) for p in self.players}
        out.levels.append(full)
        out.witnesses.append({})
        prev = full
        self._history = out.levels
        cap = sum(len(v) for v in full.values()) + 2
        while True:
            domains: dict = {}
            cache: dict = {}
            cur: dict = {}
            wit: dict = {}
            for p in self.players:
                keep = set()
                pool = prev[p] if nested else full[p]
                for j in sorted(pool):
                    w = check(p, j, prev, domains, cache)
                    if w is not None:
                        keep.add(j)
                        wit[(p, j)] = w
                cur[p] = frozenset(keep)
            if cur == prev:
                out.final_witnesses = wit
                return out
            if len(out.levels) > cap:
                out.converged = False
                return out
            out.levels.append(cur)
            out.witnesses.append(wit)
            prev = cur

    def _efr_check(self, p, j, prev, domains, cache):
        witnesses = {}
        base = self.u.base
        for k, h in enumerate(self.u.info_sets[p]):
            t = h.tree
            own = self.gnf.induce_index(p, base, t)[j]
            if own not in self.own_allowing(p, k):
                continue
            if (p, k) not in domains:
                domains[(p, k)] = self.efr_domain(self._history, p, k)
            key = (p, k, own)
            if key not in cache:
                cands = self._replacement_indices(p, k, own, t)
                cache[key] = exists_justifying_belief(
                    own, cands, domains[(p, k)], lambda a, o: self.conditional_payoff(p, k, a, o), p, k)
            if cache[key] is None:
                return None
            witnesses[k] = cache[key]
        return witnesses

    def efr_domain(self, history: list, player: str, k: int) -> list:
        """Belief domain at information set ``k`` for the level after ``history[-1]``.

        Belief systems of a level must meet the support conditions of every
        earlier level, so the binding condition comes from the latest level
        whose survivors still allow the information set.
        """
        t = self.u.info_set(player, k).tree
        allowing = self.allowing(player, k)
        for prev in reversed(history):
            d = [o for o in self.induced_opponents(prev, player, t) if o in allowing]
            if d:
                return d
        return sorted(allowing)

    def _pr_check(self, p, j, prev, domains, cache):
        witnesses = {}
        base = self.u.base
        for k, h in enumerate(self.u.info_sets[p]):
            t = h.tree
            own = self.gnf.induce_index(p, base, t)[j]
            if own not in self.own_allowing(p, k):
                continue
            if (p, k) not in domains:
                allowing = self.allowing(p, k)
                domains[(p, k)] = [o for o in self.induced_opponents(prev, p, t) if o in allowing]
            if not domains[(p, k)]:
                continue
            key = (p, k, own)
            if key not in cache:
                cands = self._replacement_indices(p, k, own, t)
                cache[key] = exists_fullsupport_justifying_belief(
                    own, cands, domains[(p, k)], lambda a, o: self.conditional_payoff(p, k, a, o), p, k,
                    require_positive=self.mutations.require_positive)
            if cache[key] is None:
                return None
            witnesses[k] = cache[key]
        return witnesses

    def _prr_check(self, p, j, prev, domains, cache):
        witnesses = {}
        base = self.u.base
        for k, h in enumerate(self.u.info_sets[p]):
            t = h.tree
            own = self.gnf.induce_index(p, base, t)[j]
            if (p, k) not in domains:
                survivors = self.induced_opponents(prev, p, t)
                if survivors:
                    domains[(p, k)] = (True, survivors)
                else:
                    # some opponent has no survivor left: no support condition applies
                    domains[(p, k)] = (False, self.gnf.opponent_profiles(p, t))
            full_support, dom = domains[(p, k)]
            key = (p, t, full_support, own)
            if key not in cache:
                cands = sorted({self.gnf.induce_index(p, base, t)[a] for a in prev[p]})

                def pay(a, o, _t=t):
                    return self.gnf.payoff(p, _t, a, o)

                if full_support:
                    cache[key] = exists_fullsupport_justifying_belief(
                        own, cands, dom, pay, p, k, require_positive=self.mutations.require_positive)
                else:
                    cache[key] = exists_justifying_belief(own, cands, dom, pay, p, k)
            if cache[key] is None:
                return None
            witnesses[k] = cache[key]
        return witnesses

    def efr_levels(self) -> LevelSets:
        return self._run("efr", self._efr_check, nested=False)

    def pr_levels(self) -> LevelSets:
        return self._run("pr", self._pr_check, nested=True)

    def prr_levels(self) -> LevelSets:
        return self._run("prr", self._prr_check, nested=True)

    # -- constructions used in the equivalence arguments --------------------------

    def generalized_system(self, levels: LevelSets, k: int, player: str, j: int) -> dict:
        """A generalized belief system justifying full strategy ``j`` at level ``k``.

        Information sets the strategy excludes get a point belief on the first
        profile of their domain, which keeps the system well formed.  Sets that
        no opponent profile allows admit no such belief and are left out.
        """
        tested = levels.witnesses[k][(player, j)]
        out = {}
        for m in range(len(self.u.info_sets[player])):
            if m in tested:
                out[m] = tested[m].as_dict()
                continue
            d = self.efr_domain(levels.levels[:k], player, m)
            if d:
                out[m] = {d[0]: _ONE}
        return out

    def construct_conditioned_beliefs(self, player: str, system: dict) -> dict:
        """Derive beliefs by Bayesian updating along precedence wherever possible."""
        for m, b in system.items():
            allowing = self.allowing(player, m)
            if any(q and o not in allowing for o, q in b.items()):
                raise ValueError(f"belief at information set {m} does not allow it")
        order = sorted(system, key=lambda m: (len(self.u.predecessors(player, m)), m))
        out: dict = {}
        for m in order:
            preds = self.u.predecessors(player, m)
            if not preds:
                out[m] = dict(system[m])
                continue
            prior = out[preds[-1]]
            allowing = self.allowing(player, m)
            mass = sum(q for o, q in prior.items() if o in allowing)
            if mass > 0:
                out[m] = {o: q / mass for o, q in prior.items() if o in allowing and q}
            else:
                out[m] = dict(system[m])
        return out

    def rank_partition(self, player: str, tree: str, levels: Optional[LevelSets] = None, k: int = 0) -> list:
        """Unpreceded information sets of ``player`` located in ``tree``, by rank.

        The rank of an information set is the largest number of the player's
        information sets in ``tree`` met on a root-to-terminal path through it.
        """
        own = self.u.info_sets_in_tree(player, tree)
        if not own:
            raise ValueError(f"{player} has no information set in {tree}")
        tr = self.u.forest.trees[tree]
        hits = {n: m for m in own for n in self.u.info_set(player, m).nodes}

        def count(path):
            return len({hits[n] for n in path if n in hits})

        rank = {m: 0 for m in own}
        for z in tr.terminals():
            path = list(reversed(tr.ancestors(z))) + [z]
            c = count(path)
            for n in path:
                if n in hits:
                    rank[hits[n]] = max(rank[hits[n]], c)
        unpreceded = [m for m in own if not any(m in self.u.successors(player, g) for g in own)]
        return sorted(unpreceded, key=lambda m: (rank[m], m))

    def survivors_allowing(self, levels: LevelSets, k: int, player: str, m: int) -> frozenset:
        h = self.u.info_set(player, m)
        allowing = self.allowing(player, m)
        return frozenset(o for o in self.induced_opponents(levels.level(k), player, h.tree) if o in allowing)

    def epsilon_fullsupport_belief(self, player: str, tree: str, beliefs: dict, eps: Fraction,
                                   survivors, partition) -> BeliefWitness:
        """Mix conditional beliefs with an ``eps`` tremble onto unreached survivors.

        ``beliefs[g]`` is a belief on the surviving profiles allowing ``g`` for
        each ``g`` in ``partition``; ``survivors`` are all surviving profiles of
        ``tree``.  Blocks of the partition with no surviving profile are skipped.
        """
        eps = Fraction(eps)
        if not 0 < eps < 1:
            raise ValueError("eps must lie strictly between 0 and 1")
        blocks = {g: frozenset(o for o in survivors if o in self.allowing(player, g)) for g in partition}
        live = [g for g in partition if blocks[g]]
        covered = frozenset().union(*blocks.values()) if blocks else frozenset()
        uncovered = sorted(o for o in survivors if o not in covered)
        main = (_ONE - eps) if uncovered else _ONE
        if not live:
            main = Fraction(0)
        out: dict = {}
        for g in live:
            for o, q in beliefs[g].items():
                if q:
                    out[o] = out.get(o, Fraction(0)) + main / len(live) * q
        rest = eps if live else _ONE
        for o in uncovered:
            out[o] = rest / len(uncovered)
        belief = tuple(sorted(out.items()))
        return BeliefWitness(player, tree, belief, len(belief) == len(set(survivors)))


def efr_levels(gnf: GeneralizedNormalForm, mutations: Mutations = DEFAULT) -> LevelSets:
    return Oracle(gnf, mutations).efr_levels()


def pr_levels(gnf: GeneralizedNormalForm, mutations: Mutations = DEFAULT) -> LevelSets:
    return Oracle(gnf, mutations).pr_levels()


def prr_levels(gnf: GeneralizedNormalForm, mutations: Mutations = DEFAULT) -> LevelSets:
    return Oracle(gnf, mutations).prr_levels()
