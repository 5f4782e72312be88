"""The associated generalized normal form: one payoff table per tree.

Strategies are referred to by their index in the canonical enumeration of
:meth:`StrategyUniverse.strategies`.  A profile of a tree is a tuple of such
indices in player order; an opponent profile omits the player in question.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .model import GameForest, InfoSet, format_rational
from .strategies import StrategyUniverse


@dataclass(frozen=True)
class Restriction:
    """``own x opp`` within the normal form of ``tree``, for ``player``."""

    tree: str
    player: str
    own: frozenset
    opp: frozenset

    @property
    def empty(self) -> bool:
        return not self.own or not self.opp


@dataclass(frozen=True)
class NFInfoSet:
    """Normal-form version of information set(s) of one player.

    Identical sets coming from different information sets are stored once;
    ``sources`` keeps every originating information set.
    """

    restriction: Restriction
    sources: tuple = field(compare=False)

    @property
    def tree(self) -> str:
        return self.restriction.tree


class ExtendedRestriction:
    """One product restriction per tree: ``sets[tree][player]`` is a set of indices."""

    def __init__(self, sets: dict):
        self.sets = {t: {p: frozenset(v) for p, v in d.items()} for t, d in sets.items()}

    @classmethod
    def full(cls, gnf: "GeneralizedNormalForm") -> "ExtendedRestriction":
        u = gnf.universe
        return cls({t: {p: range(len(u.strategies(p, t))) for p in u.players} for t in u.trees})

    def __getitem__(self, tree: str) -> dict:
        return self.sets[tree]

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtendedRestriction) and self.sets == other.sets

    def __hash__(self):
        return hash(tuple(sorted((t, p, v) for t, d in self.sets.items() for p, v in d.items())))

    def issubset(self, other: "ExtendedRestriction") -> bool:
        return all(self.sets[t][p] <= other.sets[t][p] for t in self.sets for p in self.sets[t])

    def size(self) -> int:
        return sum(len(v) for d in self.sets.values() for v in d.values())


class GeneralizedNormalForm:
    """Payoff tables ``u_i^T`` and normal-form information sets of a game."""

    def __init__(self, forest_or_universe):
        if isinstance(forest_or_universe, StrategyUniverse):
            self.universe = forest_or_universe
        else:
            self.universe = StrategyUniverse(forest_or_universe)
        u = self.universe
        self.forest: GameForest = u.forest
        self.players = u.players
        self.tables: dict = {t: self._build_table(t) for t in u.trees}
        self._induce_cache: dict = {}
        self.nf_info_sets: dict = {p: self._build_nf_info_sets(p) for p in self.players}

    # -- tables -----------------------------------------------------------

    def _build_table(self, tree: str) -> dict:
        u = self.universe
        lists = [u.strategies(p, tree) for p in self.players]
        table = {}
        for idx in itertools.product(*(range(len(x)) for x in lists)):
            prof = {p: lists[j][k] for j, (p, k) in enumerate(zip(self.players, idx))}
            pay = u.payoff(prof, tree)
            table[idx] = tuple(pay[p] for p in self.players)
        return table

    def shape(self, tree: str) -> tuple:
        return tuple(len(self.universe.strategies(p, tree)) for p in self.players)

    def player_pos(self, player: str) -> int:
        return self.players.index(player)

    def profile(self, player: str, own: int, opp: tuple) -> tuple:
        k = self.player_pos(player)
        return opp[:k] + (own,) + opp[k:]

    def payoff(self, player: str, tree: str, own: int, opp: tuple) -> Fraction:
        return self.tables[tree][self.profile(player, own, opp)][self.player_pos(player)]

    def opponent_profiles(self, player: str, tree: str, sets: Optional[dict] = None) -> list:
        """Opponent profiles of ``tree`` (restricted to ``sets[j]`` when given)."""
        lists = []
        for p in self.players:
            if p == player:
                continue
            n = len(self.universe.strategies(p, tree))
            lists.append(sorted(sets[p]) if sets is not None else range(n))
        return list(itertools.product(*lists))

    def induce_index(self, player: str, tree: str, target: str) -> tuple:
        """``k -> index of induce(strategies(player, tree)[k], target)``."""
        key = (player, tree, target)
        if key not in self._induce_cache:
            u = self.universe
            self._induce_cache[key] = tuple(u.strategy_index(u.induce(s, target))
                                            for s in u.strategies(player, tree))
        return self._induce_cache[key]

    def opponents(self, player: str) -> tuple:
        return tuple(p for p in self.players if p != player)

    # -- normal-form information sets ------------------------------------

    def nf_infoset(self, h: InfoSet) -> Restriction:
        """Profiles of ``T_h``-partial strategies that allow ``h``, as own x opp."""
        u = self.universe
        p, t = h.player, h.tree
        own = frozenset(k for k, s in enumerate(u.strategies(p, t)) if u.allows(s, h))
        opp_players = self.opponents(p)
        lists = [u.strategies(q, t) for q in opp_players]
        opp = frozenset(o for o in self.opponent_profiles(p, t)
                        if u.allows(tuple(lists[j][k] for j, k in enumerate(o)), h))
        return Restriction(t, p, own, opp)

    def _build_nf_info_sets(self, player: str) -> tuple:
        merged: dict = {}
        for h in self.universe.info_sets[player]:
            r = self.nf_infoset(h)
            merged.setdefault(r, []).append(h)
        return tuple(NFInfoSet(r, tuple(src)) for r, src in merged.items())

    def nf_info_sets_in(self, player: str, tree: str) -> list:
        return [x for x in self.nf_info_sets[player] if x.tree == tree]

    def normal_form(self, player: str, tree: str) -> Restriction:
        return Restriction(tree, player, frozenset(range(len(self.universe.strategies(player, tree)))),
                           frozenset(self.opponent_profiles(player, tree)))

    def normal_forms(self, player: str) -> list:
        """Trees in which ``player`` has an information set (canonical order)."""
        trees = {h.tree for h in self.universe.info_sets[player]}
        return [t for t in self.universe.trees if t in trees]

    # -- export -----------------------------------------------------------

    def to_csv(self, tree: str) -> str:
        """Rows: first player's strategies; columns: profiles of the others."""
        u = self.universe
        first = self.players[0]
        rows = u.strategies(first, tree)
        cols = self.opponent_profiles(first, tree)
        others = self.opponents(first)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = [f"{first}\\{'/'.join(others)}"]
        for o in cols:
            header.append("/".join(str(u.strategies(q, tree)[k]) for q, k in zip(others, o)))
        w.writerow(header)
        for r, s in enumerate(rows):
            line = [str(s)]
            for o in cols:
                vec = self.tables[tree][self.profile(first, r, o)]
                line.append("(" + ", ".join(format_rational(v) for v in vec) + ")")
            w.writerow(line)
        return buf.getvalue()

    def describe_info_sets(self) -> dict:
        """Normal-form information sets as strategy-name lists, per player."""
        u = self.universe
        out = {}
        for p in self.players:
            entries = []
            others = self.opponents(p)
            for x in self.nf_info_sets[p]:
                r = x.restriction
                entries.append({
                    "tree": r.tree,
                    "sources": [sorted(h.nodes) for h in x.sources],
                    "own": [str(u.strategies(p, r.tree)[k]) for k in sorted(r.own)],
                    "opponents": ["/".join(str(u.strategies(q, r.tree)[k]) for q, k in zip(others, o))
                                  for o in sorted(r.opp)],
                })
            out[p] = entries
        return out


def intersect(x: Restriction, y: ExtendedRestriction) -> Restriction:
    """``x`` intersected with the restriction ``y`` places on ``x.tree``."""
    ys = y[x.tree]
    opp_players = [p for p in ys if p != x.player]
    opp = frozenset(o for o in x.opp if all(k in ys[q] for q, k in zip(opp_players, o)))
    return Restriction(x.tree, x.player, x.own & ys[x.player], opp)


def build_gnf(forest: GameForest) -> GeneralizedNormalForm:
    return GeneralizedNormalForm(forest)
