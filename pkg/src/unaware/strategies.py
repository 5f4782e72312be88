"""Partial strategies, induced strategies, the allows relation and play."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .model import GameForest, InfoSet, terminal_payoffs


@dataclass(frozen=True)
class PartialStrategy:
    """Actions of ``player`` at every information set of the ``scope``-partial game."""

    player: str
    scope: str
    actions: tuple

    def __str__(self) -> str:
        return render_actions(self.actions)


def render_actions(actions: tuple) -> str:
    if not actions:
        return "-"
    if all(len(a) == 1 for a in actions):
        return "".join(actions)
    return ".".join(actions)


class StrategyUniverse:
    """All partial strategies of a game, with the relations between them.

    Information sets of a player are numbered in canonical order; a partial
    strategy scoped to tree ``t`` lists one action per information set of the
    ``t``-partial game, in that order.
    """

    def __init__(self, forest: GameForest):
        self.forest = forest
        self.players = forest.players
        self.trees = tuple(forest.trees)
        self.base = forest.base_tree
        self.info_sets = forest.info_sets
        self._index = {p: {h.key: k for k, h in enumerate(hs)} for p, hs in forest.info_sets.items()}
        self.scopes = {t: forest.scope(t) for t in self.trees}
        self.H = {p: {t: tuple(k for k, h in enumerate(forest.info_sets[p]) if h.tree in set(self.scopes[t]))
                      for t in self.trees} for p in self.players}
        self._pos = {p: {t: {k: j for j, k in enumerate(self.H[p][t])} for t in self.trees} for p in self.players}
        self._strategies: dict = {}
        self._strategy_index: dict = {}
        self._succ = {p: self._successors(p) for p in self.players}
        self._requirements = {t: self._path_requirements(t) for t in self.trees}

    # -- information sets -------------------------------------------------

    def index(self, h: InfoSet) -> int:
        return self._index[h.player][h.key]

    def info_set(self, player: str, k: int) -> InfoSet:
        return self.info_sets[player][k]

    def info_sets_in_tree(self, player: str, tree: str) -> tuple:
        """Indices of ``player``'s information sets located in ``tree`` itself."""
        return tuple(k for k, h in enumerate(self.info_sets[player]) if h.tree == tree)

    def _successors(self, player: str) -> dict:
        hs = self.info_sets[player]
        return {k: frozenset(j for j, g in enumerate(hs) if self.forest.precedes(h, g)) for k, h in enumerate(hs)}

    def successors(self, player: str, k: int) -> frozenset:
        return self._succ[player][k]

    def predecessors(self, player: str, k: int) -> list:
        """Predecessors of information set ``k``, earliest first."""
        preds = [j for j, s in self._succ[player].items() if k in s]
        preds.sort(key=lambda j: len([i for i in preds if j in self._succ[player][i]]))
        return preds

    # -- enumeration ------------------------------------------------------

    def strategies(self, player: str, tree: str) -> list:
        key = (player, tree)
        if key not in self._strategies:
            sets = [self.info_sets[player][k].actions for k in self.H[player][tree]]
            out = [PartialStrategy(player, tree, acts) for acts in itertools.product(*sets)]
            self._strategies[key] = out
            self._strategy_index[key] = {s: j for j, s in enumerate(out)}
        return self._strategies[key]

    def strategy_index(self, s: PartialStrategy) -> int:
        self.strategies(s.player, s.scope)
        return self._strategy_index[(s.player, s.scope)][s]

    def full_strategies(self, player: str) -> list:
        return self.strategies(player, self.base)

    def all_strategies(self, player: str) -> list:
        """The union over trees of the player's partial strategies."""
        return [s for t in self.trees for s in self.strategies(player, t)]

    def parse_strategy(self, player: str, tree: str, text: str) -> PartialStrategy:
        for s in self.strategies(player, tree):
            if str(s) == text:
                return s
        raise KeyError(f"no {tree}-partial strategy {text!r} for {player}")

    def action(self, s: PartialStrategy, k: int) -> str:
        return s.actions[self._pos[s.player][s.scope][k]]

    # -- induced strategies and equivalence classes ------------------------

    def reaches(self, t: str, u: str) -> bool:
        return u in self.forest.reach[t]

    def induce(self, s: PartialStrategy, tree: str) -> PartialStrategy:
        if tree == s.scope:
            return s
        if not self.reaches(s.scope, tree):
            raise ValueError(f"tree {s.scope} does not reach {tree}")
        pos = self._pos[s.player][s.scope]
        return PartialStrategy(s.player, tree, tuple(s.actions[pos[k]] for k in self.H[s.player][tree]))

    def equivalence_class(self, s: PartialStrategy) -> list:
        """Strategies in finer scopes (and ``s`` itself) that induce ``s``."""
        out = []
        for t in self.trees:
            if t == s.scope:
                out.append(s)
            elif self.reaches(t, s.scope):
                out.extend(x for x in self.strategies(s.player, t) if self.induce(x, s.scope) == s)
        return out

    # -- replacements -----------------------------------------------------

    def replace(self, s: PartialStrategy, other: PartialStrategy, k: int) -> PartialStrategy:
        """``s`` with the actions of ``other`` at information set ``k`` and its successors."""
        if s.scope != other.scope or s.player != other.player:
            raise ValueError("replacement requires strategies of the same player and scope")
        swap = {k} | self._succ[s.player][k]
        pos = self._pos[s.player][s.scope]
        acts = list(s.actions)
        for j in swap:
            if j in pos:
                acts[pos[j]] = other.actions[pos[j]]
        return PartialStrategy(s.player, s.scope, tuple(acts))

    def replacements(self, s: PartialStrategy, k: int) -> list:
        """All ``k``-replacements of ``s`` (including ``s``), canonical order."""
        swap = [j for j in self.H[s.player][s.scope] if j == k or j in self._succ[s.player][k]]
        pos = self._pos[s.player][s.scope]
        out = []
        for combo in itertools.product(*(self.info_sets[s.player][j].actions for j in swap)):
            acts = list(s.actions)
            for j, a in zip(swap, combo):
                acts[pos[j]] = a
            out.append(PartialStrategy(s.player, s.scope, tuple(acts)))
        return out

    # -- paths and the allows relation ------------------------------------

    def _path_requirements(self, tree: str) -> dict:
        """Per node: player -> {information set index: action} needed to reach it.

        ``None`` marks nodes no profile can reach (conflicting requirements, or
        an action the mover is unaware of).
        """
        tr = self.forest.trees[tree]
        out: dict = {tr.root: {p: {} for p in self.players}}
        stack = [tr.root]
        while stack:
            n = stack.pop()
            req = out[n]
            node = tr.nodes[n]
            for prof, child in tr.children[n].items():
                if req is None:
                    out[child] = None
                    stack.append(child)
                    continue
                new = {p: dict(r) for p, r in req.items()}
                ok = True
                for p, a in zip(node.active, prof):
                    h = self.forest.pi[(tree, n, p)]
                    k = self.index(h)
                    if a not in h.actions or new[p].get(k, a) != a:
                        ok = False
                        break
                    new[p][k] = a
                out[child] = new if ok else None
                stack.append(child)
        return out

    def requirements(self, tree: str, node: str) -> Optional[dict]:
        return self._requirements[tree][node]

    def _matches(self, s: PartialStrategy, req: dict) -> bool:
        pos = self._pos[s.player][s.scope]
        return all(s.actions[pos[k]] == a for k, a in req.items())

    def allows_node(self, strategies: Iterable[PartialStrategy], tree: str, node: str) -> bool:
        """Some completion of the given strategies (other players free) reaches ``node``."""
        req = self._requirements[tree][node]
        if req is None:
            return False
        return all(self._matches(s, req[s.player]) for s in strategies)

    def allows(self, strategies, h: InfoSet) -> bool:
        """Whether a strategy, an opponent profile or a full profile allows ``h``.

        ``strategies`` is a single :class:`PartialStrategy` or an iterable of
        them (one per listed player); unlisted players are completed freely.
        """
        if isinstance(strategies, PartialStrategy):
            strategies = (strategies,)
        strategies = tuple(strategies)
        return any(self.allows_node(strategies, h.tree, n) for n in h.nodes)

    # -- play ---------------------------------------------------------------

    def _act(self, s: PartialStrategy, tree: str, node: str) -> str:
        h = self.forest.pi[(tree, node, s.player)]
        return s.actions[self._pos[s.player][s.scope][self.index(h)]]

    def play(self, profile: Mapping[str, PartialStrategy], tree: str, start: Optional[str] = None) -> str:
        """Terminal node of ``tree`` reached by ``profile`` (from ``start`` or the root)."""
        tr = self.forest.trees[tree]
        n = tr.root if start is None else start
        while True:
            node = tr.nodes[n]
            if node.terminal:
                return n
            prof = tuple(self._act(profile[p], tree, n) for p in node.active)
            n = tr.children[n][prof]

    def payoff(self, profile: Mapping[str, PartialStrategy], tree: str) -> dict:
        return terminal_payoffs(self.forest, tree, self.play(profile, tree))

    def forced_actions(self, player: str, h: InfoSet, opponents: Iterable[PartialStrategy]) -> Optional[dict]:
        """The player's own actions on the way to the node of ``h`` the opponents lead to."""
        opponents = tuple(opponents)
        for n in sorted(h.nodes, key=list(self.forest.trees[h.tree].nodes).index):
            req = self._requirements[h.tree][n]
            if req is None:
                continue
            if all(self._matches(s, req[s.player]) for s in opponents):
                return req[player]
        return None

    def conditional_play(self, h: InfoSet, s: PartialStrategy, opponents: Mapping[str, PartialStrategy]) -> str:
        """Terminal node of ``T_h`` reached when play is conditioned on reaching ``h``.

        The player's actions before ``h`` are those leading to ``h`` (even if
        ``s`` prescribes otherwise); ``s`` is followed at ``h`` and afterwards.
        """
        forced = self.forced_actions(s.player, h, opponents.values())
        if forced is None:
            raise ValueError(f"opponent profile does not allow {h!r}")
        pos = self._pos[s.player][s.scope]
        acts = list(s.actions)
        for k, a in forced.items():
            acts[pos[k]] = a
        profile = dict(opponents)
        profile[s.player] = PartialStrategy(s.player, s.scope, tuple(acts))
        return self.play(profile, h.tree)
