"""Dynamic games with unawareness: forests of trees and information sets.

A game is a family of trees, each a subtree of one base tree.  Every node of
every tree records the base node it copies.  Information sets are attached to
(tree, node, player) triples and may point into a different, less expressive
tree; that is how unawareness is represented.

Games are read from a JSON document (see :func:`parse_game`).  Parsing only
checks references and structure; the consistency properties of information
sets are reported by :func:`validate_forest`.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional


class GameFormatError(ValueError):
    """Raised for malformed game documents."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise GameFormatError(f"invalid rational {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise GameFormatError(f"invalid rational {value!r}; use an integer or a 'p/q' string")


def format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Node:
    id: str
    copy_of: str
    parent: Optional[str]
    action_profile: tuple  # ((player, action), ...) on the edge from the parent
    active: tuple
    actions: dict = field(hash=False, compare=False)  # player -> tuple of labels
    payoffs: Optional[dict] = field(default=None, hash=False, compare=False)

    @property
    def terminal(self) -> bool:
        return not self.active


@dataclass
class Tree:
    id: str
    nodes: dict  # node id -> Node, in document order
    root: str
    children: dict = field(default_factory=dict)  # node id -> {profile tuple: child id}

    def ancestors(self, node_id: str) -> list[str]:
        """Proper ancestors, root first."""
        out = []
        cur = self.nodes[node_id].parent
        while cur is not None:
            out.append(cur)
            cur = self.nodes[cur].parent
        out.reverse()
        return out

    def copies(self) -> frozenset:
        return frozenset(n.copy_of for n in self.nodes.values())

    def terminals(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.terminal]


@dataclass(frozen=True)
class InfoSet:
    """An information set of ``player``: a nonempty set of nodes of ``tree``."""

    player: str
    tree: str
    nodes: frozenset
    actions: tuple

    @property
    def key(self) -> tuple:
        return (self.player, self.tree, self.nodes)

    def __repr__(self) -> str:
        return f"InfoSet({self.player}, {self.tree}, {{{', '.join(sorted(self.nodes))}}})"


@dataclass
class GameForest:
    players: tuple
    trees: dict  # tree id -> Tree, canonical order
    base_tree: str
    pi: dict  # (tree, node, player) -> InfoSet
    info_sets: dict = field(default_factory=dict)  # player -> tuple[InfoSet], canonical order
    arrows: dict = field(default_factory=dict)  # tree -> frozenset of trees directly pointed to
    reach: dict = field(default_factory=dict)  # tree -> frozenset, transitive closure of arrows

    def __post_init__(self):
        self._derive()

    def _derive(self) -> None:
        tree_pos = {t: k for k, t in enumerate(self.trees)}
        node_pos = {t: {n: k for k, n in enumerate(tree.nodes)} for t, tree in self.trees.items()}
        seen = {}
        for h in self.pi.values():
            seen.setdefault(h.key, h)
        per_player = {p: [] for p in self.players}
        for h in seen.values():
            per_player[h.player].append(h)
        for p in per_player:
            per_player[p].sort(key=lambda h: (tree_pos[h.tree], min(node_pos[h.tree][n] for n in h.nodes)))
        self.info_sets = {p: tuple(v) for p, v in per_player.items()}
        arrows = {t: set() for t in self.trees}
        for (t, _, _), h in self.pi.items():
            if h.tree != t:
                arrows[t].add(h.tree)
        self.arrows = {t: frozenset(v) for t, v in arrows.items()}
        self.reach = {t: frozenset(_closure(t, self.arrows)) for t in self.trees}

    # -- relations ---------------------------------------------------------

    def precedes_tree(self, small: str, large: str) -> bool:
        """Subtree order: ``small`` is included in ``large``."""
        return self.trees[small].copies() <= self.trees[large].copies()

    def scope(self, tree: str) -> tuple:
        """Trees of the ``tree``-partial game in canonical order."""
        r = self.reach[tree]
        return tuple(t for t in self.trees if t == tree or t in r)

    def info_set_at(self, tree: str, node: str, player: str) -> InfoSet:
        return self.pi[(tree, node, player)]

    def node(self, tree: str, node: str) -> Node:
        return self.trees[tree].nodes[node]

    def precedes(self, h: InfoSet, g: InfoSet) -> bool:
        """``h`` precedes ``g``: same tree, every node of ``g`` has an ancestor in ``h``."""
        if h.tree != g.tree or h.player != g.player or h == g:
            return False
        tree = self.trees[h.tree]
        return all(any(a in h.nodes for a in tree.ancestors(n)) for n in g.nodes)

    def info_sets_in(self, player: str, tree: str) -> tuple:
        """Information sets of ``player`` in the ``tree``-partial game."""
        sc = set(self.scope(tree))
        return tuple(h for h in self.info_sets[player] if h.tree in sc)


def _closure(start: str, arrows: dict) -> set:
    out: set = set()
    stack = list(arrows[start])
    while stack:
        t = stack.pop()
        if t in out:
            continue
        out.add(t)
        stack.extend(arrows[t])
    return out


# -- parsing ---------------------------------------------------------------

def parse_game(text: str) -> GameForest:
    """Parse a game document (JSON) into a :class:`GameForest`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None
    return forest_from_dict(doc)


def load_game(path) -> GameForest:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise GameFormatError(f"{where}: missing key {key!r}")
    return doc[key]


def forest_from_dict(doc: dict) -> GameForest:
    players = _require(doc, "players", "game")
    if not isinstance(players, list) or not players or not all(isinstance(p, str) for p in players):
        raise GameFormatError("game: 'players' must be a nonempty list of strings")
    if len(set(players)) != len(players):
        raise GameFormatError("game: duplicate player id")
    players = tuple(players)
    pset = set(players)
    raw_trees = _require(doc, "trees", "game")
    base_id = _require(doc, "base_tree", "game")
    if not isinstance(raw_trees, list) or not raw_trees:
        raise GameFormatError("game: 'trees' must be a nonempty list")

    trees: dict = {}
    for rt in raw_trees:
        tid = _require(rt, "id", "tree")
        if tid in trees:
            raise GameFormatError(f"duplicate tree id {tid!r}")
        trees[tid] = _parse_tree(tid, _require(rt, "nodes", f"tree {tid}"), players, pset)
    if base_id not in trees:
        raise GameFormatError(f"unknown base tree {base_id!r}")
    base = trees[base_id]
    for tree in trees.values():
        for n in tree.nodes.values():
            if n.copy_of not in base.nodes:
                raise GameFormatError(f"tree {tree.id}, node {n.id}: copy_of {n.copy_of!r} is not a base node")
    ordered = {base_id: base}
    ordered.update((t, tr) for t, tr in trees.items() if t != base_id)

    pi: dict = {}
    records = doc.get("infosets", [])
    if not isinstance(records, list):
        raise GameFormatError("game: 'infosets' must be a list")
    groups: dict = {}
    for rec in records:
        t = _require(rec, "tree", "infoset")
        n = _require(rec, "node", "infoset")
        p = _require(rec, "player", "infoset")
        tt = _require(rec, "target_tree", "infoset")
        tn = _require(rec, "target_nodes", "infoset")
        if t not in trees:
            raise GameFormatError(f"infoset: unknown tree {t!r}")
        if tt not in trees:
            raise GameFormatError(f"infoset: unknown target tree {tt!r}")
        if n not in trees[t].nodes:
            raise GameFormatError(f"infoset: unknown node {n!r} in tree {t!r}")
        if p not in pset:
            raise GameFormatError(f"infoset: unknown player {p!r}")
        if not isinstance(tn, list) or not tn:
            raise GameFormatError(f"infoset at {t}/{n}/{p}: target_nodes must be a nonempty list")
        for m in tn:
            if m not in trees[tt].nodes:
                raise GameFormatError(f"infoset at {t}/{n}/{p}: unknown node {m!r} in tree {tt!r}")
        if (t, n, p) in groups:
            raise GameFormatError(f"duplicate infoset record for {t}/{n}/{p}")
        if p not in trees[t].nodes[n].active:
            raise GameFormatError(f"infoset at {t}/{n}/{p}: player is not active there")
        groups[(t, n, p)] = (tt, frozenset(tn))

    # default: singleton information sets for every unlisted active player
    for t, tree in trees.items():
        for node in tree.nodes.values():
            for p in node.active:
                groups.setdefault((t, node.id, p), (t, frozenset([node.id])))

    made: dict = {}
    for (t, n, p), (tt, nodes) in groups.items():
        key = (p, tt, nodes)
        if key not in made:
            first = min(nodes, key=list(trees[tt].nodes).index)
            acts = trees[tt].nodes[first].actions.get(p, ())
            made[key] = InfoSet(p, tt, nodes, tuple(acts))
        pi[(t, n, p)] = made[key]
    return GameForest(players, ordered, base_id, pi)


def _parse_tree(tid: str, raw_nodes, players: tuple, pset: set) -> Tree:
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise GameFormatError(f"tree {tid}: 'nodes' must be a nonempty list")
    nodes: dict = {}
    for rn in raw_nodes:
        nid = _require(rn, "id", f"tree {tid} node")
        if nid in nodes:
            raise GameFormatError(f"tree {tid}: duplicate node id {nid!r}")
        active = rn.get("active", []) or []
        for p in active:
            if p not in pset:
                raise GameFormatError(f"tree {tid}, node {nid}: unknown player {p!r}")
        active = tuple(p for p in players if p in set(active))
        actions = {}
        raw_actions = rn.get("actions", {}) or {}
        for p in active:
            acts = raw_actions.get(p)
            if not acts or not isinstance(acts, list):
                raise GameFormatError(f"tree {tid}, node {nid}: missing action list for {p!r}")
            if len(set(acts)) != len(acts):
                raise GameFormatError(f"tree {tid}, node {nid}: duplicate action for {p!r}")
            actions[p] = tuple(str(a) for a in acts)
        for p in raw_actions:
            if p not in active:
                raise GameFormatError(f"tree {tid}, node {nid}: actions given for inactive player {p!r}")
        payoffs = None
        if not active:
            raw_pay = rn.get("payoffs")
            if raw_pay is not None:
                if set(raw_pay) != pset:
                    raise GameFormatError(f"tree {tid}, node {nid}: payoffs must cover every player")
                payoffs = {p: parse_rational(raw_pay[p]) for p in players}
        prof = rn.get("action_profile") or {}
        profile = tuple((p, str(prof[p])) for p in players if p in prof)
        if len(profile) != len(prof):
            raise GameFormatError(f"tree {tid}, node {nid}: action_profile names an unknown player")
        nodes[nid] = Node(nid, rn.get("copy_of", nid), rn.get("parent"), profile, active, actions, payoffs)

    roots = [n.id for n in nodes.values() if n.parent is None]
    if len(roots) != 1:
        raise GameFormatError(f"tree {tid}: expected exactly one root, found {len(roots)}")
    children: dict = {n: {} for n in nodes}
    for n in nodes.values():
        if n.parent is None:
            continue
        if n.parent not in nodes:
            raise GameFormatError(f"tree {tid}, node {n.id}: unknown parent {n.parent!r}")
        par = nodes[n.parent]
        if par.terminal:
            raise GameFormatError(f"tree {tid}, node {n.id}: parent {par.id!r} has no active player")
        prof = dict(n.action_profile)
        if set(prof) != set(par.active):
            raise GameFormatError(f"tree {tid}, node {n.id}: action_profile must name exactly the parent's active players")
        for p, a in prof.items():
            if a not in par.actions[p]:
                raise GameFormatError(f"tree {tid}, node {n.id}: action {a!r} not available to {p!r} at {par.id!r}")
        key = tuple(prof[p] for p in par.active)
        if key in children[par.id]:
            raise GameFormatError(f"tree {tid}: two children of {par.id!r} share action profile {key}")
        children[par.id][key] = n.id
    tree = Tree(tid, nodes, roots[0], children)
    # cycle check: every node must reach the root
    for nid in nodes:
        seen = set()
        cur = nid
        while cur is not None:
            if cur in seen:
                raise GameFormatError(f"tree {tid}: parent cycle through {nid!r}")
            seen.add(cur)
            cur = nodes[cur].parent
    return tree


def forest_to_dict(forest: GameForest) -> dict:
    """Inverse of :func:`forest_from_dict` (information sets listed explicitly)."""
    trees = []
    for tree in forest.trees.values():
        nodes = []
        for n in tree.nodes.values():
            rec = {"id": n.id, "copy_of": n.copy_of, "parent": n.parent,
                   "action_profile": dict(n.action_profile) if n.parent is not None else None,
                   "active": list(n.active), "actions": {p: list(a) for p, a in n.actions.items()}}
            if n.payoffs is not None:
                rec["payoffs"] = {p: format_rational(v) for p, v in n.payoffs.items()}
            nodes.append(rec)
        trees.append({"id": tree.id, "nodes": nodes})
    infosets = []
    for (t, n, p), h in forest.pi.items():
        infosets.append({"tree": t, "node": n, "player": p, "target_tree": h.tree,
                         "target_nodes": sorted(h.nodes, key=list(forest.trees[h.tree].nodes).index)})
    return {"players": list(forest.players), "base_tree": forest.base_tree, "trees": trees, "infosets": infosets}


def terminal_payoffs(forest: GameForest, tree: str, node: str) -> dict:
    """Payoff vector at a terminal node; subtrees inherit the base tree's payoffs."""
    n = forest.trees[tree].nodes[node]
    if n.payoffs is not None:
        return n.payoffs
    base = forest.trees[forest.base_tree].nodes[n.copy_of]
    if base.payoffs is None:
        raise GameFormatError(f"terminal node {tree}/{node} has no payoffs")
    return base.payoffs


# -- validation ------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    prop: str
    message: str

    def __str__(self) -> str:
        return f"[{self.prop}] {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def properties(self) -> set:
        return {v.prop for v in self.violations}

    def add(self, prop: str, message: str) -> None:
        self.violations.append(Violation(prop, message))


def validate_forest(forest: GameForest) -> ValidationReport:
    """Check the structural and information-set properties of a game.

    Properties: ``subtree-closure``, ``terminal-copy``, ``action-set-consistency``,
    ``I0`` .. ``I6``, ``arborescence`` and ``reachability`` (every tree is
    reachable from the base tree).  Violations are data; nothing is raised.
    """
    rep = ValidationReport()
    _check_subtrees(forest, rep)
    _check_info_sets(forest, rep)
    if rep.valid:
        _check_arborescence(forest, rep)
    unreachable = [t for t in forest.trees if t != forest.base_tree and t not in forest.reach[forest.base_tree]]
    for t in unreachable:
        rep.add("reachability", f"tree {t} is not reachable from the base tree {forest.base_tree}")
    for t, tree in forest.trees.items():
        for n in tree.nodes.values():
            for p in n.active:
                if not any(h.tree == t for h in forest.info_sets[p]) and n.id == tree.root:
                    rep.notes.append(f"player {p} is active at the root of {t} but has no information set in {t}")
    return rep


def _check_subtrees(forest: GameForest, rep: ValidationReport) -> None:
    base = forest.trees[forest.base_tree]
    for tree in forest.trees.values():
        seen_copies = {}
        for n in tree.nodes.values():
            if n.copy_of in seen_copies:
                rep.add("subtree-closure", f"{tree.id}: nodes {seen_copies[n.copy_of]} and {n.id} copy the same base node")
            seen_copies[n.copy_of] = n.id
            b = base.nodes[n.copy_of]
            if tree.id == forest.base_tree and n.copy_of != n.id:
                rep.add("subtree-closure", f"base tree node {n.id} must copy itself")
            if n.parent is not None:
                par = tree.nodes[n.parent]
                if b.parent != par.copy_of:
                    rep.add("subtree-closure", f"{tree.id}/{n.id}: parent does not copy the base parent")
                elif b.action_profile != n.action_profile:
                    rep.add("subtree-closure", f"{tree.id}/{n.id}: edge label differs from the base edge")
            if n.terminal:
                if not b.terminal:
                    rep.add("terminal-copy", f"{tree.id}/{n.id} is terminal but copies decision node {b.id}")
                elif n.payoffs is not None and b.payoffs is not None and n.payoffs != b.payoffs:
                    rep.add("terminal-copy", f"{tree.id}/{n.id}: payoffs differ from base node {b.id}")
                elif n.payoffs is None and b.payoffs is None:
                    rep.add("terminal-copy", f"{tree.id}/{n.id}: no payoffs")
            else:
                if b.terminal or b.active != n.active:
                    rep.add("subtree-closure", f"{tree.id}/{n.id}: active players differ from base node {b.id}")
                    continue
                for p in n.active:
                    if not set(n.actions[p]) <= set(b.actions[p]):
                        rep.add("subtree-closure", f"{tree.id}/{n.id}: actions of {p} not a subset of the base node's")
                expected = set(itertools.product(*(n.actions[p] for p in n.active)))
                got = set(tree.children[n.id])
                if expected != got:
                    rep.add("subtree-closure", f"{tree.id}/{n.id}: children do not match the action profiles")


def _own_history(forest: GameForest, tree: str, node: str, player: str) -> list:
    """(information set, action) pairs of ``player`` on the path to ``node``."""
    tr = forest.trees[tree]
    path = tr.ancestors(node) + [node]
    out = []
    for a, b in zip(path, path[1:]):
        an = tr.nodes[a]
        if player in an.active:
            out.append((forest.pi[(tree, a, player)], dict(tr.nodes[b].action_profile)[player]))
    return out


def _check_info_sets(forest: GameForest, rep: ValidationReport) -> None:
    pi = forest.pi
    for t, tree in forest.trees.items():
        for n in tree.nodes.values():
            for p in n.active:
                if (t, n.id, p) not in pi:
                    rep.add("I0", f"no information set for {p} at {t}/{n.id}")
    for (t, n, p), h in pi.items():
        where = f"{p} at {t}/{n}"
        # I0: confinement in one tree, which must be no more expressive than T_n
        if not forest.precedes_tree(h.tree, t):
            rep.add("I0", f"{where}: information set lies in {h.tree}, which is not a subtree of {t}")
        # I1
        if h.tree == t and n not in h.nodes:
            rep.add("I1", f"{where}: information set in the own tree does not contain the node")
        node = forest.trees[t].nodes[n]
        for m in h.nodes:
            target = forest.trees[h.tree].nodes[m]
            # I2
            g = pi.get((h.tree, m, p))
            if g is None or g != h:
                rep.add("I2", f"{where}: node {h.tree}/{m} of the information set has a different information set")
            # I4
            if p not in target.active or not set(target.actions[p]) <= set(node.actions[p]):
                rep.add("I4", f"{where}: actions at {h.tree}/{m} are not available at {t}/{n}")
        # I3
        ttree = forest.trees[h.tree]
        for m in h.nodes:
            for d in _descendants(ttree, m):
                dn = ttree.nodes[d]
                if p in dn.active:
                    g = pi.get((h.tree, d, p))
                    if g is not None and g.tree != h.tree:
                        rep.add("I3", f"{where}: later node {h.tree}/{d} has an information set outside {h.tree}")
    # action-set-consistency: within a tree, nodes sharing an information set share action labels
    for t, tree in forest.trees.items():
        by_h: dict = {}
        for n in tree.nodes.values():
            for p in n.active:
                h = pi.get((t, n.id, p))
                if h is None:
                    continue
                prev = by_h.setdefault(h.key, (n.id, set(n.actions[p])))
                if prev[1] != set(n.actions[p]):
                    rep.add("action-set-consistency",
                            f"{t}: {p} has one information set at {prev[0]} and {n.id} with different action sets")
    # I5: action identity is indexed by information set; distinct information sets in a
    # tree must not be merged by identical (information set, label) identities
    for t, tree in forest.trees.items():
        ident: dict = {}
        for n in tree.nodes.values():
            for p in n.active:
                h = pi.get((t, n.id, p))
                if h is None:
                    continue
                key = (p, frozenset((h.key, a) for a in n.actions[p]))
                if key in ident and ident[key] != h:
                    rep.add("I5", f"{t}: identical action sets of {p} at distinct information sets")
                ident.setdefault(key, h)
    # I6
    for (t, n, p), h in pi.items():
        hist = _own_history(forest, t, n, p)
        if not hist:
            continue
        for m in h.nodes:
            other = _own_history(forest, h.tree, m, p)
            other_keys = {(g.key, a) for g, a in other}
            for g, a in hist:
                if (g.key, a) not in other_keys:
                    rep.add("I6", f"{p} at {t}/{n}: took {a!r} at {g!r} earlier but node {h.tree}/{m} "
                                  f"of its information set has no such history")
                    break


def _descendants(tree: Tree, node: str) -> Iterable[str]:
    stack = list(tree.children[node].values())
    while stack:
        d = stack.pop()
        yield d
        stack.extend(tree.children[d].values())


def _check_arborescence(forest: GameForest, rep: ValidationReport) -> None:
    for p in forest.players:
        hs = forest.info_sets[p]
        for g in hs:
            preds = [h for h in hs if forest.precedes(h, g)]
            for a, b in itertools.combinations(preds, 2):
                if not (forest.precedes(a, b) or forest.precedes(b, a)):
                    rep.add("arborescence", f"{p}: predecessors {a!r} and {b!r} of {g!r} are not ordered")


def partial_game(forest: GameForest, tree: str) -> GameForest:
    """The ``tree``-partial game: ``tree`` and every tree it reaches, rebased on ``tree``."""
    if tree not in forest.trees:
        raise KeyError(f"unknown tree {tree!r}")
    if tree == forest.base_tree:
        return forest
    keep = forest.scope(tree)
    new_base = forest.trees[tree]
    copy_map = {n.copy_of: n.id for n in new_base.nodes.values()}
    base_nodes = forest.trees[forest.base_tree].nodes
    trees = {}
    for t in keep:
        old = forest.trees[t]
        nodes = {}
        for n in old.nodes.values():
            payoffs = n.payoffs
            if payoffs is None and n.terminal:
                payoffs = base_nodes[n.copy_of].payoffs
            nodes[n.id] = Node(n.id, copy_map.get(n.copy_of, n.copy_of), n.parent, n.action_profile,
                               n.active, dict(n.actions), payoffs)
        trees[t] = Tree(t, nodes, old.root, {k: dict(v) for k, v in old.children.items()})
    pi = {k: h for k, h in forest.pi.items() if k[0] in trees}
    return GameForest(forest.players, trees, tree, pi)
