"""Random games with unawareness and the harness that compares all six engines."""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import Optional

from .dominance import exists_fullsupport_justifying_belief
from .elimination import DEFAULT, Mutations, iterate
from .model import GameForest, forest_from_dict, validate_forest
from .normal_form import GeneralizedNormalForm
from .rationalizability import Oracle

LABELS = "abcdefgh"


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    players: tuple = (2, 3)  # inclusive range
    trees: tuple = (1, 3)
    max_depth: int = 3
    max_actions: int = 3
    payoff_range: tuple = (-9, 9)
    unawareness: float = 0.8  # chance an information set is moved into a coarser tree
    simultaneous: float = 0.2
    merge: float = 0.3
    terminal: float = 0.3  # chance a non-root node below the depth cap is terminal
    max_strategies: int = 24  # per player, full game
    max_profiles: int = 400  # per tree
    max_tries: int = 2000

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorConfig":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known
        if bad:
            raise ValueError(f"unknown generator option(s): {', '.join(sorted(bad))}")
        doc = {k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()}
        return cls(**doc)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


# -- generation ------------------------------------------------------------------

class _Builder:
    def __init__(self, cfg: GeneratorConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        n = rng.randint(*cfg.players)
        self.players = [f"P{k + 1}" for k in range(n)]
        self.nodes: dict = {}  # id -> record
        self.order: list = []
        self.counter = 0

    def _new_id(self) -> str:
        self.counter += 1
        return f"n{self.counter}"

    def build_base(self) -> None:
        self._grow(None, None, 0)

    def _grow(self, parent, profile, depth) -> str:
        cfg, rng = self.cfg, self.rng
        nid = self._new_id()
        rec = {"id": nid, "parent": parent, "action_profile": profile, "active": [], "actions": {}}
        self.nodes[nid] = rec
        self.order.append(nid)
        terminal = depth >= cfg.max_depth or (depth > 0 and rng.random() < cfg.terminal)
        if terminal:
            lo, hi = cfg.payoff_range
            rec["payoffs"] = {p: rng.randint(lo, hi) for p in self.players}
            return nid
        k = 2 if rng.random() < cfg.simultaneous else 1
        active = sorted(rng.sample(self.players, k), key=self.players.index)
        rec["active"] = active
        for p in active:
            rec["actions"][p] = list(LABELS[:rng.randint(2, cfg.max_actions)])
        profiles = _profiles(rec)
        for prof in profiles:
            self._grow(nid, dict(zip(active, prof)), depth + 1)
        return nid

    def children(self, nid: str) -> list:
        return [m for m in self.order if self.nodes[m]["parent"] == nid]

    def base_info_sets(self) -> list:
        """Singletons, occasionally merging sibling decision nodes of one player."""
        groups: dict = {}
        for nid in self.order:
            for p in self.nodes[nid]["active"]:
                groups[(nid, p)] = [nid]
        for nid in self.order:
            rec = self.nodes[nid]
            if len(rec["active"]) != 1 or self.rng.random() >= self.cfg.merge:
                continue
            kids = [m for m in self.children(nid) if len(self.nodes[m]["active"]) == 1]
            by_player: dict = {}
            for m in kids:
                q = self.nodes[m]["active"][0]
                if q != rec["active"][0]:
                    by_player.setdefault((q, len(self.nodes[m]["actions"][q])), []).append(m)
            for (q, _), ms in by_player.items():
                if len(ms) >= 2:
                    for m in ms:
                        groups[(m, q)] = ms
        seen, out = set(), []
        for (nid, p), ms in groups.items():
            key = (p, tuple(ms))
            if key not in seen:
                seen.add(key)
                out.append((p, ms))
        return out


def _profiles(rec: dict) -> list:
    import itertools
    return list(itertools.product(*(rec["actions"][p] for p in rec["active"])))


def _subtree(b: _Builder, parent_nodes: dict, root: str, prune: tuple) -> Optional[dict]:
    """Copy of ``parent_nodes`` below ``root`` without the pruned (player, nodes, action)."""
    player, where, action = prune
    out: dict = {}

    def visit(nid, parent, profile):
        rec = parent_nodes[nid]
        new = {"id": nid, "parent": parent, "action_profile": profile,
               "active": list(rec["active"]), "actions": {p: list(a) for p, a in rec["actions"].items()}}
        if "payoffs" in rec:
            new["payoffs"] = rec["payoffs"]
        if nid in where and player in new["active"]:
            acts = [a for a in new["actions"][player] if a != action]
            if not acts:
                return False
            new["actions"][player] = acts
        out[nid] = new
        if "payoffs" in rec:
            return True
        allowed = set(_profiles(new))
        for kid, krec in parent_nodes.items():
            if krec["parent"] != nid:
                continue
            prof = tuple(krec["action_profile"][p] for p in rec["active"])
            if prof in allowed and not visit(kid, nid, krec["action_profile"]):
                return False
        return True

    if not visit(root, None, None):
        return None
    out[root]["action_profile"] = None
    return out


def generate(config: GeneratorConfig) -> GameForest:
    """A random valid game; deterministic in ``config`` (including its seed)."""
    rng = random.Random(config.seed)
    for _ in range(config.max_tries):
        doc = _attempt(config, rng)
        if doc is None:
            continue
        forest = forest_from_dict(doc)
        if not validate_forest(forest).valid:
            continue
        if not _small_enough(forest, config):
            continue
        return forest
    raise GenerationError(f"no valid game within {config.max_tries} attempts (seed {config.seed})")


def _small_enough(forest: GameForest, cfg: GeneratorConfig) -> bool:
    from .strategies import StrategyUniverse
    u = StrategyUniverse(forest)
    for t in u.trees:
        total = 1
        for p in u.players:
            n = 1
            for k in u.H[p][t]:
                n *= len(u.info_set(p, k).actions)
            if t == u.base and n > cfg.max_strategies:
                return False
            total *= n
        if total > cfg.max_profiles:
            return False
    return True


def _attempt(cfg: GeneratorConfig, rng: random.Random) -> Optional[dict]:
    b = _Builder(cfg, rng)
    b.build_base()
    if not b.nodes["n1"]["active"]:
        return None
    base_sets = b.base_info_sets()
    trees = {"T1": dict(b.nodes)}
    sets = {"T1": base_sets}
    parents = {"T1": None}
    n_trees = rng.randint(*cfg.trees)
    for k in range(2, n_trees + 1):
        src = rng.choice(list(trees))
        nodes = trees[src]
        candidates = [(p, ms) for p, ms in sets[src]
                      if len(nodes[ms[0]]["actions"][p]) >= 2]
        if not candidates:
            break
        p, ms = rng.choice(candidates)
        action = rng.choice(nodes[ms[0]]["actions"][p])
        decision = [n for n in nodes if nodes[n]["active"]]
        root = next(n for n in nodes if nodes[n]["parent"] is None)
        if rng.random() < 0.3:
            root = rng.choice(decision)
        sub = _subtree(b, nodes, root, (p, set(ms), action))
        if sub is None or not any(r["active"] for r in sub.values()):
            continue
        tid = f"T{k}"
        trees[tid] = sub
        parents[tid] = src
        sets[tid] = [(q, [m for m in group if m in sub]) for q, group in sets[src]
                     if any(m in sub for m in group)]
    # default information sets inside each tree, then move some into coarser trees;
    # smaller trees first so a target's own information set is already final
    final: dict = {}
    records = []
    for tid in sorted(trees, key=lambda t: (len(trees[t]), t)):
        for q, group in sets[tid]:
            target_tree, target = tid, group
            coarser = [t for t in trees if t != tid and _coarser(trees, t, tid)
                       and all(m in trees[t] and q in trees[t][m]["active"] for m in group)]
            if coarser and rng.random() < cfg.unawareness:
                t2 = rng.choice(sorted(coarser))
                if (t2, group[0], q) in final:
                    target_tree, target = final[(t2, group[0], q)]
            for m in group:
                final[(tid, m, q)] = (target_tree, target)
    for tid in trees:
        for nid in trees[tid]:
            for q in trees[tid][nid]["active"]:
                target_tree, target = final[(tid, nid, q)]
                records.append({"tree": tid, "node": nid, "player": q,
                                "target_tree": target_tree, "target_nodes": list(target)})
    # keep only trees reachable from the base through the records
    reach = {"T1"}
    changed = True
    while changed:
        changed = False
        for r in records:
            if r["tree"] in reach and r["target_tree"] not in reach:
                reach.add(r["target_tree"])
                changed = True
    doc_trees = []
    for tid, nodes in trees.items():
        if tid not in reach:
            continue
        doc_nodes = []
        for nid, rec in nodes.items():
            out = {"id": nid, "copy_of": nid, "parent": rec["parent"],
                   "action_profile": rec["action_profile"], "active": rec["active"], "actions": rec["actions"]}
            if "payoffs" in rec:
                out["payoffs"] = rec["payoffs"]
            doc_nodes.append(out)
        doc_trees.append({"id": tid, "nodes": doc_nodes})
    return {"players": b.players, "base_tree": "T1", "trees": doc_trees,
            "infosets": [r for r in records if r["tree"] in reach]}


def _coarser(trees: dict, small: str, large: str) -> bool:
    """``small`` is a proper subtree of ``large`` (by copied node ids and actions)."""
    s, l_ = trees[small], trees[large]
    if not set(s) <= set(l_) or s == l_:
        return False
    for nid, rec in s.items():
        for p, acts in rec["actions"].items():
            if not set(acts) <= set(l_[nid]["actions"].get(p, ())):
                return False
    return True


# -- cross checks -------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    informational: bool = False
    level: Optional[int] = None
    player: Optional[str] = None
    only_left: list = field(default_factory=list)
    only_right: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v not in (None, [])}


@dataclass
class CrossCheckReport:
    results: list = field(default_factory=list)
    seed: Optional[int] = None
    config: Optional[dict] = None
    levels: dict = field(default_factory=dict)  # engine -> fixed level

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if not r.informational)

    def result(self, name: str) -> CheckResult:
        return next(r for r in self.results if r.name == name)

    def failures(self) -> list:
        return [r for r in self.results if not r.passed and not r.informational]

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "levels": self.levels, "checks": [r.to_dict() for r in self.results]}
        if self.seed is not None:
            out["reproducer"] = {"seed": self.seed, "config": self.config}
        return out


def _compare(name: str, left, right, players, names, informational=False) -> CheckResult:
    """``left(k)``/``right(k)`` give ``{player: set}``; compared at every level up to both fixed points."""
    top = max(left.fixed_level, right.fixed_level)
    for k in range(top + 1):
        a, c = left.sets(k), right.sets(k)
        for p in players:
            if a[p] != c[p]:
                return CheckResult(name, False, informational, k, p,
                                   sorted(names(x) for x in a[p] - c[p]), sorted(names(x) for x in c[p] - a[p]))
    return CheckResult(name, True, informational)


class _View:
    def __init__(self, fixed_level, sets):
        self.fixed_level = fixed_level
        self.sets = sets


def _trace_view(tr, whole=False):
    return _View(tr.fixed_level, (lambda k: tr.union_sets(k)) if whole else (lambda k: tr.full_sets(k)))


def _levels_view(ls):
    return _View(ls.fixed_level, ls.full_sets)


def cross_check(forest: GameForest, mutations: Mutations = DEFAULT, extras: bool = False) -> CrossCheckReport:
    """Run all six engines and compare them level by level (exact set equality)."""
    gnf = GeneralizedNormalForm(forest)
    oracle = Oracle(gnf, mutations)
    icsd = iterate(gnf, "icsd", mutations)
    icwd = iterate(gnf, "icwd", mutations)
    ia = iterate(gnf, "ia", mutations)
    efr = oracle.efr_levels()
    pr = oracle.pr_levels()
    prr = oracle.prr_levels()
    players = gnf.players
    rep = CrossCheckReport()
    rep.levels = {"icsd": icsd.fixed_level, "icwd": icwd.fixed_level, "ia": ia.fixed_level,
                  "efr": efr.fixed_level, "pr": pr.fixed_level, "prr": prr.fixed_level}
    name = str
    rep.results.append(_compare("icsd=efr", _trace_view(icsd), _levels_view(efr), players, name))
    rep.results.append(_compare("icwd=pr", _trace_view(icwd), _levels_view(pr), players, name))
    rep.results.append(_compare("ia=prr", _trace_view(ia), _levels_view(prr), players, name))
    rep.results.append(_compare("prr=pr", _levels_view(pr), _levels_view(prr), players, name))
    rep.results.append(_compare("ia=pr", _trace_view(ia), _levels_view(pr), players, name))
    rep.results.append(_compare("ia=icwd", _trace_view(ia, True), _trace_view(icwd, True), players,
                                lambda s: f"{s.scope}:{s}"))
    nested = all(efr.level(k)[p] <= efr.level(k - 1)[p] for k in range(2, efr.fixed_level + 1) for p in players)
    rep.results.append(CheckResult("efr-nested", nested and efr.converged))
    nonempty = all(icsd.full_sets(icsd.fixed_level)[p] and pr.full_sets(pr.fixed_level)[p] for p in players)
    rep.results.append(CheckResult("nonempty", bool(nonempty)))
    if extras:
        rep.results.append(_unintersected(gnf, ia, pr))
        rep.results.append(_pr_fallback(gnf, pr, mutations))
    return rep


def _unintersected(gnf, ia, pr) -> CheckResult:
    """Whether IA survivors in every tree equal the induced PR survivors (reported, not asserted)."""
    u = gnf.universe
    top = max(ia.fixed_level, pr.fixed_level)
    for k in range(top + 1):
        for p in gnf.players:
            for t in u.trees:
                got = ia.level(k)[t][p]
                want = pr.induced(k, p, t)
                if got != want:
                    strategies = u.strategies(p, t)
                    return CheckResult("ia=pr-per-tree", False, True, k, p,
                                       sorted(f"{t}:{strategies[j]}" for j in got - want),
                                       sorted(f"{t}:{strategies[j]}" for j in want - got))
    return CheckResult("ia=pr-per-tree", True, True)


def _pr_fallback(gnf, pr, mutations) -> CheckResult:
    """Whether falling back to all allowing profiles (instead of no constraint) changes PR."""
    oracle = Oracle(gnf, mutations)

    def check(p, j, prev, domains, cache):
        witnesses = {}
        base = oracle.u.base
        for k, h in enumerate(oracle.u.info_sets[p]):
            t = h.tree
            own = gnf.induce_index(p, base, t)[j]
            if own not in oracle.own_allowing(p, k):
                continue
            allowing = oracle.allowing(p, k)
            d = [o for o in oracle.induced_opponents(prev, p, t) if o in allowing] or sorted(allowing)
            w = exists_fullsupport_justifying_belief(
                own, oracle._replacement_indices(p, k, own, t), d,
                lambda a, o: oracle.conditional_payoff(p, k, a, o), p, k)
            if w is None:
                return None
            witnesses[k] = w
        return witnesses

    alt = oracle._run("pr-fallback", check, nested=True)
    res = _compare("pr-empty-domain", _levels_view(pr), _levels_view(alt), gnf.players, str, True)
    return res


def fuzz(n_games: int, seed: int, config: Optional[GeneratorConfig] = None,
         mutations: Mutations = DEFAULT, extras: bool = True) -> list:
    """Cross-check ``n_games`` generated games; game ``k`` uses seed ``seed + k``."""
    base = config or GeneratorConfig()
    out = []
    for k in range(n_games):
        cfg = GeneratorConfig(**{**asdict(base), "seed": seed + k})
        rep = cross_check(generate(cfg), mutations, extras)
        rep.seed = cfg.seed
        rep.config = cfg.to_dict()
        out.append(rep)
    return out
