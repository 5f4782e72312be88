"""Command-line front end.

Exit codes: 0 success, 1 domain error (unreadable or invalid game, failed
cross-check), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .elimination import CONCEPTS, iterate
from .model import GameFormatError, format_rational, load_game, validate_forest
from .normal_form import GeneralizedNormalForm
from .rationalizability import Oracle

SCHEMA = 1
BELIEF_CONCEPTS = ("efr", "pr", "prr")


class DomainError(Exception):
    pass


# -- rendering helpers -----------------------------------------------------------

def _info_set(h) -> dict:
    return {"player": h.player, "tree": h.tree, "nodes": sorted(h.nodes)}


def _info_set_text(h) -> str:
    return f"{h.player}@{h.tree}{{{','.join(sorted(h.nodes))}}}"


def _profile(gnf, player, tree, opp) -> dict:
    u = gnf.universe
    return {q: str(u.strategies(q, tree)[k]) for q, k in zip(gnf.opponents(player), opp)}


def _profile_text(gnf, player, tree, opp) -> str:
    return "/".join(_profile(gnf, player, tree, opp).values()) or "-"


def _survivor_table(gnf, sets_for) -> dict:
    u = gnf.universe
    return {t: {p: [str(s) for s in sets_for(p, t)] for p in gnf.players} for t in u.trees}


def _load(path: str):
    try:
        forest = load_game(path)
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror or e}")
    except GameFormatError as e:
        raise DomainError(f"{path}: {e}")
    rep = validate_forest(forest)
    if not rep.valid:
        raise DomainError(f"{path}: invalid game\n" + "\n".join(str(v) for v in rep.violations))
    return forest


# -- verbs ------------------------------------------------------------------------

def cmd_validate(args, out) -> int:
    try:
        forest = load_game(args.game)
    except OSError as e:
        raise DomainError(f"cannot read {args.game}: {e.strerror or e}")
    except GameFormatError as e:
        raise DomainError(f"{args.game}: {e}")
    rep = validate_forest(forest)
    if args.format == "json":
        doc = {"schema": SCHEMA, "valid": rep.valid,
               "violations": [{"property": v.prop, "message": v.message} for v in rep.violations],
               "notes": rep.notes}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for n in rep.notes:
            out.write(f"note: {n}\n")
        if rep.valid:
            out.write("valid\n")
    if not rep.valid:
        for v in rep.violations:
            sys.stderr.write(f"{v}\n")
        return 1
    return 0


def cmd_export_nf(args, out) -> int:
    forest = _load(args.game)
    gnf = GeneralizedNormalForm(forest)
    sidecar = {"schema": SCHEMA, "information_sets": gnf.describe_info_sets()}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for t in gnf.universe.trees:
            with open(os.path.join(args.out, f"{_safe(t)}.csv"), "w", encoding="utf-8", newline="") as fh:
                fh.write(gnf.to_csv(t))
        with open(os.path.join(args.out, "infosets.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(sidecar, indent=2) + "\n")
        return 0
    for t in gnf.universe.trees:
        out.write(f"# tree {t}\n")
        out.write(gnf.to_csv(t))
    out.write("# normal-form information sets\n")
    out.write(json.dumps(sidecar, indent=2) + "\n")
    return 0


def _safe(tree_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else f"_{ord(c):x}" for c in tree_id)


def solve_document(forest, concept: str, trace: bool = False, witness: bool = False) -> dict:
    """Everything ``solve`` prints, as a JSON-ready dict."""
    gnf = GeneralizedNormalForm(forest)
    u = gnf.universe
    doc = {"schema": SCHEMA, "concept": concept, "players": list(gnf.players), "trees": list(u.trees)}
    if concept in CONCEPTS:
        tr = iterate(gnf, concept)
        doc["fixed_level"] = tr.fixed_level
        doc["levels"] = [{"level": k, "survivors": _survivor_table(gnf, lambda p, t, k=k: tr.survivors(k, p, t))}
                         for k in range(tr.fixed_level + 1)]
        if trace:
            doc["removals"] = [_removal(gnf, k + 1, r) for k, rs in enumerate(tr.removals) for r in rs]
        return doc
    oracle = Oracle(gnf)
    ls = getattr(oracle, f"{concept}_levels")()
    doc["fixed_level"] = ls.fixed_level

    def induced(k):
        def f(p, t):
            strategies = u.strategies(p, t)
            return [strategies[j] for j in sorted(ls.induced(k, p, t))]
        return f

    doc["levels"] = [{"level": k, "survivors": _survivor_table(gnf, induced(k))} for k in range(ls.fixed_level + 1)]
    if trace:
        doc["removals"] = []
        for k in range(1, ls.fixed_level + 1):
            for p in gnf.players:
                full = u.full_strategies(p)
                for j in sorted(ls.level(k - 1)[p] - ls.level(k)[p]):
                    doc["removals"].append({"level": k, "player": p, "strategy": str(full[j])})
    if witness:
        doc["witnesses"] = []
        for (p, j), per_h in sorted(ls.final_witnesses.items(), key=lambda kv: (gnf.players.index(kv[0][0]), kv[0][1])):
            if j not in ls.level(ls.fixed_level)[p]:
                continue
            s = u.full_strategies(p)[j]
            for m, w in sorted(per_h.items()):
                h = u.info_set(p, m)
                doc["witnesses"].append({
                    "player": p, "strategy": str(s), "information_set": _info_set(h),
                    "full_support": w.full_support,
                    "belief": [{"profile": _profile(gnf, p, h.tree, o), "probability": format_rational(q)}
                               for o, q in w.belief],
                })
    return doc


def _removal(gnf, level, r) -> dict:
    u = gnf.universe
    p, t2 = r.via.player, r.via.scope
    cond = {"tree": r.condition.tree}
    if r.condition.sources:
        cond["information_sets"] = [_info_set(h) for h in r.condition.sources]
    else:
        cond["normal_form"] = True
    return {
        "level": level, "player": p, "tree": r.strategy.scope, "strategy": str(r.strategy),
        "via": {"tree": t2, "strategy": str(r.via)},
        "condition": cond,
        "witness": {"mode": r.witness.mode,
                    "mixture": [{"strategy": str(u.strategies(p, t2)[a]), "weight": format_rational(w)}
                                for a, w in r.witness.mixture]},
    }


def _text(doc: dict, out) -> None:
    out.write(f"concept {doc['concept']}: fixed point at level {doc['fixed_level']}\n")
    width = max(len(t) for t in doc["trees"])
    removals = doc.get("removals", [])
    witnesses = doc.get("witnesses", [])
    for lv in doc["levels"]:
        k = lv["level"]
        out.write(f"level {k}\n")
        for t in doc["trees"]:
            for p in doc["players"]:
                names = lv["survivors"][t][p]
                out.write(f"  {t:<{width}} {p}: {' '.join(names) if names else '(none)'}\n")
        for r in (x for x in removals if x["level"] == k):
            if "via" not in r:
                out.write(f"  removed {r['player']} {r['strategy']}\n")
                continue
            c = r["condition"]
            where = (f"normal form of {c['tree']}" if c.get("normal_form")
                     else " ".join(f"{h['player']}@{h['tree']}{{{','.join(h['nodes'])}}}"
                                   for h in c["information_sets"]))
            mix = " + ".join(f"{m['weight']}*{m['strategy']}" for m in r["witness"]["mixture"])
            out.write(f"  removed {r['player']} {r['tree']}:{r['strategy']} "
                      f"via {r['via']['tree']}:{r['via']['strategy']} on {where} by {mix}\n")
    if witnesses:
        out.write("witnesses\n")
        for w in witnesses:
            h = w["information_set"]
            belief = ", ".join(f"{b['probability']} {'/'.join(b['profile'].values()) or '-'}" for b in w["belief"])
            out.write(f"  {w['player']} {w['strategy']} at {h['player']}@{h['tree']}{{{','.join(h['nodes'])}}}: "
                      f"{belief}\n")


def cmd_solve(args, out) -> int:
    forest = _load(args.game)
    doc = solve_document(forest, args.concept, args.trace, args.witness)
    if args.witness and args.concept not in BELIEF_CONCEPTS:
        sys.stderr.write("note: --witness applies to efr, pr and prr only\n")
    if args.format == "json":
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        _text(doc, out)
    return 0


def cmd_fuzz(args, out) -> int:
    from .testkit import GenerationError, GeneratorConfig, fuzz
    cfg = GeneratorConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = GeneratorConfig.from_dict(json.load(fh))
        except (OSError, ValueError, TypeError) as e:
            raise DomainError(f"bad generator config {args.config}: {e}")
    try:
        reports = fuzz(args.games, args.seed, cfg)
    except GenerationError as e:
        raise DomainError(str(e))
    failed = [r for r in reports if not r.passed]
    doc = {"schema": SCHEMA, "games": args.games, "seed": args.seed, "failed": len(failed),
           "reports": [r.to_dict() for r in reports]}
    out.write(json.dumps(doc, indent=2) + "\n")
    counts: dict = {}
    for r in reports:
        for c in r.results:
            key = c.name + (" (informational)" if c.informational else "")
            counts.setdefault(key, [0, 0])[0 if c.passed else 1] += 1
    sys.stderr.write(f"{args.games} games, {len(failed)} with a failed check\n")
    for name, (ok, bad) in counts.items():
        sys.stderr.write(f"  {name}: {ok} pass, {bad} fail\n")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unaware", description="Solver for dynamic games with unawareness.")
    sub = ap.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("validate", help="check a game document")
    v.add_argument("game")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("export-nf", help="write the per-tree normal forms as CSV")
    e.add_argument("game")
    e.add_argument("--out", help="directory for <tree>.csv files and infosets.json (default: stdout)")
    e.set_defaults(func=cmd_export_nf)

    s = sub.add_parser("solve", help="run an elimination procedure or a rationalizability concept")
    s.add_argument("game")
    s.add_argument("--concept", required=True, choices=tuple(CONCEPTS) + BELIEF_CONCEPTS)
    s.add_argument("--trace", action="store_true", help="list removals and dominating mixtures")
    s.add_argument("--witness", action="store_true", help="list a justifying belief per survivor and information set")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("fuzz", help="cross-check all engines on generated games")
    f.add_argument("--games", type=int, default=20)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--config", help="JSON file with generator options")
    f.set_defaults(func=cmd_fuzz)
    return ap


def run(argv: Optional[list] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except DomainError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


def main() -> None:
    sys.exit(run())
