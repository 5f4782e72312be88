"""Strict and weak dominance by mixtures, and the dual belief tests.

Every procedure takes an abstract payoff function ``payoff(own, opp)`` so the
same code serves normal-form restrictions, conditional payoffs at an
information set and plain matrices.  All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Optional, Sequence

from .lp import solve_lp

Payoff = Callable[[Hashable, Hashable], Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class DominanceWitness:
    dominated: Hashable
    mixture: tuple  # ((strategy, weight), ...) with positive weights
    mode: str  # "strict" | "weak"
    scope: Hashable = None

    def verify(self, opp: Sequence, payoff: Payoff, own: Optional[Sequence] = None) -> bool:
        """Re-check the defining inequalities by direct evaluation."""
        weights = [w for _, w in self.mixture]
        if any(w <= 0 for w in weights) or sum(weights) != 1:
            return False
        if own is not None and any(s not in own for s, _ in self.mixture):
            return False
        gaps = [sum(w * payoff(s, o) for s, w in self.mixture) - payoff(self.dominated, o) for o in opp]
        if not gaps:
            return False
        if self.mode == "strict":
            return all(g > 0 for g in gaps)
        return all(g >= 0 for g in gaps) and any(g > 0 for g in gaps)


@dataclass(frozen=True)
class BeliefWitness:
    player: str
    scope: Hashable
    belief: tuple  # ((opponent profile, probability), ...) with positive probabilities
    full_support: bool

    def as_dict(self) -> dict:
        return dict(self.belief)

    def verify(self, strategy, candidates: Sequence, domain: Sequence, payoff: Payoff) -> bool:
        """Probabilities valid, support inside ``domain``, ``strategy`` a best reply."""
        probs = [p for _, p in self.belief]
        if any(p <= 0 for p in probs) or sum(probs) != 1:
            return False
        dom = set(domain)
        if any(o not in dom for o, _ in self.belief):
            return False
        if self.full_support and len(self.belief) != len(dom):
            return False
        value = sum(p * payoff(strategy, o) for o, p in self.belief)
        return all(sum(p * payoff(c, o) for o, p in self.belief) <= value for c in candidates)


def strictly_dominated(s, own: Sequence, opp: Sequence, payoff: Payoff,
                       scope: Hashable = None) -> Optional[DominanceWitness]:
    """A mixture over ``own`` strictly better than ``s`` against every ``opp``; else ``None``.

    ``s`` must belong to ``own`` and ``opp`` must be nonempty, otherwise the
    answer is ``None``.
    """
    own = list(own)
    opp = list(opp)
    if s not in own or not opp:
        return None
    base = [payoff(s, o) for o in opp]
    # cheap exit: a pure dominator
    for t in own:
        if t != s and all(payoff(t, o) > b for o, b in zip(opp, base)):
            return DominanceWitness(s, ((t, _ONE),), "strict", scope)
    # cheap exit: s is a best reply to some point belief
    if any(all(payoff(t, o) <= b for t in own) for o, b in zip(opp, base)):
        return None
    m = len(own)
    # variables: sigma_1..sigma_m, eps; maximize eps
    a_ub, b_ub = [], []
    for o, b in zip(opp, base):
        a_ub.append([-payoff(t, o) for t in own] + [_ONE])
        b_ub.append(-b)
    a_ub.append([_ZERO] * m + [_ONE])
    b_ub.append(_ONE)
    res = solve_lp([_ZERO] * m + [_ONE], a_ub, b_ub, [[_ONE] * m + [_ZERO]], [_ONE])
    if res.status != "optimal" or res.value <= 0:
        return None
    mix = tuple((t, w) for t, w in zip(own, res.x[:m]) if w > 0)
    return DominanceWitness(s, mix, "strict", scope)


def weakly_dominated(s, own: Sequence, opp: Sequence, payoff: Payoff,
                     scope: Hashable = None) -> Optional[DominanceWitness]:
    """A mixture over ``own`` weakly better everywhere and strictly somewhere."""
    own = list(own)
    opp = list(opp)
    if s not in own or not opp:
        return None
    base = [payoff(s, o) for o in opp]
    for t in own:
        if t == s:
            continue
        g = [payoff(t, o) - b for o, b in zip(opp, base)]
        if all(x >= 0 for x in g) and any(x > 0 for x in g):
            return DominanceWitness(s, ((t, _ONE),), "weak", scope)
    m, n = len(own), len(opp)
    # variables: sigma (m), slack (n); sum_t sigma_t u(t,o) - slack_o = u(s,o)
    a_eq, b_eq = [], []
    for k, (o, b) in enumerate(zip(opp, base)):
        row = [payoff(t, o) for t in own] + [_ZERO] * n
        row[m + k] = -_ONE
        a_eq.append(row)
        b_eq.append(b)
    a_eq.append([_ONE] * m + [_ZERO] * n)
    b_eq.append(_ONE)
    res = solve_lp([_ZERO] * m + [_ONE] * n, (), (), a_eq, b_eq)
    if res.status != "optimal" or res.value <= 0:
        return None
    mix = tuple((t, w) for t, w in zip(own, res.x[:m]) if w > 0)
    return DominanceWitness(s, mix, "weak", scope)


def _belief_lp(s, candidates, domain, payoff, full_support):
    """Feasibility of a justifying belief; with ``full_support`` the belief is
    written ``b_o = t + y_o`` and ``t`` is maximized."""
    n = len(domain)
    rows, rhs = [], []
    base = [payoff(s, o) for o in domain]
    for c in candidates:
        if c == s:
            continue
        row = [payoff(c, o) - b for o, b in zip(domain, base)]
        if any(row):
            if full_support:
                row = row + [sum(row)]
            rows.append(row)
            rhs.append(_ZERO)
    if full_support:
        obj = [_ZERO] * n + [_ONE]
        eq = [[_ONE] * n + [Fraction(n)]]
    else:
        obj = [_ZERO] * n
        eq = [[_ONE] * n]
    return solve_lp(obj, rows, rhs, eq, [_ONE])


def exists_justifying_belief(s, candidates: Sequence, domain: Sequence, payoff: Payoff,
                             player: str = "", scope: Hashable = None) -> Optional[BeliefWitness]:
    """A belief on ``domain`` under which ``s`` is a best reply among ``candidates``."""
    domain = list(domain)
    if not domain:
        raise ValueError("belief domain is empty")
    candidates = list(candidates)
    for o in domain:
        v = payoff(s, o)
        if all(payoff(c, o) <= v for c in candidates):
            return BeliefWitness(player, scope, ((o, _ONE),), len(domain) == 1)
    res = _belief_lp(s, candidates, domain, payoff, False)
    if res.status != "optimal":
        return None
    belief = tuple((o, p) for o, p in zip(domain, res.x) if p > 0)
    return BeliefWitness(player, scope, belief, len(belief) == len(domain))


def exists_fullsupport_justifying_belief(s, candidates: Sequence, domain: Sequence, payoff: Payoff,
                                         player: str = "", scope: Hashable = None,
                                         require_positive: bool = True) -> Optional[BeliefWitness]:
    """As :func:`exists_justifying_belief` with every domain element given positive weight.

    ``require_positive=False`` drops the positivity requirement; it exists only
    so the test suite can check that the requirement matters.
    """
    domain = list(domain)
    if not domain:
        raise ValueError("belief domain is empty")
    if not require_positive:
        return exists_justifying_belief(s, candidates, domain, payoff, player, scope)
    candidates = list(candidates)
    n = len(domain)
    uniform = Fraction(1, n)
    v = sum(payoff(s, o) for o in domain)
    if all(sum(payoff(c, o) for o in domain) <= v for c in candidates):
        return BeliefWitness(player, scope, tuple((o, uniform) for o in domain), True)
    res = _belief_lp(s, candidates, domain, payoff, True)
    if res.status != "optimal" or res.value <= 0:
        return None
    t = res.x[n]
    belief = tuple((o, p + t) for o, p in zip(domain, res.x[:n]))
    return BeliefWitness(player, scope, belief, True)
