"""Exact rational linear programming.

A dense two-phase tableau simplex over :class:`fractions.Fraction` with
Bland's anti-cycling rule.  The problems solved by this package have at most
a few hundred variables, so exactness is worth far more than speed.

Problems are stated as::

    maximize    c . x
    subject to  A_ub x <= b_ub
                A_eq x == b_eq
                x >= 0
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class LPResult:
    status: str
    x: Optional[list[Fraction]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class _Tableau:
    """Rows are ``basis[r]: sum_j a[r][j] x_j = rhs[r]``; ``obj`` holds reduced costs."""

    def __init__(self, a: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.a = a
        self.rhs = rhs
        self.basis = basis
        self.n = len(a[0]) if a else 0
        self.obj: list[Fraction] = [_ZERO] * self.n
        self.obj_val = _ZERO

    def set_objective(self, c: Sequence[Fraction]) -> None:
        # reduced costs for maximization: obj[j] = c_j - c_B B^-1 A_j
        self.obj = list(c) + [_ZERO] * (self.n - len(c))
        self.obj_val = _ZERO
        for r, b in enumerate(self.basis):
            cb = self.obj[b]
            if cb:
                row = self.a[r]
                self.obj = [o - cb * v for o, v in zip(self.obj, row)]
                self.obj_val += cb * self.rhs[r]

    def pivot(self, r: int, j: int) -> None:
        row = self.a[r]
        p = row[j]
        if p != 1:
            row = [v / p if v else v for v in row]
            self.a[r] = row
            self.rhs[r] /= p
        nz = [c for c, v in enumerate(row) if v]
        rr = self.rhs[r]
        for k in range(len(self.a)):
            if k == r:
                continue
            other = self.a[k]
            f = other[j]
            if f:
                for c in nz:
                    other[c] -= f * row[c]
                if rr:
                    self.rhs[k] -= f * rr
        f = self.obj[j]
        if f:
            obj = self.obj
            for c in nz:
                obj[c] -= f * row[c]
            self.obj_val += f * rr
        self.basis[r] = j

    def run(self, allowed: Optional[set[int]] = None) -> str:
        while True:
            entering = None
            for j in range(self.n):
                if self.obj[j] > 0 and (allowed is None or j in allowed):
                    entering = j
                    break
            if entering is None:
                return OPTIMAL
            best = None
            for r in range(len(self.a)):
                v = self.a[r][entering]
                if v > 0:
                    ratio = self.rhs[r] / v
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def solve_lp(
    c: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Maximize ``c . x`` subject to the given constraints and ``x >= 0``."""
    n = len(c)
    c = [_frac(v) for v in c]
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n_slack = len(a_ub)
    for k, (row, b) in enumerate(zip(a_ub, b_ub)):
        full = [_frac(v) for v in row] + [_ZERO] * n_slack
        full[n + k] = _ONE
        rows.append(full)
        rhs.append(_frac(b))
    for row, b in zip(a_eq, b_eq):
        rows.append([_frac(v) for v in row] + [_ZERO] * n_slack)
        rhs.append(_frac(b))
    m = len(rows)
    width = n + n_slack
    if m == 0:
        if any(v > 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, [_ZERO] * n, _ZERO)

    for r in range(m):
        if rhs[r] < 0:
            rows[r] = [-v for v in rows[r]]
            rhs[r] = -rhs[r]

    # phase 1: one artificial per row, except rows whose slack can start basic
    basis: list[int] = []
    n_art = 0
    art_cols: list[int] = []
    for r in range(m):
        if r < n_slack and rows[r][n + r] == 1:
            basis.append(n + r)
        else:
            basis.append(-1)
            n_art += 1
    total = width + n_art
    a = [row + [_ZERO] * n_art for row in rows]
    col = width
    for r in range(m):
        if basis[r] == -1:
            a[r][col] = _ONE
            basis[r] = col
            art_cols.append(col)
            col += 1
    tab = _Tableau(a, rhs, basis)
    if n_art:
        tab.set_objective([_ZERO] * width + [-_ONE] * n_art)
        tab.run()
        if tab.obj_val < 0:
            return LPResult(INFEASIBLE)
        # drive remaining artificials out of the basis
        art = set(art_cols)
        for r in range(len(tab.a)):
            if tab.basis[r] in art:
                for j in range(width):
                    if tab.a[r][j] != 0:
                        tab.pivot(r, j)
                        break
        keep = [r for r in range(len(tab.a)) if tab.basis[r] not in art]
        tab.a = [tab.a[r][:width] for r in keep]
        tab.rhs = [tab.rhs[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
        tab.n = width
    tab.set_objective(c)
    status = tab.run()
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [_ZERO] * width
    for r, b in enumerate(tab.basis):
        x[b] = tab.rhs[r]
    return LPResult(OPTIMAL, x[:n], tab.obj_val)
