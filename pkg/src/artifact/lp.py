"""Exact rational simplex (Bland's rule) for small linear programs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Q = Fraction
_ZERO = Fraction(0)


class Unbounded(ArithmeticError):
    pass


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    x: tuple[Fraction, ...]      # primal optimum
    dual: tuple[Fraction, ...]   # shadow prices of the <= rows


def maximize(a: Sequence[Sequence[int | Fraction]], b: Sequence[int | Fraction],
             c: Sequence[int | Fraction]) -> LPResult:
    """Maximize ``c.x`` subject to ``a x <= b`` and ``x >= 0``, with ``b >= 0``.

    The slack basis is feasible because ``b`` is non-negative, so no phase one
    is needed.  Entering and leaving variables follow Bland's rule, which makes
    the pivot sequence (and therefore the returned vertex) deterministic.
    """
    m, n = len(a), len(c)
    if any(Fraction(v) < 0 for v in b):
        raise ValueError("right-hand side must be non-negative")
    width = n + m
    rows = []
    for r in range(m):
        row = [Fraction(v) for v in a[r]] + [_ZERO] * m + [Fraction(b[r])]
        row[n + r] = Fraction(1)
        rows.append(row)
    # objective row holds reduced costs z_j - c_j and the current value
    obj = [-Fraction(v) for v in c] + [_ZERO] * m + [_ZERO]
    basis = list(range(n, n + m))
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        leave = -1
        for r in range(m):
            coef = rows[r][enter]
            if coef > 0:
                ratio = rows[r][-1] / coef
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if best is None:
            raise Unbounded("linear program is unbounded")
        prow = rows[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [v / piv for v in prow]
            rows[leave] = prow
        for r in range(m):
            if r != leave:
                f = rows[r][enter]
                if f:
                    row = rows[r]
                    rows[r] = [x - f * y for x, y in zip(row, prow)]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, prow)]
        basis[leave] = enter
    x = [_ZERO] * width
    for r, j in enumerate(basis):
        x[j] = rows[r][-1]
    return LPResult(obj[-1], tuple(x[:n]), tuple(obj[n:n + m]))


def min_cover_lp(incidence: Sequence[Sequence[int]], cols: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Solve ``min 1.y`` s.t. ``M y >= 1``, ``y >= 0`` for a 0/1 matrix ``M`` (rows x cols).

    Solved through the packing dual ``max 1.u`` s.t. ``M^T u <= 1``; the cover is
    read off as the dual prices, which gives a basic optimal solution.
    """
    rows = len(incidence)
    if rows == 0:
        return Fraction(0), (_ZERO,) * cols
    at = [[incidence[r][j] for r in range(rows)] for j in range(cols)]
    res = maximize(at, [1] * cols, [1] * rows)
    return res.value, res.dual
