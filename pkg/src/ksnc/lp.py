"""Exact bounded-variable primal simplex over the rationals (``gmpy2.mpq``).

Solves ``max c.x  s.t.  A x = b, 0 <= x <= upper`` for a fixed feasible
region and a sequence of objectives.  Phase one runs once at construction;
each :meth:`ExactLP.maximize` call starts from the previous optimal basis,
which stays primal feasible because only the objective changes.  Bland's
smallest-index rule prevents cycling on degenerate vertices.

The artificial columns of phase one are kept in the tableau after they
leave the basis: they hold ``B^-1`` (up to the row signs applied to make
``b >= 0``), so reduced costs are priced through the dual vector against the
sparse original columns.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

_ZERO = mpq(0)


class UnboundedLPError(ArithmeticError):
    pass


class ExactLP:
    def __init__(self, a: Sequence[Sequence], b: Sequence, upper: Sequence):
        self.n = len(upper)
        rows = [[_q(x) for x in row] for row in a]
        rhs = [_q(x) for x in b]
        for i in range(len(rows)):
            if rhs[i] < 0:
                rows[i] = [-x for x in rows[i]]
                rhs[i] = -rhs[i]
        m = len(rows)
        self.m = m
        self.columns = [[(i, rows[i][j]) for i in range(m) if rows[i][j]] for j in range(self.n)]
        # Artificial columns n..n+m-1 start as the basis.
        self.tableau = [row + [mpq(int(i == j)) for j in range(m)] for i, row in enumerate(rows)]
        self.bounds = [None if u is None else _q(u) for u in upper] + [None] * m
        self.basis = list(range(self.n, self.n + m))
        self.beta = rhs
        self.at_upper = [False] * (self.n + m)

        phase_one = [_ZERO] * self.n + [mpq(-1)] * m
        self._optimize(phase_one)
        infeasibility = sum(self.beta[i] for i, j in enumerate(self.basis) if j >= self.n)
        self.feasible = infeasibility == 0
        if self.feasible:
            self._drop_artificials()

    def _drop_artificials(self) -> None:
        r = 0
        while r < len(self.basis):
            if self.basis[r] < self.n:
                r += 1
                continue
            row = self.tableau[r]
            j = next((j for j in range(self.n) if row[j] != 0 and j not in self.basis), None)
            if j is None:
                # Redundant equality: every original column is zero in this row.
                del self.tableau[r], self.basis[r], self.beta[r]
                continue
            # Degenerate pivot: the artificial sits at 0, x_j keeps its bound value.
            value = self._value_of_nonbasic(j)
            self.at_upper[j] = False
            self._pivot(r, j)
            self.beta[r] = value
            r += 1

    def _pivot(self, r: int, j: int) -> None:
        t = self.tableau
        piv = t[r][j]
        if piv != 1:
            t[r] = [x / piv for x in t[r]]
        pr = t[r]
        for i in range(len(t)):
            if i != r:
                f = t[i][j]
                if f:
                    t[i] = [x - f * y if y else x for x, y in zip(t[i], pr)]
        self.basis[r] = j

    def _value_of_nonbasic(self, j: int):
        return self.bounds[j] if self.at_upper[j] else _ZERO

    def _reduced_cost(self, c: Sequence, j: int, y: list):
        if j < self.n:
            d = c[j]
            for k, akj in self.columns[j]:
                if y[k]:
                    d -= y[k] * akj
            return d
        return c[j] - y[j - self.n]

    def _optimize(self, c: Sequence) -> None:
        # Artificial columns never re-enter once they leave the basis.
        while True:
            y = [_ZERO] * self.m
            for i, bj in enumerate(self.basis):
                cb = c[bj]
                if cb:
                    row = self.tableau[i]
                    for k in range(self.m):
                        binv = row[self.n + k]
                        if binv:
                            y[k] += cb * binv
            basic = set(self.basis)
            entering = None
            for j in range(self.n):
                if j in basic:
                    continue
                d = self._reduced_cost(c, j, y)
                if d > 0 and not self.at_upper[j]:
                    entering, direction = j, 1
                    break
                if d < 0 and self.at_upper[j]:
                    entering, direction = j, -1
                    break
            if entering is None:
                return
            self._step(entering, direction)

    def _step(self, j: int, direction: int) -> None:
        theta = self.bounds[j]
        leave = None
        leave_to_upper = False
        for i, bj in enumerate(self.basis):
            alpha = direction * self.tableau[i][j]
            if alpha > 0:
                limit = self.beta[i] / alpha
                to_upper = False
            elif alpha < 0 and self.bounds[bj] is not None:
                limit = (self.bounds[bj] - self.beta[i]) / -alpha
                to_upper = True
            else:
                continue
            if theta is None or limit < theta or (
                limit == theta and leave is not None and bj < self.basis[leave]
            ):
                theta, leave, leave_to_upper = limit, i, to_upper
        if theta is None:
            raise UnboundedLPError("objective is unbounded")
        if theta:
            for i in range(len(self.basis)):
                tij = self.tableau[i][j]
                if tij:
                    self.beta[i] -= theta * direction * tij
        if leave is None:
            self.at_upper[j] = not self.at_upper[j]
            return
        entering_value = self._value_of_nonbasic(j) + theta * direction
        left = self.basis[leave]
        self.at_upper[left] = leave_to_upper
        self.at_upper[j] = False
        self._pivot(leave, j)
        self.beta[leave] = entering_value

    def _values(self) -> list:
        x = [self._value_of_nonbasic(j) for j in range(self.n)]
        for i, bj in enumerate(self.basis):
            if bj < self.n:
                x[bj] = self.beta[i]
        return x

    def solution(self) -> list[Fraction]:
        return [Fraction(int(v.numerator), int(v.denominator)) for v in self._values()]

    def maximize(self, c: Sequence) -> Fraction:
        if not self.feasible:
            raise ValueError("the feasible region is empty")
        cost = [_q(x) for x in c] + [_ZERO] * self.m
        self._optimize(cost)
        value = sum((ci * xi for ci, xi in zip(cost, self._values()) if ci), _ZERO)
        return Fraction(int(value.numerator), int(value.denominator))


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)
