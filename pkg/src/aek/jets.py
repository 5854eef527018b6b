"""Truncated multivariate polynomial (jet) arithmetic.

Coefficients live in dense tables ordered by total degree then
lexicographically; all operations truncate at the jet's own order, so
the algebra closes over the truncation.  Two concrete charts are used:

* :class:`Jet2` over ``(x, y)``: height functions of surface patches,
  default order 5;
* :class:`Jet4` over ``(u1, v1, u2, v2)``: expansions of point-pair
  quantities, default order 4.

:class:`LinearFormJet` packages an expression that is affine-linear in
a space point ``X = (x, y, z)`` whose four coefficients are ``Jet4``
values; linearity in ``X`` is structural, not enforced by bookkeeping.

Everything is immutable and mode-tagged (see :mod:`aek.scalars`):
rational-mode arithmetic is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .scalars import FLOAT, ModeMismatchError, coerce, join_modes, zero


@lru_cache(maxsize=None)
def _exponents(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples with total degree <= order, graded lex order."""
    out = []
    for total in range(order + 1):
        for combo in product(range(total + 1), repeat=nvars):
            if sum(combo) == total:
                out.append(combo)
    return tuple(out)


@lru_cache(maxsize=None)
def _index(nvars: int, order: int) -> dict[tuple[int, ...], int]:
    return {e: k for k, e in enumerate(_exponents(nvars, order))}


@lru_cache(maxsize=None)
def _pair_table(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """pair_table[i][j] = index of exps[i]+exps[j], or -1 if truncated."""
    exps = _exponents(nvars, order)
    idx = _index(nvars, order)
    table = []
    for ea in exps:
        row = []
        for eb in exps:
            s = tuple(x + y for x, y in zip(ea, eb))
            row.append(idx.get(s, -1))
        table.append(tuple(row))
    return tuple(table)


class _Jet:
    """Shared implementation for the fixed-chart jet classes."""

    nvars: int
    varnames: tuple[str, ...]
    __slots__ = ("order", "mode", "coeffs")

    def __init__(self, order: int, mode: str, coeffs):
        if order < 0:
            raise ValueError("jet order must be nonnegative")
        self.order = order
        self.mode = mode
        n = len(_exponents(self.nvars, order))
        coeffs = tuple(coeffs)
        if len(coeffs) != n:
            raise ValueError(f"expected {n} coefficients, got {len(coeffs)}")
        self.coeffs = coeffs

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, order: int, mode: str):
        return cls(order, mode, [zero(mode)] * len(_exponents(cls.nvars, order)))

    @classmethod
    def constant(cls, value, order: int, mode: str):
        c = [zero(mode)] * len(_exponents(cls.nvars, order))
        c[0] = coerce(value, mode)
        return cls(order, mode, c)

    @classmethod
    def variable(cls, name: str, order: int, mode: str):
        if name not in cls.varnames:
            raise ValueError(f"unknown variable {name!r} for {cls.__name__}")
        if order < 1:
            raise ValueError("order too small to hold a variable")
        e = tuple(1 if v == name else 0 for v in cls.varnames)
        c = [zero(mode)] * len(_exponents(cls.nvars, order))
        c[_index(cls.nvars, order)[e]] = coerce(1, mode)
        return cls(order, mode, c)

    @classmethod
    def from_terms(cls, terms: dict, order: int, mode: str):
        """Build from a {exponent-tuple: value} map; degrees above
        ``order`` are rejected, not silently dropped."""
        c = [zero(mode)] * len(_exponents(cls.nvars, order))
        idx = _index(cls.nvars, order)
        for e, v in terms.items():
            e = tuple(e)
            if len(e) != cls.nvars:
                raise ValueError(f"exponent {e} has wrong arity")
            if sum(e) > order:
                raise ValueError(f"term {e} exceeds jet order {order}")
            c[idx[e]] = c[idx[e]] + coerce(v, mode)
        return cls(order, mode, c)

    # -- inspection ---------------------------------------------------

    def coefficient(self, *exponents: int):
        e = tuple(exponents)
        if sum(e) > self.order:
            return zero(self.mode)
        return self.coeffs[_index(self.nvars, self.order)[e]]

    def terms(self):
        """Yield (exponents, coefficient) for nonzero coefficients."""
        exps = _exponents(self.nvars, self.order)
        for k, c in enumerate(self.coeffs):
            if c:
                yield exps[k], c

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def max_abs(self) -> float:
        return max((abs(float(c)) for c in self.coeffs), default=0.0)

    def __repr__(self):
        parts = []
        for e, c in self.terms():
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v
                for v, k in zip(self.varnames, e) if k
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        body = " + ".join(parts) if parts else "0"
        return f"{type(self).__name__}[o{self.order},{self.mode}]({body})"

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.order == other.order
            and self.mode == other.mode
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((type(self).__name__, self.order, self.mode, self.coeffs))

    # -- ring operations ----------------------------------------------

    def _check_compatible(self, other):
        if type(self) is not type(other):
            raise ModeMismatchError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if self.order != other.order:
            raise ValueError(
                f"jet order mismatch: {self.order} vs {other.order}"
            )
        join_modes(self.mode, other.mode)

    def __add__(self, other):
        self._check_compatible(other)
        return type(self)(
            self.order, self.mode,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __sub__(self, other):
        self._check_compatible(other)
        return type(self)(
            self.order, self.mode,
            [a - b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __neg__(self):
        return type(self)(self.order, self.mode, [-a for a in self.coeffs])

    def scaled(self, factor):
        f = coerce(factor, self.mode)
        return type(self)(self.order, self.mode, [f * a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, _Jet):
            return self.scaled(other)
        self._check_compatible(other)
        table = _pair_table(self.nvars, self.order)
        out = [zero(self.mode)] * len(self.coeffs)
        for ia, ca in enumerate(self.coeffs):
            if not ca:
                continue
            row = table[ia]
            for ib, cb in enumerate(other.coeffs):
                if not cb:
                    continue
                ic = row[ib]
                if ic >= 0:
                    out[ic] = out[ic] + ca * cb
        return type(self)(self.order, self.mode, out)

    def __rmul__(self, other):
        return self.scaled(other)

    def power(self, k: int):
        if k < 0:
            raise ValueError("negative jet power")
        result = type(self).constant(1, self.order, self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus -----------------------------------------------------

    def partial(self, var: str):
        """Formal partial derivative; degree drops by one, order kept."""
        if var not in self.varnames:
            raise ValueError(f"unknown variable {var!r}")
        j = self.varnames.index(var)
        exps = _exponents(self.nvars, self.order)
        idx = _index(self.nvars, self.order)
        out = [zero(self.mode)] * len(self.coeffs)
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            e = exps[k]
            if e[j] == 0:
                continue
            ne = tuple(x - 1 if i == j else x for i, x in enumerate(e))
            out[idx[ne]] = out[idx[ne]] + e[j] * c
        return type(self)(self.order, self.mode, out)

    def truncated(self, new_order: int):
        """Copy with a different order: drop high terms or pad zeros."""
        exps_new = _exponents(self.nvars, new_order)
        idx_old = _index(self.nvars, self.order)
        out = []
        for e in exps_new:
            if sum(e) <= self.order:
                out.append(self.coeffs[idx_old[e]])
            else:
                out.append(zero(self.mode))
        return type(self)(new_order, self.mode, out)

    def evaluate(self, point):
        """Evaluate the jet polynomial at a chart point."""
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        pt = [coerce(p, self.mode) for p in point]
        # power tables per variable
        pows = []
        for p in pt:
            row = [coerce(1, self.mode)]
            for _ in range(self.order):
                row.append(row[-1] * p)
            pows.append(row)
        total = zero(self.mode)
        for e, c in self.terms():
            term = c
            for j, k in enumerate(e):
                if k:
                    term = term * pows[j][k]
            total = total + term
        return total


class Jet2(_Jet):
    """Bivariate jet over the surface chart ``(x, y)``."""

    nvars = 2
    varnames = ("x", "y")
    __slots__ = ()

    def compose(self, sub_x: "Jet2", sub_y: "Jet2") -> "Jet2":
        return substitute(self, (sub_x, sub_y))

    def shifted(self, center) -> "Jet2":
        """Recenter: coefficients of p(x + cx, y + cy), same order.

        Exact for the polynomial the table stores (a shift does not
        raise the degree).
        """
        cx, cy = (coerce(c, self.mode) for c in center)
        n = self.order
        # cached powers of the shift
        px = [coerce(1, self.mode)]
        py = [coerce(1, self.mode)]
        for _ in range(n):
            px.append(px[-1] * cx)
            py.append(py[-1] * cy)
        idx = _index(2, n)
        out = [zero(self.mode)] * len(self.coeffs)
        for (i, j), c in self.terms():
            for k in range(i + 1):
                cik = math.comb(i, k) * px[i - k]
                for l in range(j + 1):
                    w = c * cik * math.comb(j, l) * py[j - l]
                    out[idx[(k, l)]] = out[idx[(k, l)]] + w
        return Jet2(n, self.mode, out)

    def to_float(self) -> "Jet2":
        if self.mode == FLOAT:
            return self
        return Jet2(self.order, FLOAT, [float(c) for c in self.coeffs])


class Jet4(_Jet):
    """Quadrivariate jet over the point-pair chart ``(u1, v1, u2, v2)``."""

    nvars = 4
    varnames = ("u1", "v1", "u2", "v2")
    __slots__ = ()

    def graded_part(self, degree: int) -> "Jet4":
        """The homogeneous part of the given total degree."""
        exps = _exponents(4, self.order)
        out = [
            c if sum(exps[k]) == degree else zero(self.mode)
            for k, c in enumerate(self.coeffs)
        ]
        return Jet4(self.order, self.mode, out)


def substitute(p: _Jet, subs) -> _Jet:
    """Substitute jets for the variables of ``p``.

    The substitution jets must share one class, order and mode, and
    must have zero constant term (otherwise the truncation would lose
    low-order information).  ``p`` may come from a different chart.
    """
    subs = tuple(subs)
    if len(subs) != p.nvars:
        raise ValueError(f"{p.nvars} substitutions required")
    target = type(subs[0])
    for s in subs:
        if type(s) is not target:
            raise ModeMismatchError("substitution jets must share a chart")
        if s.order != subs[0].order:
            raise ValueError("substitution jets must share an order")
        join_modes(s.mode, subs[0].mode)
        if s.coeffs[0]:
            raise ValueError("substitution has a nonzero constant term")
    join_modes(p.mode, subs[0].mode)
    order = subs[0].order
    mode = subs[0].mode
    # lazy powers of each substitution
    pows = [[target.constant(1, order, mode), s] for s in subs]

    def get_pow(j, k):
        row = pows[j]
        while len(row) <= k:
            row.append(row[-1] * row[1])
        return row[k]

    acc = target.zero(order, mode)
    for e, c in p.terms():
        if sum(e) > order:
            continue  # cannot contribute below the truncation
        term = None
        for j, k in enumerate(e):
            if k:
                f = get_pow(j, k)
                term = f if term is None else term * f
        if term is None:
            term = target.constant(1, order, mode)
        acc = acc + term.scaled(c)
    return acc


# ---------------------------------------------------------------------------
# affine-in-X forms with jet coefficients


@dataclass(frozen=True)
class LinearFormJet:
    """``cx*x + cy*y + cz*z + c1`` with Jet4 coefficients.

    Linearity in ``X = (x, y, z)`` is structural: there simply is no
    slot for higher powers of the space variables.
    """

    cx: Jet4
    cy: Jet4
    cz: Jet4
    c1: Jet4

    def __post_init__(self):
        o, m = self.cx.order, self.cx.mode
        for part in (self.cy, self.cz, self.c1):
            if part.order != o:
                raise ValueError("component order mismatch")
            join_modes(part.mode, m)

    @property
    def order(self):
        return self.cx.order

    @property
    def mode(self):
        return self.cx.mode

    def __add__(self, other: "LinearFormJet") -> "LinearFormJet":
        return LinearFormJet(
            self.cx + other.cx, self.cy + other.cy,
            self.cz + other.cz, self.c1 + other.c1,
        )

    def __sub__(self, other: "LinearFormJet") -> "LinearFormJet":
        return LinearFormJet(
            self.cx - other.cx, self.cy - other.cy,
            self.cz - other.cz, self.c1 - other.c1,
        )

    def scaled(self, factor) -> "LinearFormJet":
        return LinearFormJet(
            self.cx.scaled(factor), self.cy.scaled(factor),
            self.cz.scaled(factor), self.c1.scaled(factor),
        )

    def partial(self, var: str) -> "LinearFormJet":
        return LinearFormJet(
            self.cx.partial(var), self.cy.partial(var),
            self.cz.partial(var), self.c1.partial(var),
        )

    def graded_part(self, degree: int) -> "LinearFormJet":
        return LinearFormJet(
            self.cx.graded_part(degree), self.cy.graded_part(degree),
            self.cz.graded_part(degree), self.c1.graded_part(degree),
        )

    def evaluate(self, point4):
        """Covector and constant of the affine function of X at a pair."""
        n = (
            self.cx.evaluate(point4),
            self.cy.evaluate(point4),
            self.cz.evaluate(point4),
        )
        return n, self.c1.evaluate(point4)

    def max_abs(self) -> float:
        return max(p.max_abs() for p in (self.cx, self.cy, self.cz, self.c1))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in (self.cx, self.cy, self.cz, self.c1))
