"""Reduced rational functions and normal forms modulo square-root relations.

A RatFunc is a pair of polynomials with gcd 1 and a monic denominator.
A RelationSet records quadratic relations g^2 = r for algebraic
generators; normal_form rewrites an element so that every such g appears
with exponent at most one in the numerator and not at all in the
denominator (conjugate rationalization).  Under the declared-nonsquare
convention this representative is unique, so equality and zero tests are
plain structural comparisons.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ZeroDenominator
from .poly import MultiPoly, poly_divexact, poly_gcd


class RatFunc:
    """num/den, gcd-reduced, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly):
        # Trusted constructor; use make() for raw input.
        self.num = num
        self.den = den

    @staticmethod
    def make(num: MultiPoly, den: MultiPoly) -> "RatFunc":
        return ratfunc_normalize(num, den)

    @staticmethod
    def from_poly(p: MultiPoly) -> "RatFunc":
        return RatFunc(p, MultiPoly.one())

    @staticmethod
    def const(q) -> "RatFunc":
        return RatFunc(MultiPoly.const(q), MultiPoly.one())

    @staticmethod
    def var(gid: int) -> "RatFunc":
        return RatFunc(MultiPoly.var(gid), MultiPoly.one())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def gens(self) -> set:
        return self.num.gens() | self.den.gens()

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return ratfunc_normalize(self.num * other.den + other.num * self.den,
                                 self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return ratfunc_normalize(self.num * other.den - other.num * self.den,
                                 self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return ratfunc_normalize(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        return ratfunc_normalize(self.num * other.den, self.den * other.num)

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return ratfunc_normalize(self.den ** (-k), self.num ** (-k))
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RatFunc)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}, {self.den!r})"


def ratfunc_normalize(num: MultiPoly, den: MultiPoly) -> RatFunc:
    """Canonical reduced form; rejects zero denominators."""
    if den.is_zero():
        raise ZeroDenominator("denominator reduced to zero")
    if num.is_zero():
        return RatFunc(MultiPoly.zero(), MultiPoly.one())
    if not den.is_const():
        g = poly_gcd(num, den)
        if not g.is_const():
            num = poly_divexact(num, g)
            den = poly_divexact(den, g)
    _, lc = den.leading()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return RatFunc(num, den)


class RelationSet:
    """Quadratic relations g^2 = r, keyed by generator-id.

    Radicands must be normal forms over the strictly earlier part of the
    tower, so rewriting a later generator can only surface earlier ones.
    """

    __slots__ = ("radicands",)

    def __init__(self, radicands: dict | None = None):
        self.radicands = dict(radicands) if radicands else {}

    def with_relation(self, gid: int, radicand: RatFunc) -> "RelationSet":
        out = dict(self.radicands)
        out[gid] = radicand
        return RelationSet(out)

    def without(self, gids) -> "RelationSet":
        return RelationSet({g: r for g, r in self.radicands.items()
                            if g not in gids})

    def __contains__(self, gid: int) -> bool:
        return gid in self.radicands

    def __getitem__(self, gid: int) -> RatFunc:
        return self.radicands[gid]

    def sqrt_gids(self):
        return sorted(self.radicands)


def _reduce_poly(p: MultiPoly, rels: RelationSet):
    """Rewrite g^2 -> r until every relation generator has exponent <= 1.

    Returns (num, den) since radicands may carry denominators.
    """
    num = p
    den = MultiPoly.one()
    for gid in sorted(rels.radicands, reverse=True):
        if num.deg_in(gid) < 2:
            continue
        r = rels[gid]
        groups = num.split_powers(gid)
        acc_num = MultiPoly.zero()
        acc_den = MultiPoly.one()
        # Sum of a_k * r^(k//2) * g^(k%2) over a common denominator.
        maxpow = max(k // 2 for k in groups)
        rnum_pows = [MultiPoly.one()]
        for _ in range(maxpow):
            rnum_pows.append(rnum_pows[-1] * r.num)
        rden_pows = [MultiPoly.one()]
        for _ in range(maxpow):
            rden_pows.append(rden_pows[-1] * r.den)
        for k, coeff in groups.items():
            h, parity = divmod(k, 2)
            piece = coeff * rnum_pows[h] * rden_pows[maxpow - h]
            if parity:
                piece = piece * MultiPoly.var(gid)
            acc_num = acc_num + piece
        acc_den = rden_pows[maxpow]
        num = acc_num
        den = den * acc_den
    return num, den


def reduce_powers(num: MultiPoly, den: MultiPoly, rels: RelationSet):
    """Power-reduce numerator and denominator; returns a raw (num, den)."""
    n1, d1 = _reduce_poly(num, rels)
    n2, d2 = _reduce_poly(den, rels)
    return n1 * d2, n2 * d1


def is_zero_mod(num: MultiPoly, den: MultiPoly, rels: RelationSet) -> bool:
    """Zero test of num/den in the field, without rationalizing."""
    if den.is_zero():
        raise ZeroDenominator("denominator reduced to zero")
    n, d = reduce_powers(num, MultiPoly.one(), rels)
    if d.is_zero():
        raise ZeroDenominator("radicand denominator vanished")
    return n.is_zero()


def normal_form(num: MultiPoly, den: MultiPoly, rels: RelationSet) -> RatFunc:
    """Unique representative: numerator multilinear in relation
    generators, denominator free of them, then gcd-reduced and monic."""
    if den.is_zero():
        raise ZeroDenominator("denominator reduced to zero")
    num, den = reduce_powers(num, den, rels)
    if den.is_zero():
        raise ZeroDenominator("denominator is zero modulo the relations")
    if num.is_zero():
        return RatFunc(MultiPoly.zero(), MultiPoly.one())
    # Rationalize: clear each relation generator out of the denominator,
    # latest first so squares surfacing in earlier ones get picked up.
    for gid in sorted(rels.radicands, reverse=True):
        if den.deg_in(gid) == 0:
            continue
        conj = den.conj_gen(gid)
        num = num * conj
        den = den * conj
        num, dn = _reduce_poly(num, rels)
        den, dd = _reduce_poly(den, rels)
        num = num * dd
        den = den * dn
        if den.is_zero():
            raise ZeroDenominator(
                "denominator is a zero divisor modulo the relations")
    return ratfunc_normalize(num, den)
