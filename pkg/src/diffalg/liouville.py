"""Liouville forms: the verifier and the tower-reduction engine.

A Liouville form D(v0) + sum c_i * phi(D v_i, v_i) certifies an integral
in finite terms.  The phi shapes are logarithmic derivatives and the six
elliptic integrands (three kinds on each curve model).  The engine can
verify a form against an integrand, and reduce it down a tower one
extension at a time.

Reduction rests on one identity: if theta is the top extension with
commuting derivation X, then D = BelowD + w*X on everything in sight,
where w is Dtheta/(X theta) reduced to the field below (for a primitive
w is the integrand, for an exponential D of the argument, and so on).
Every phi is linear in its first slot, so applying the decomposition to
the form splits it into a below-part plus w times the X-constant.  The
below-part is realized by rewriting each piece, the w-part by one
appended term whose shape depends on theta's kind.

Quadratic extensions reduce by averaging a form with its conjugate:
log arguments become norms, curve points add to their conjugates with
the Abel corrections supplying the rational and logarithmic remainders.
Every reduction self-checks by re-verifying the result and fails hard
rather than return a form whose derivative drifted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import (CurvePoint, LegendreCurve, ThirdKindParam,
                     WeierstrassCurve, abel_e_correction, abel_log_argument,
                     legendre_add, weierstrass_add, weierstrass_e_correction)
from .errors import (FieldMismatch, FNotBelow, IntegrandNotReducible,
                     InvalidDefiningData, NonConstantCoefficient, NotConstant,
                     PartNotBelow, SelfCheckFailed, UnsupportedHandle,
                     UnsupportedTermKind)
from .poly import MultiPoly
from .ratfunc import RatFunc
from .tower import (FULL_D, AlgebraicSqrt, BaseVar, CommutingX, ConstParam,
                    Element, EllipticFunction, EllIntegralTag, Exponential,
                    Generator, LambertW, LogTag, Primitive, Tower)


@dataclass(frozen=True)
class LogPhi:
    """phi(w, v) = w/v."""

    v: Element

    def validate(self, t: Tower) -> None:
        if self.v.is_zero():
            raise InvalidDefiningData("log argument is zero")


@dataclass(frozen=True)
class WPhi:
    """Weierstrass integrands on q^2 = v^3 - a v - b.

    kind 1: w/q; kind 2: v*w/q; kind 3: w/((v-c)q)."""

    kind: int
    v: Element
    q: Element
    a: Element
    b: Element
    c: Element | None = None

    def validate(self, t: Tower) -> None:
        if self.kind not in (1, 2, 3):
            raise InvalidDefiningData(f"W-kind {self.kind} out of range")
        for name in ("a", "b"):
            if not t.is_constant(getattr(self, name)):
                raise InvalidDefiningData(f"curve parameter {name} not constant")
        rel = self.q * self.q - (self.v ** 3 - self.a * self.v - self.b)
        if not rel.is_zero():
            raise InvalidDefiningData("q^2 = v^3 - a v - b fails")
        if self.kind == 3:
            if self.c is None:
                raise InvalidDefiningData("third kind needs a pole c")
            if not t.is_constant(self.c):
                raise InvalidDefiningData("pole c not constant")
        elif self.c is not None:
            raise InvalidDefiningData("pole c only belongs to the third kind")


@dataclass(frozen=True)
class LPhi:
    """Legendre integrands on y^2 = (1-v^2)(1-m v^2).

    kind 1: w/y; kind 2: (1-m v^2)w/y; kind 3: w/((1-v^2/a^2)y)."""

    kind: int
    v: Element
    y: Element
    m: Element
    prm: ThirdKindParam | None = None

    def validate(self, t: Tower) -> None:
        if self.kind not in (1, 2, 3):
            raise InvalidDefiningData(f"L-kind {self.kind} out of range")
        if not t.is_constant(self.m):
            raise InvalidDefiningData("modulus m not constant")
        rel = self.y * self.y - (1 - self.v ** 2) * (1 - self.m * self.v ** 2)
        if not rel.is_zero():
            raise InvalidDefiningData("y^2 = (1-v^2)(1-m v^2) fails")
        if self.kind == 3:
            if self.prm is None:
                raise InvalidDefiningData("third kind needs pole data")
            if not t.is_constant(self.prm.a):
                raise InvalidDefiningData("pole a not constant")
            self.prm.validate(self.m)
        elif self.prm is not None:
            raise InvalidDefiningData("pole data only belongs to the third kind")


PhiTerm = LogPhi | WPhi | LPhi


def _lift(t: Tower, e: Element) -> Element:
    if e.tower is t:
        return e
    if e.tower.is_prefix_of(t) or set(e.rf.gens()) <= set(t._by_gid):
        return t.wrap(e.rf)
    raise FieldMismatch("form part lives outside the tower")


def _lift_term(t: Tower, term: PhiTerm) -> PhiTerm:
    if isinstance(term, LogPhi):
        return LogPhi(_lift(t, term.v))
    if isinstance(term, WPhi):
        c = None if term.c is None else _lift(t, term.c)
        return WPhi(term.kind, _lift(t, term.v), _lift(t, term.q),
                    _lift(t, term.a), _lift(t, term.b), c)
    prm = term.prm
    if prm is not None:
        prm = ThirdKindParam(_lift(t, prm.a), _lift(t, prm.delta))
    return LPhi(term.kind, _lift(t, term.v), _lift(t, term.y),
                _lift(t, term.m), prm)


class LiouvilleForm:
    """v0 plus constant-coefficient phi terms over one tower."""

    __slots__ = ("tower", "v0", "terms")

    def __init__(self, v0: Element, terms=()):
        t = v0.tower
        self.tower = t
        self.v0 = v0
        checked = []
        for coeff, term in terms:
            coeff = _lift(t, coeff) if isinstance(coeff, Element) else t.lit(coeff)
            if not t.is_constant(coeff):
                raise NonConstantCoefficient(
                    f"term coefficient {coeff} is not a constant")
            term = _lift_term(t, term)
            term.validate(t)
            checked.append((coeff, term))
        self.terms = tuple(checked)

    def __repr__(self) -> str:
        bits = [f"v0 = {self.v0}"]
        for coeff, term in self.terms:
            bits.append(f"({coeff}) * {term}")
        return "LiouvilleForm(" + "; ".join(bits) + ")"


def phi_eval(t: Tower, term: PhiTerm, h) -> Element:
    """phi with the handle's derivative in the first slot: phi(hv, v)."""
    if isinstance(term, LogPhi):
        return t.derive(h, term.v) / term.v
    if isinstance(term, WPhi):
        w = t.derive(h, term.v)
        if term.kind == 1:
            return w / term.q
        if term.kind == 2:
            return term.v * w / term.q
        return w / ((term.v - term.c) * term.q)
    w = t.derive(h, term.v)
    if term.kind == 1:
        return w / term.y
    if term.kind == 2:
        return (1 - term.m * term.v ** 2) * w / term.y
    a = term.prm.a
    return w / ((1 - term.v ** 2 / (a * a)) * term.y)


def form_derivative(t: Tower, form: LiouvilleForm) -> Element:
    total = t.derive(FULL_D, form.v0)
    for coeff, term in form.terms:
        total = total + coeff * phi_eval(t, term, FULL_D)
    return total


def verify_liouville(t: Tower, f: Element, form: LiouvilleForm) -> bool:
    return (form_derivative(t, form) - _lift(t, f)).is_zero()


def x_constant(t: Tower, form: LiouvilleForm, k) -> Element:
    """c = X v0 + sum c_i phi(X v_i, v_i); raises unless constant."""
    handle = CommutingX(t.gen_of(k).gid)
    c = t.derive(handle, form.v0)
    for coeff, term in form.terms:
        c = c + coeff * phi_eval(t, term, handle)
    if not t.is_constant(c):
        raise NotConstant(f"X-image of the form is not constant: {c}")
    return c


def check_step1(t: Tower, term: PhiTerm, k) -> bool:
    """X phi(Dv, v) = D phi(Xv, v) for the commuting derivation at k."""
    handle = CommutingX(t.gen_of(k).gid)
    lhs = t.derive(handle, phi_eval(t, term, FULL_D))
    rhs = t.derive(FULL_D, phi_eval(t, term, handle))
    return (lhs - rhs).is_zero()


# --------------------------------------------------------------------------
# Reduction of the top transcendental extension.


def _reduction_target(t: Tower) -> Generator | None:
    """Topmost generator that reduction should consume, or None.

    Constant generators (parameters, constant square roots) are skipped;
    a companion square root routes to its elliptic function.  A base
    variable is the floor.
    """
    for gen in reversed(t.generators):
        if isinstance(gen.kind, ConstParam):
            continue
        if isinstance(gen.kind, BaseVar):
            return None
        if t.is_constant(t.element(gen.name)):
            continue
        if isinstance(gen.kind, AlgebraicSqrt) and gen.kind.companion_of is not None:
            return t.gen_of(gen.kind.companion_of)
        return gen
    return None


def _top_gids(t: Tower, gen: Generator) -> set:
    gids = {gen.gid}
    if isinstance(gen.kind, EllipticFunction):
        gids.add(gen.kind.companion)
    return gids


def _strip_monomial(p: MultiPoly, sgids: set) -> MultiPoly | None:
    """Factor out the common sgid-monomial; None if the rest still mixes."""
    mins: dict = {}
    first = True
    for m in p.terms:
        present = {g: e for g, e in m if g in sgids}
        if first:
            mins = present
            first = False
        else:
            mins = {g: min(e, present.get(g, 0)) for g, e in mins.items()
                    if present.get(g, 0)}
    out: dict = {}
    for m, c in p.terms.items():
        kept = []
        for g, e in m:
            if g in sgids:
                e -= mins.get(g, 0)
                if e < 0:
                    return None
                if e:
                    return None  # leftover top generator: not a pure factor
            if e:
                kept.append((g, e))
        out[tuple(kept)] = c
    return MultiPoly(out)


def _rewrite_v0(t: Tower, v0: Element, sgids: set) -> Element:
    """Keep the part of v0 with zero BelowD-loss: the monomial-free slice.

    Top-generator monomials with constant coefficients differentiate to
    zero under BelowD and are dropped; anything else cannot be realized
    below and is an error.
    """
    rf = v0.rf
    if rf.den.gens() & sgids:
        raise PartNotBelow("v0 denominator involves the top extension")
    below: dict = {}
    for m, c in rf.num.terms.items():
        if any(g in sgids for g, _ in m):
            continue
        below[m] = c
    dropped = rf.num - MultiPoly(below)
    if not dropped.is_zero():
        # Group the dropped slice by its top-monomials; each coefficient
        # over the common denominator must be a constant.
        groups: dict = {}
        for m, c in dropped.terms.items():
            topm = tuple((g, e) for g, e in m if g in sgids)
            rest = tuple((g, e) for g, e in m if g not in sgids)
            groups.setdefault(topm, {})[rest] = c
        for topm, coeffs in groups.items():
            piece = t.wrap(RatFunc.make(MultiPoly(coeffs), rf.den))
            if not t.is_constant(piece):
                raise PartNotBelow(
                    "v0 has a non-constant coefficient on the top extension")
    return t.wrap(RatFunc.make(MultiPoly(below), rf.den))


def _rewrite_log(t: Tower, v: Element, sgids: set) -> Element | None:
    """Realize phi(BelowD v, v) as a log term below; None drops the term."""
    rf = v.rf
    num = _strip_monomial(rf.num, sgids)
    den = _strip_monomial(rf.den, sgids)
    if num is None or den is None:
        raise PartNotBelow(
            "log argument is not a monomial in the top extension")
    w = t.wrap(RatFunc.make(num, den))
    if t.is_constant(w):
        return None
    return w


def _term_fields(term: PhiTerm):
    if isinstance(term, LogPhi):
        return (term.v,)
    if isinstance(term, WPhi):
        out = [term.v, term.q, term.a, term.b]
        if term.c is not None:
            out.append(term.c)
        return tuple(out)
    out = [term.v, term.y, term.m]
    if term.prm is not None:
        out.extend((term.prm.a, term.prm.delta))
    return tuple(out)


def _merge_terms(terms):
    """Combine repeated phi terms; drop zero coefficients."""
    order = []
    acc = {}
    for coeff, term in terms:
        if term in acc:
            acc[term] = acc[term] + coeff
        else:
            acc[term] = coeff
            order.append(term)
    return [(acc[term], term) for term in order if not acc[term].is_zero()]


def reduce_top(t: Tower, f: Element, form: LiouvilleForm):
    """Push the form below the top transcendental extension.

    Returns (tower, form) over the shrunken tower; the form's derivative
    is preserved exactly and re-verified before returning.
    """
    target = _reduction_target(t)
    if target is None or not isinstance(
            target.kind, (Primitive, Exponential, EllipticFunction, LambertW)):
        raise UnsupportedHandle("no reducible transcendental on top")
    sgids = _top_gids(t, target)
    if f.used_gids() & sgids:
        raise FNotBelow(f"integrand involves {t.name_of(target.gid)}")

    c = x_constant(t, form, target.gid)

    v0 = _rewrite_v0(t, form.v0, sgids)
    new_terms = []
    for coeff, term in form.terms:
        touched = any(e.used_gids() & sgids for e in _term_fields(term))
        if not touched:
            new_terms.append((coeff, term))
            continue
        if isinstance(term, LogPhi):
            w = _rewrite_log(t, term.v, sgids)
            if w is not None:
                new_terms.append((coeff, LogPhi(w)))
            continue
        raise PartNotBelow(
            "curve-term payload involves the top extension")

    # The c*w part, by the kind of the extension.
    kind = target.kind
    if not c.is_zero():
        if isinstance(kind, Primitive):
            tag = kind.tag
            if isinstance(tag, LogTag):
                new_terms.append((c, LogPhi(t.wrap(tag.h))))
            elif isinstance(tag, EllIntegralTag):
                cc = None if tag.c is None else t.wrap(tag.c)
                new_terms.append((c, WPhi(tag.kind, t.wrap(tag.p),
                                          t.wrap(tag.q), t.wrap(tag.a),
                                          t.wrap(tag.b), cc)))
            elif kind.antiderivative is not None:
                v0 = v0 + c * t.wrap(kind.antiderivative)
            else:
                raise IntegrandNotReducible(
                    f"no closed form recorded for D({t.name_of(target.gid)})")
        elif isinstance(kind, (Exponential, EllipticFunction)):
            v0 = v0 + c * t.wrap(kind.v)
        else:  # LambertW
            new_terms.append((c, LogPhi(t.wrap(kind.v))))

    new_t = t.drop_gens(sgids)
    moved = LiouvilleForm(new_t.wrap(v0.rf),
                          [(new_t.wrap(cf.rf), _lift_term(new_t, term))
                           for cf, term in _merge_terms(new_terms)])
    if not verify_liouville(new_t, new_t.wrap(f.rf), moved):
        raise SelfCheckFailed("reduced form derivative drifted")
    return new_t, moved


# --------------------------------------------------------------------------
# Reduction through a quadratic extension.


def log_canonical(e: Element) -> Element:
    """Normalize a log argument's sign; D log is insensitive to it."""
    if e.rf.num.is_zero():
        return e
    _, lc = e.rf.num.leading()
    return -e if lc < 0 else e


def _conj_point(t: Tower, s, v: Element, y: Element):
    return CurvePoint(v, y), CurvePoint(v.conj(s), y.conj(s))


def _cancels(p: CurvePoint, pc: CurvePoint) -> bool:
    return (pc.x - p.x).is_zero() and (pc.y + p.y).is_zero()


def reduce_algebraic(t: Tower, s, f: Element, form: LiouvilleForm) -> LiouvilleForm:
    """Push the form through the top quadratic extension by averaging
    with its conjugate: v0 to trace/2, logs to norms, curve terms to the
    conjugate-point sum with the Abel corrections."""
    gen = t._sqrt_gen(s)
    if gen.kind.companion_of is not None:
        raise UnsupportedHandle(
            "companion square roots reduce with their elliptic function")
    if gen.gid != max(g.gid for g in t.generators
                      if not isinstance(g.kind, ConstParam)
                      and not t.is_constant(t.element(g.name))):
        raise UnsupportedHandle("square root is not the top extension")
    if gen.gid in f.used_gids():
        raise FNotBelow(f"integrand involves {gen.name}")

    half = t.lit(Fraction(1, 2))
    v0 = t.trace(s, form.v0) * half
    new_terms = []

    for coeff, term in form.terms:
        touched = any(gen.gid in e.used_gids() for e in _term_fields(term))
        if not touched:
            new_terms.append((coeff, term))
            continue
        chalf = coeff * half
        if isinstance(term, LogPhi):
            new_terms.append((chalf, LogPhi(log_canonical(t.norm(s, term.v)))))
            continue
        if isinstance(term, WPhi):
            if term.kind == 3:
                raise UnsupportedTermKind(
                    "third-kind Weierstrass terms do not push through "
                    "a quadratic extension")
            p, pc = _conj_point(t, s, term.v, term.q)
            if _cancels(p, pc):
                continue
            curve = WeierstrassCurve(term.a, term.b)
            p3 = weierstrass_add(curve, p, pc)
            if p3.at_infinity:
                continue
            if term.kind == 2:
                v0 = v0 + chalf * weierstrass_e_correction(curve, p, pc)
            new_terms.append(
                (chalf, WPhi(term.kind, p3.x, p3.y, term.a, term.b)))
            continue
        # Legendre kinds
        p, pc = _conj_point(t, s, term.v, term.y)
        if _cancels(p, pc):
            continue
        curve = LegendreCurve(term.m)
        p3 = legendre_add(curve, p, pc)
        if term.kind == 2:
            v0 = v0 + chalf * abel_e_correction(curve, p, pc)
        elif term.kind == 3:
            prm = term.prm
            arg = abel_log_argument(curve, prm, p, pc, p3)
            lc = -coeff * prm.a / (4 * prm.delta)
            if not lc.is_zero():
                new_terms.append((lc, LogPhi(log_canonical(arg))))
        new_terms.append(
            (chalf, LPhi(term.kind, p3.x, p3.y, term.m, term.prm)))

    new_t = t.drop_gens({gen.gid})
    moved = LiouvilleForm(new_t.wrap(v0.rf),
                          [(new_t.wrap(cf.rf), _lift_term(new_t, term))
                           for cf, term in _merge_terms(new_terms)])
    if not verify_liouville(new_t, new_t.wrap(f.rf), moved):
        raise SelfCheckFailed("reduced form derivative drifted")
    return moved


# --------------------------------------------------------------------------
# Driver.


@dataclass(frozen=True)
class ReductionStep:
    tower: Tower
    form: LiouvilleForm


def reduce(t: Tower, f: Element, form: LiouvilleForm,
           max_steps: int | None = None) -> list[ReductionStep]:
    """Reduce from the top until the integrand's floor or the base.

    Returns the intermediate (tower, form) after each consumed extension;
    an empty list means nothing above f was reducible.
    """
    steps: list[ReductionStep] = []
    f = _lift(t, f)
    form = LiouvilleForm(_lift(t, form.v0),
                         [(c, term) for c, term in form.terms])
    while max_steps is None or len(steps) < max_steps:
        target = _reduction_target(t)
        if target is None:
            break
        if f.used_gids() & _top_gids(t, target):
            break  # the integrand lives here: reduction floor
        if isinstance(target.kind, AlgebraicSqrt):
            form = reduce_algebraic(t, target.gid, f, form)
            t = form.tower
        else:
            t, form = reduce_top(t, f, form)
        f = t.wrap(f.rf)
        steps.append(ReductionStep(t, form))
    return steps
