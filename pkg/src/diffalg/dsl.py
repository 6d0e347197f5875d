"""Text format for towers, expressions, and Liouville forms.

Tower documents are line-oriented:

    const m, a          # constant parameters
    var x = d/dx 1      # base variable with its derivative
    gen t = exp(1/x^2)  # extension generators by kind
    let u = x*t + 1     # named shorthand, usable in later lines

Extension kinds: int(g), log(h), exp(v), lambertw(v), sqrt(r),
ellfun(v, a, b) which also adds the companion NAME_q, and
ellint(k, p, q[, c]) for the three elliptic integral kinds.

Form documents declare v0 and phi terms:

    v0 = x^2
    term 1/2 * log((x-1)/(x+1))
    term m * l2(v, y, m)

Expressions use +, -, *, /, ^ with non-negative integer exponents.
Everything prints back through the canonical formatter, so parsing the
printed text reproduces the same tower, bindings, and form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import ThirdKindParam
from .errors import NameClash, ParseError
from .fmt import format_ratfunc
from .liouville import LiouvilleForm, LogPhi, LPhi, PhiTerm, WPhi
from .tower import (AlgebraicSqrt, BaseVar, ConstParam, Element,
                    EllipticFunction, EllIntegralTag, Exponential, LambertW,
                    LogTag, Primitive, Tower)

_KINDS = ("int", "log", "exp", "lambertw", "sqrt", "ellfun", "ellint")
_PHIKINDS = ("log", "w1", "w2", "w3", "l1", "l2", "l3")

_OPS = "+-*/^(),=;"


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, OP, NL, EOF
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            toks.append(Token("NL", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("NAME", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _OPS:
            toks.append(Token("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


class _Stream:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {tok.text!r}",
                             tok.line, tok.col)
        return self.next()

    def skip_newlines(self) -> None:
        while self.peek().kind == "NL":
            self.next()


# --------------------------------------------------------------------------
# Expressions: precedence climbing into Element arithmetic.

_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20}


def _parse_expr(ts: _Stream, env: dict, t: Tower,
                stop_before_phikind: bool = False) -> Element:
    return _parse_binary(ts, env, t, 0, stop_before_phikind)


def _parse_binary(ts: _Stream, env: dict, t: Tower, min_prec: int,
                  stop: bool) -> Element:
    left = _parse_unary(ts, env, t, stop)
    while True:
        tok = ts.peek()
        if tok.kind != "OP" or tok.text not in _BINARY:
            return left
        if (stop and tok.text == "*" and ts.peek(1).kind == "NAME"
                and ts.peek(1).text in _PHIKINDS
                and ts.peek(2).text == "("):
            return left  # the * belongs to "term coeff * phikind(...)"
        prec = _BINARY[tok.text]
        if prec < min_prec:
            return left
        ts.next()
        right = _parse_binary(ts, env, t, prec + 1, stop)
        try:
            if tok.text == "+":
                left = left + right
            elif tok.text == "-":
                left = left - right
            elif tok.text == "*":
                left = left * right
            else:
                left = left / right
        except ZeroDivisionError:
            raise ParseError("division by zero", tok.line, tok.col)


def _parse_unary(ts: _Stream, env: dict, t: Tower, stop: bool) -> Element:
    tok = ts.peek()
    if tok.kind == "OP" and tok.text == "-":
        ts.next()
        return -_parse_unary(ts, env, t, stop)
    return _parse_power(ts, env, t, stop)


def _parse_power(ts: _Stream, env: dict, t: Tower, stop: bool) -> Element:
    base = _parse_atom(ts, env, t, stop)
    tok = ts.peek()
    if tok.kind == "OP" and tok.text == "^":
        ts.next()
        e = ts.expect("INT")
        return base ** int(e.text)
    return base


def _parse_atom(ts: _Stream, env: dict, t: Tower, stop: bool) -> Element:
    tok = ts.next()
    if tok.kind == "INT":
        return t.lit(int(tok.text))
    if tok.kind == "NAME":
        if tok.text not in env:
            raise ParseError(f"unknown name {tok.text!r}", tok.line, tok.col)
        e = env[tok.text]
        return e if e.tower is t else t.wrap(e.rf)
    if tok.kind == "OP" and tok.text == "(":
        inner = _parse_binary(ts, env, t, 0, False)
        ts.expect("OP", ")")
        return inner
    raise ParseError(f"expected an expression, found {tok.text!r}",
                     tok.line, tok.col)


def parse_expr(text: str, t: Tower, bindings: dict | None = None) -> Element:
    """One expression over the tower's generators and extra bindings."""
    ts = _Stream(tokenize(text))
    ts.skip_newlines()
    env = _scope(t, bindings)
    e = _parse_expr(ts, env, t)
    ts.skip_newlines()
    tok = ts.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return e


def _scope(t: Tower, bindings: dict | None) -> dict:
    env = {g.name: t.element(g.name) for g in t.generators}
    if bindings:
        for k, v in bindings.items():
            env[k] = v
    return env


# --------------------------------------------------------------------------
# Tower documents.


@dataclass
class TowerDoc:
    tower: Tower
    bindings: dict  # let-name -> Element, insertion ordered


def parse_tower(text: str) -> TowerDoc:
    ts = _Stream(tokenize(text))
    t = Tower.base()
    bindings: dict = {}

    def env() -> dict:
        return _scope(t, bindings)

    while True:
        ts.skip_newlines()
        tok = ts.peek()
        if tok.kind == "EOF":
            break
        head = ts.expect("NAME")
        if head.text == "const":
            while True:
                name = ts.expect("NAME")
                t = t.const(name.text)
                if ts.peek().kind == "OP" and ts.peek().text == ",":
                    ts.next()
                    continue
                break
        elif head.text == "var":
            name = ts.expect("NAME")
            ts.expect("OP", "=")
            ts.expect("NAME", "d")
            ts.expect("OP", "/")
            ts.expect("NAME", "dx")
            deriv = _parse_expr(ts, env(), t)
            t = t.var(name.text, deriv.rf)
        elif head.text == "gen":
            name = ts.expect("NAME")
            ts.expect("OP", "=")
            t = _parse_gen(ts, t, env(), name)
        elif head.text == "let":
            name = ts.expect("NAME")
            if name.text in bindings or any(
                    g.name == name.text for g in t.generators):
                raise NameClash(f"name {name.text!r} already bound")
            ts.expect("OP", "=")
            bindings[name.text] = _parse_expr(ts, env(), t)
        else:
            raise ParseError(f"unknown declaration {head.text!r}",
                             head.line, head.col)
        nxt = ts.peek()
        if nxt.kind not in ("NL", "EOF") and nxt.text != ";":
            raise ParseError(f"trailing input {nxt.text!r}", nxt.line, nxt.col)
        if nxt.text == ";":
            ts.next()

    # Re-anchor earlier bindings on the final tower.
    bindings = {k: v if v.tower is t else t.wrap(v.rf)
                for k, v in bindings.items()}
    return TowerDoc(t, bindings)


def _parse_gen(ts: _Stream, t: Tower, env: dict, name: Token) -> Tower:
    kind = ts.expect("NAME")
    if kind.text not in _KINDS:
        raise ParseError(f"unknown extension kind {kind.text!r}",
                         kind.line, kind.col)
    ts.expect("OP", "(")
    if kind.text == "ellint":
        k = ts.expect("INT")
        ts.expect("OP", ",")
        args = [_parse_expr(ts, env, t)]
        while ts.peek().text == ",":
            ts.next()
            args.append(_parse_expr(ts, env, t))
        ts.expect("OP", ")")
        if len(args) == 2:
            return t.ellint(name.text, int(k.text), args[0], args[1])
        if len(args) == 3:
            return t.ellint(name.text, int(k.text), args[0], args[1], args[2])
        raise ParseError("ellint takes kind, p, q and optionally c",
                         kind.line, kind.col)
    args = [_parse_expr(ts, env, t)]
    while ts.peek().text == ",":
        ts.next()
        args.append(_parse_expr(ts, env, t))
    ts.expect("OP", ")")
    single = {"int": t.primitive, "log": t.log_ext, "exp": t.exp_ext,
              "lambertw": t.lambertw, "sqrt": t.sqrt_ext}
    if kind.text in single:
        if len(args) != 1:
            raise ParseError(f"{kind.text} takes one argument",
                             kind.line, kind.col)
        return single[kind.text](name.text, args[0])
    if len(args) != 3:
        raise ParseError("ellfun takes v, a, b", kind.line, kind.col)
    return t.elliptic(name.text, args[0], args[1], args[2])


# --------------------------------------------------------------------------
# Printing.  Declarations are reconstructed from the defining data, so
# the output re-parses to an equal tower.


def _fmt(t: Tower, rf) -> str:
    return format_ratfunc(rf, t.name_of)


def print_tower(doc: TowerDoc) -> str:
    t = doc.tower
    lines = []
    for g in t.generators:
        k = g.kind
        if isinstance(k, ConstParam):
            lines.append(f"const {g.name}")
        elif isinstance(k, BaseVar):
            lines.append(f"var {g.name} = d/dx {_fmt(t, k.deriv)}")
        elif isinstance(k, Primitive):
            if isinstance(k.tag, LogTag):
                lines.append(f"gen {g.name} = log({_fmt(t, k.tag.h)})")
            elif isinstance(k.tag, EllIntegralTag):
                tag = k.tag
                args = [str(tag.kind), _fmt(t, tag.p), _fmt(t, tag.q)]
                if tag.c is not None:
                    args.append(_fmt(t, tag.c))
                lines.append(f"gen {g.name} = ellint({', '.join(args)})")
            else:
                lines.append(f"gen {g.name} = int({_fmt(t, k.integrand)})")
        elif isinstance(k, Exponential):
            lines.append(f"gen {g.name} = exp({_fmt(t, k.v)})")
        elif isinstance(k, LambertW):
            lines.append(f"gen {g.name} = lambertw({_fmt(t, k.v)})")
        elif isinstance(k, EllipticFunction):
            lines.append(f"gen {g.name} = ellfun({_fmt(t, k.v)}, "
                         f"{_fmt(t, k.a)}, {_fmt(t, k.b)})")
        elif isinstance(k, AlgebraicSqrt):
            if k.companion_of is None:
                lines.append(f"gen {g.name} = sqrt({_fmt(t, k.radicand)})")
            # companions are implied by their ellfun line
    for name, e in doc.bindings.items():
        lines.append(f"let {name} = {_fmt(t, e.rf)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Form documents.


def parse_form(text: str, t: Tower, bindings: dict | None = None) -> LiouvilleForm:
    ts = _Stream(tokenize(text))
    env = _scope(t, bindings)
    ts.skip_newlines()
    head = ts.expect("NAME")
    if head.text != "v0":
        raise ParseError("form must start with 'v0 ='", head.line, head.col)
    ts.expect("OP", "=")
    v0 = _parse_expr(ts, env, t)
    terms = []
    while True:
        while ts.peek().kind == "NL" or ts.peek().text == ";":
            ts.next()
        tok = ts.peek()
        if tok.kind == "EOF":
            break
        ts.expect("NAME", "term")
        coeff = _parse_expr(ts, env, t, stop_before_phikind=True)
        ts.expect("OP", "*")
        terms.append((coeff, _parse_phikind(ts, env, t)))
    return LiouvilleForm(v0, terms)


def _parse_phikind(ts: _Stream, env: dict, t: Tower) -> PhiTerm:
    kind = ts.expect("NAME")
    if kind.text not in _PHIKINDS:
        raise ParseError(f"unknown term kind {kind.text!r}",
                         kind.line, kind.col)
    ts.expect("OP", "(")
    args = [_parse_expr(ts, env, t)]
    while ts.peek().text == ",":
        ts.next()
        args.append(_parse_expr(ts, env, t))
    ts.expect("OP", ")")

    def need(n: int, what: str):
        if len(args) != n:
            raise ParseError(f"{kind.text} takes {what}",
                             kind.line, kind.col)

    if kind.text == "log":
        need(1, "one argument")
        return LogPhi(args[0])
    if kind.text in ("w1", "w2"):
        need(4, "v, q, a, b")
        return WPhi(int(kind.text[1]), *args)
    if kind.text == "w3":
        need(5, "v, q, a, b, c")
        return WPhi(3, *args)
    if kind.text in ("l1", "l2"):
        need(3, "v, y, m")
        return LPhi(int(kind.text[1]), *args)
    need(5, "v, y, m, a, delta")
    return LPhi(3, args[0], args[1], args[2],
                ThirdKindParam(args[3], args[4]))


def print_form(form: LiouvilleForm) -> str:
    t = form.tower
    lines = [f"v0 = {_fmt(t, form.v0.rf)}"]
    for coeff, term in form.terms:
        lines.append(f"term {_fmt(t, coeff.rf)} * {_print_phikind(t, term)}")
    return "\n".join(lines) + "\n"


def _print_phikind(t: Tower, term: PhiTerm) -> str:
    f = lambda e: _fmt(t, e.rf)
    if isinstance(term, LogPhi):
        return f"log({f(term.v)})"
    if isinstance(term, WPhi):
        args = [f(term.v), f(term.q), f(term.a), f(term.b)]
        if term.kind == 3:
            args.append(f(term.c))
        return f"w{term.kind}({', '.join(args)})"
    args = [f(term.v), f(term.y), f(term.m)]
    if term.kind == 3:
        args.extend((f(term.prm.a), f(term.prm.delta)))
    return f"l{term.kind}({', '.join(args)})"
