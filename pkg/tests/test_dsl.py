"""Tower and form documents: parsing, printing, round trips."""

import random
from fractions import Fraction

import pytest

from diffalg.dsl import (TowerDoc, parse_expr, parse_form, parse_tower,
                         print_form, print_tower, tokenize)
from diffalg.errors import NameClash, ParseError, ZeroDenominator
from diffalg.fmt import format_ratfunc
from diffalg.liouville import (LiouvilleForm, LogPhi, LPhi, WPhi,
                               form_derivative, verify_liouville)
from diffalg.tower import FULL_D, Tower

X_ONLY = "var x = d/dx 1\n"


# -- tokens ----------------------------------------------------------------


def test_tokenize_positions():
    toks = tokenize("var x = d/dx 1\ngen t = exp(x)")
    assert [k.kind for k in toks[:3]] == ["NAME", "NAME", "OP"]
    assert toks[0].line == 1 and toks[0].col == 1
    gen = next(k for k in toks if k.text == "gen")
    assert gen.line == 2 and gen.col == 1


def test_tokenize_comments_and_blank_lines():
    toks = tokenize("# heading\n\nconst m  # trailing note\n")
    names = [k.text for k in toks if k.kind == "NAME"]
    assert names == ["const", "m"]


def test_tokenize_rejects_stray_characters():
    with pytest.raises(ParseError) as e:
        tokenize("var x = d/dx 1 @")
    assert e.value.line == 1 and e.value.column == 16


# -- expressions -------------------------------------------------------------


def expr_tower():
    t = Tower.base().const("m").var("x")
    return t


@pytest.mark.parametrize("text,value", [
    ("2 + 3 * 4", 14),
    ("(2 + 3) * 4", 20),
    ("2 - 3 - 4", -5),
    ("12 / 3 / 2", 2),
    ("-2^2", -4),
    ("1/2 + 1/3", Fraction(5, 6)),
])
def test_expr_constant_folding(text, value):
    t = expr_tower()
    got = parse_expr(text, t)
    assert (got - t.lit(value)).is_zero()


def test_expr_precedence_with_vars():
    t = expr_tower()
    x, m = t["x"], t["m"]
    assert (parse_expr("2*x^2", t) - 2 * x ** 2).is_zero()
    assert (parse_expr("(2*x)^2", t) - 4 * x ** 2).is_zero()
    assert (parse_expr("-x^2", t) + x ** 2).is_zero()
    assert (parse_expr("m*x - x/m", t) - (m * x - x / m)).is_zero()


def test_expr_bindings_scope():
    t = expr_tower()
    u = t["x"] ** 2 + 1
    got = parse_expr("u^2 - u", t, {"u": u})
    assert (got - (u ** 2 - u)).is_zero()


def test_expr_unknown_name_location():
    t = expr_tower()
    with pytest.raises(ParseError) as e:
        parse_expr("x + foo", t)
    assert "foo" in e.value.message
    assert e.value.column == 5


def test_expr_negative_exponent_rejected():
    t = expr_tower()
    with pytest.raises(ParseError):
        parse_expr("x^-2", t)


def test_expr_unbalanced_paren():
    t = expr_tower()
    with pytest.raises(ParseError):
        parse_expr("(x + 1", t)


# -- tower documents ----------------------------------------------------------


def test_parse_tower_exponential_example():
    doc = parse_tower(X_ONLY + "gen t = exp(1/x^2)")
    t = doc.tower
    x, th = t["x"], t["t"]
    want = (-2 / x ** 3) * th
    assert (t.derive(FULL_D, th) - want).is_zero()


def test_parse_tower_const_list_and_sqrt():
    doc = parse_tower("const m, a\nvar x = d/dx 1\ngen s = sqrt((x-1)/(x+1))")
    t = doc.tower
    assert [g.name for g in t.generators] == ["m", "a", "x", "s"]
    s, x = t["s"], t["x"]
    assert (s * s - (x - 1) / (x + 1)).is_zero()


def test_parse_tower_log_and_let():
    doc = parse_tower(X_ONLY + "gen th = log(x)\nlet u = th^2 + x")
    t = doc.tower
    assert (t.derive(FULL_D, t["th"]) - 1 / t["x"]).is_zero()
    u = doc.bindings["u"]
    assert u.tower is t
    assert (u - (t["th"] ** 2 + t["x"])).is_zero()


def test_parse_tower_elliptic_pair():
    doc = parse_tower("const a, b\n" + X_ONLY + "gen p = ellfun(x, a, b)")
    t = doc.tower
    assert [g.name for g in t.generators] == ["a", "b", "x", "p", "p_q"]
    p, q, a, b = t["p"], t["p_q"], t["a"], t["b"]
    assert (q * q - (p ** 3 - a * p - b)).is_zero()


def test_parse_tower_ellint_with_pole():
    text = ("const a, b, c\n" + X_ONLY +
            "gen p = ellfun(x, a, b)\ngen P = ellint(3, p, p_q, c)")
    doc = parse_tower(text)
    t = doc.tower
    dP = t.derive(FULL_D, t["P"])
    # D p = p_q, so the third-kind integrand collapses to 1/(p - c)
    want = 1 / (t["p"] - t["c"])
    assert (dP - want).is_zero()


def test_parse_tower_var_with_custom_deriv():
    # the derivative expression may only use earlier generators
    doc = parse_tower("const m\nvar x = d/dx m + 2")
    t = doc.tower
    assert (t.derive(FULL_D, t["x"]) - (t["m"] + 2)).is_zero()
    with pytest.raises(ParseError):
        parse_tower("var x = d/dx x^2 + 1")


def test_parse_tower_semicolons():
    doc = parse_tower("const m; var x = d/dx 1; gen t = exp(x)")
    assert [g.name for g in doc.tower.generators] == ["m", "x", "t"]


def test_parse_tower_unknown_keyword():
    with pytest.raises(ParseError) as e:
        parse_tower(X_ONLY + "flub y = exp(x)")
    assert e.value.line == 2


def test_parse_tower_trailing_junk():
    with pytest.raises(ParseError) as e:
        parse_tower("var x = d/dx 1 1")
    assert "trailing" in e.value.message


def test_parse_tower_duplicate_let():
    with pytest.raises(NameClash):
        parse_tower(X_ONLY + "let u = x\nlet u = x + 1")
    with pytest.raises(NameClash):
        parse_tower(X_ONLY + "let x = x + 1")


def test_parse_tower_unknown_extension_kind():
    with pytest.raises(ParseError) as e:
        parse_tower(X_ONLY + "gen t = cosh(x)")
    assert "cosh" in e.value.message


TOWER_CORPUS = [
    X_ONLY.rstrip(),
    X_ONLY + "gen t = exp(1/x^2)",
    X_ONLY + "gen th = log(x)\nlet u = th + 1",
    "const m, a\nvar x = d/dx 1\ngen s = sqrt((x-1)/(x+1))",
    "const a, b\nvar x = d/dx 1\ngen p = ellfun(x, a, b)",
    ("const a, b, c\nvar x = d/dx 1\ngen p = ellfun(x, a, b)\n"
     "gen P = ellint(3, p, p_q, c)"),
    ("const a, b\nvar x = d/dx 1\ngen p = ellfun(x, a, b)\n"
     "gen E = ellint(2, p, p_q)"),
    X_ONLY + "gen w = lambertw(x)\ngen s = sqrt(w + x)",
    X_ONLY + "gen f = int(x^2 + 1)",
    "const m\nvar x = d/dx m + 2\ngen th = log(x)",
]


def same_tower(t1: Tower, t2: Tower) -> bool:
    if [g.name for g in t1.generators] != [g.name for g in t2.generators]:
        return False
    for g1, g2 in zip(t1.generators, t2.generators):
        if g1.gid != g2.gid or type(g1.kind) is not type(g2.kind):
            return False
    for g in t1.generators:
        d1 = t1.derive(FULL_D, t1[g.name])
        d2 = t2.derive(FULL_D, t2[g.name])
        if d1.rf != d2.rf:
            return False
    return True


@pytest.mark.parametrize("text", TOWER_CORPUS)
def test_tower_round_trip(text):
    doc = parse_tower(text)
    printed = print_tower(doc)
    doc2 = parse_tower(printed)
    assert same_tower(doc.tower, doc2.tower)
    assert print_tower(doc2) == printed  # printing reached a fixpoint
    assert set(doc.bindings) == set(doc2.bindings)
    for name in doc.bindings:
        assert doc.bindings[name].rf == doc2.bindings[name].rf


# -- form documents -----------------------------------------------------------


def test_parse_form_v0_only():
    doc = parse_tower(X_ONLY + "gen t = exp(1/x^2)")
    form = parse_form("v0 = x*t", doc.tower)
    assert not form.terms
    assert (form.v0 - doc.tower["x"] * doc.tower["t"]).is_zero()


def test_parse_form_log_term():
    doc = parse_tower(X_ONLY)
    form = parse_form("v0 = 0\nterm 1 * log(x)", doc.tower)
    (coeff, term), = form.terms
    assert isinstance(term, LogPhi)
    assert verify_liouville(doc.tower, 1 / doc.tower["x"], form)


def test_parse_form_half_log():
    doc = parse_tower(X_ONLY)
    form = parse_form("v0 = 0; term 1/2 * log((x-1)/(x+1))", doc.tower)
    (coeff, term), = form.terms
    assert (coeff - Fraction(1, 2)).is_zero()
    f = 1 / (doc.tower["x"] ** 2 - 1)
    assert verify_liouville(doc.tower, f, form)


def test_parse_form_coefficient_lookahead():
    # the coefficient expression must stop before `* log(...)`
    doc = parse_tower("const m\n" + X_ONLY)
    form = parse_form("v0 = 0\nterm 2*m * log(x)", doc.tower)
    (coeff, term), = form.terms
    assert (coeff - 2 * doc.tower["m"]).is_zero()


def test_parse_form_curve_terms():
    text = ("const a, b, c\nvar x = d/dx 1\ngen p = ellfun(x, a, b)")
    doc = parse_tower(text)
    src = ("v0 = x\n"
           "term 1 * w1(p, p_q, a, b)\n"
           "term 1/3 * w3(p, p_q, a, b, c)")
    form = parse_form(src, doc.tower)
    assert [type(term) for _, term in form.terms] == [WPhi, WPhi]
    assert form.terms[0][1].kind == 1
    assert form.terms[1][1].kind == 3
    assert (form.terms[1][1].c - doc.tower["c"]).is_zero()


def test_parse_form_legendre_terms():
    text = ("const m\nvar x = d/dx 1\n"
            "gen y = sqrt((1-x^2)*(1-m*x^2))")
    doc = parse_tower(text)
    src = "v0 = 0\nterm 1 * l1(x, y, m)\nterm 2 * l2(x, y, m)"
    form = parse_form(src, doc.tower)
    kinds = [term.kind for _, term in form.terms]
    assert kinds == [1, 2]


def test_parse_form_with_bindings():
    doc = parse_tower(X_ONLY + "let u = x^2 + 1")
    form = parse_form("v0 = u\nterm 1 * log(u)", doc.tower, doc.bindings)
    assert (form.v0 - (doc.tower["x"] ** 2 + 1)).is_zero()


def test_parse_form_must_start_with_v0():
    doc = parse_tower(X_ONLY)
    with pytest.raises(ParseError):
        parse_form("term 1 * log(x)", doc.tower)


def test_parse_form_unknown_kind_and_arity():
    doc = parse_tower(X_ONLY)
    with pytest.raises(ParseError):
        parse_form("v0 = 0\nterm 1 * atan(x)", doc.tower)
    with pytest.raises(ParseError):
        parse_form("v0 = 0\nterm 1 * log(x, x)", doc.tower)


FORM_CORPUS = [
    ("const m\n" + X_ONLY + "gen th = log(x)",
     "v0 = x^2/2 + th\nterm 1 * log(x+1)\nterm m * log(x-1)"),
    (X_ONLY + "gen t = exp(1/x^2)", "v0 = x*t"),
    ("const a, b, c\nvar x = d/dx 1\ngen p = ellfun(x, a, b)",
     "v0 = p\nterm 1 * w1(p, p_q, a, b)\nterm 1/2 * w2(p, p_q, a, b)\n"
     "term 1/3 * w3(p, p_q, a, b, c)"),
    ("const m\nvar x = d/dx 1\ngen y = sqrt((1-x^2)*(1-m*x^2))",
     "v0 = 0\nterm 1 * l1(x, y, m)\nterm 1/5 * l2(x, y, m)"),
]


@pytest.mark.parametrize("tower_text,form_text", FORM_CORPUS)
def test_form_round_trip(tower_text, form_text):
    doc = parse_tower(tower_text)
    form = parse_form(form_text, doc.tower, doc.bindings)
    printed = print_form(form)
    form2 = parse_form(printed, doc.tower, doc.bindings)
    assert print_form(form2) == printed
    diff = form_derivative(doc.tower, form) - form_derivative(doc.tower, form2)
    assert diff.is_zero()


def test_l3_form_round_trip():
    text = ("const m, pa\nvar x = d/dx 1\n"
            "gen y = sqrt((1-x^2)*(1-m*x^2))\n"
            "gen delta = sqrt((1-pa^2)*(1-m*pa^2))")
    doc = parse_tower(text)
    src = "v0 = 0\nterm 1 * l3(x, y, m, pa, delta)"
    form = parse_form(src, doc.tower)
    (_, term), = form.terms
    assert isinstance(term, LPhi) and term.kind == 3
    printed = print_form(form)
    form2 = parse_form(printed, doc.tower)
    assert print_form(form2) == printed


def random_expr(rng: random.Random, names: list, depth: int) -> str:
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return rng.choice(names)
        return str(rng.randint(1, 9))
    op = rng.choice("+-*/^")
    if op == "^":
        return f"({random_expr(rng, names, depth - 1)})^{rng.randint(0, 3)}"
    a = random_expr(rng, names, depth - 1)
    b = random_expr(rng, names, depth - 1)
    return f"({a} {op} {b})"


def test_random_expr_round_trips():
    rng = random.Random(20240817)
    t = Tower.base().const("m").var("x")
    t = t.log_ext("th", t["x"])
    names = ["m", "x", "th"]
    done = 0
    while done < 40:
        text = random_expr(rng, names, 3)
        try:
            e = parse_expr(text, t)
        except (ZeroDivisionError, ZeroDenominator):
            continue
        printed = format_ratfunc(e.rf, t.name_of)
        again = parse_expr(printed, t)
        assert (e - again).is_zero(), text
        done += 1
