"""The rewrite engine against a brute-force oracle.

The oracle enumerates every single-step rewrite at every position and
chases all reducts to their normal forms; the engine must agree with the
unique normal form the oracle finds."""

import pytest

from silkcheck import corpus_path, load_theory
from silkcheck.parser import parse_formula, parse_term, parse_theory
from silkcheck.rewrite import (
    EquationalTheory,
    FuelExhausted,
    RewriteRule,
    StuckTerm,
    equivalent,
    eval_numeric,
    match,
    normalize,
    validate_theory,
)
from silkcheck.syntax import (
    Atom,
    Fn,
    FreeVar,
    NumFn,
    Or,
    Param,
    Substitution,
    Succ,
    ZERO,
    Zero,
    numeral,
    numeral_value,
    rebuild,
    subst,
)


def t(text):
    return parse_term(text)


@pytest.fixture(scope="module")
def shat():
    return load_theory(corpus_path("theory_shat.thy"))


@pytest.fixture(scope="module")
def fhat():
    return load_theory(corpus_path("theory_fhat.thy"))


@pytest.fixture(scope="module")
def exp():
    return load_theory(corpus_path("theory_exp.thy"))


@pytest.fixture(scope="module")
def bigjunct():
    return load_theory(corpus_path("theory_bigjunct.thy"))


# --- the independent oracle


def _all_nodes_rewrites(node, theory):
    """Every one-step reduct of node, trying every rule at every position."""
    out = []
    if isinstance(node, NumFn) and node.sym == "+":
        a, b = node.args
        if isinstance(a, Zero):
            out.append(b)
        if isinstance(a, Succ):
            out.append(Succ(NumFn("+", (a.prev, b))))
        if isinstance(b, Zero):
            out.append(a)
        if isinstance(b, Succ):
            out.append(Succ(NumFn("+", (a, b.prev))))
    for rule in theory.rules:
        binding = {}
        if match(rule.lhs, node, binding):
            sub_params = {k[1]: v for k, v in binding.items() if k[0] == "p"}
            sub_vars = {k[1]: v for k, v in binding.items() if k[0] == "v"}
            out.append(subst(rule.rhs, Substitution(sub_params, sub_vars)))
    kids = node.kids()
    for i, k in enumerate(kids):
        for red in _all_nodes_rewrites(k, theory):
            new = list(kids)
            new[i] = red
            out.append(rebuild(node, tuple(new)))
    return out


def oracle_normal_forms(expr, theory, limit=4000):
    """All normal forms reachable by exhaustive rewriting."""
    seen = set()
    normals = set()
    frontier = [expr]
    steps = 0
    while frontier:
        steps += 1
        assert steps < limit, "oracle exploded"
        e = frontier.pop()
        if e in seen:
            continue
        seen.add(e)
        reducts = _all_nodes_rewrites(e, theory)
        if not reducts:
            normals.add(e)
        else:
            frontier.extend(reducts)
    return normals


def assert_agrees_with_oracle(expr, theory):
    normals = oracle_normal_forms(expr, theory)
    assert len(normals) == 1, f"not confluent on {expr}: {normals}"
    assert normalize(expr, theory).value == normals.pop()


# --- validation


def test_iterated_junction_theory_is_valid(bigjunct):
    assert validate_theory(bigjunct).ok


def test_all_corpus_theories_valid():
    for name in ("theory_shat.thy", "theory_fhat.thy", "theory_exp.thy", "theory_wedge.thy"):
        assert validate_theory(load_theory(corpus_path(name))).ok, name


def test_defined_symbol_inside_pattern_rejected():
    x = FreeVar("x")
    theory = EquationalTheory((
        RewriteRule(Fn("fd", (Fn("gd", (x,)),)), x),
        RewriteRule(Fn("gd", (x,)), x),
    ))
    report = validate_theory(theory)
    assert not report.ok
    assert any("gd" in str(i) for i in report.issues)


def test_unbound_rhs_variable_rejected():
    theory = EquationalTheory((RewriteRule(Fn("fd", (FreeVar("x"),)), Fn("g", (FreeVar("y"),))),))
    report = validate_theory(theory)
    assert not report.ok and "y" in str(report.issues[0])


def test_duplicate_lhs_rejected():
    r = RewriteRule(Fn("fd", (FreeVar("x"),)), FreeVar("x"))
    report = validate_theory(EquationalTheory((r, r)))
    assert any("duplicate" in str(i) for i in report.issues)


def test_numeric_plus_is_reserved():
    theory = EquationalTheory((RewriteRule(NumFn("+", (Param("a"), Param("b"))), Param("a")),))
    assert any("built in" in str(i) for i in validate_theory(theory).issues)


def test_bare_variable_lhs_rejected():
    theory = EquationalTheory((RewriteRule(FreeVar("x"), FreeVar("x")),))
    assert not validate_theory(theory).ok


# --- normalization against the oracle


def test_normalize_shat_of_one(shat):
    assert_agrees_with_oracle(t("S^1"), shat)
    assert normalize(t("S^1"), shat).value == t("f(0)")


def test_normalize_fhat_twice(fhat):
    assert_agrees_with_oracle(t("f^2(0)"), fhat)
    assert normalize(t("f^2(0)"), fhat).value == t("f(f(0))")


def test_normalize_no_redex(shat):
    p = parse_formula("P(0)")
    assert normalize(p, shat).value == p


def test_normalize_example_sequent_terms(shat):
    for text in ["alpha + S^1", "alpha + S^(0 + 1)", "alpha + f(S^0)"]:
        assert_agrees_with_oracle(t(text), shat)
        assert normalize(t(text), shat).value == t("f(alpha + 0)")


def test_normalize_idempotent_on_samples(shat, exp):
    for theory, text in [
        (shat, "alpha + S^(s(n))"),
        (exp, "f^(2^2)(0)"),
        (exp, "2^(s(s(0)))"),
    ]:
        once = normalize(t(text), theory).value
        assert normalize(once, theory).value == once


def test_steps_used_counts_rewrites(fhat):
    fresh = parse_theory(corpus_path("theory_fhat.thy").read_text())
    res = normalize(t("f^2(0)"), fresh)
    assert res.steps_used == 3


# --- equivalence


def test_equivalent_example_rewrite(shat):
    assert equivalent(t("alpha + S^(s(n))"), t("alpha + f(S^n)"), shat)


def test_equivalent_reflexive(shat):
    e = t("alpha + S^n")
    assert equivalent(e, e, shat)


def test_equivalent_symmetric(shat):
    a, b = t("alpha + S^(s(n))"), t("alpha + f(S^n)")
    assert equivalent(a, b, shat) == equivalent(b, a, shat)


def test_equivalent_exponential_base(exp):
    assert equivalent(t("f^(2^0)(x)"), t("f(x)"), exp)


def test_not_equivalent(shat):
    assert not equivalent(t("S^1"), t("S^0"), shat)


# --- numeric evaluation


def test_eval_numeric_builtin_addition():
    assert eval_numeric(t("1 + 1"), EquationalTheory(())) == numeral(2)


def test_eval_numeric_exponent(exp):
    # Oracle: plain arithmetic, 2**1 == 2 and 2**5 == 32.
    assert numeral_value(eval_numeric(t("2^1"), exp)) == 2
    assert numeral_value(eval_numeric(t("2^(s(s(s(s(s(0))))))"), exp)) == 32


def test_eval_numeric_zero(exp):
    assert eval_numeric(ZERO, exp) == ZERO


def test_eval_numeric_requires_ground(exp):
    with pytest.raises(ValueError):
        eval_numeric(t("2^n"), exp)


def test_eval_numeric_stuck(exp):
    with pytest.raises(StuckTerm):
        eval_numeric(NumFn("3^", (ZERO,)), exp)


def test_fuel_exhaustion():
    loop = EquationalTheory((RewriteRule(Fn("w", (FreeVar("x"),)), Fn("w", (FreeVar("x"),))),))
    with pytest.raises(FuelExhausted):
        normalize(Fn("w", (FreeVar("c"),)), loop, fuel=25)


# --- iterated disjunction structure


def test_iterated_disjunction_shape(bigjunct):
    for k in range(17):
        nf = normalize(Atom("Or^", (numeral(k),)), bigjunct).value
        atoms = 0
        stack = [nf]
        while stack:
            node = stack.pop()
            if isinstance(node, Or):
                assert isinstance(node.rhs, Atom), "each joint hangs one atom"
                stack.extend([node.lhs, node.rhs])
            else:
                assert isinstance(node, Atom)
                atoms += 1
        assert atoms == k + 1


def test_iterated_conjunction_matches_oracle(bigjunct):
    assert_agrees_with_oracle(Atom("And^", (numeral(3),)), bigjunct)


def test_equivalent_transitive_on_normalizing_inputs(shat):
    a, b, c = t("alpha + S^(s(n))"), t("alpha + f(S^n)"), t("f(alpha + S^n)")
    assert equivalent(a, b, shat) and equivalent(b, c, shat) and equivalent(a, c, shat)


def test_linear_iteration_theory_has_two_rules(fhat):
    assert len(fhat.rules) == 2 and validate_theory(fhat).ok
