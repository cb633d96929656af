import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ufinsler.dsl import Binary, Num, Unary, Var, evaluate, parse_metric, to_text
from ufinsler.errors import DomainError, ParseError
from ufinsler.jets import jet_seed
from ufinsler.metrics import DomainGuard, catalog, eval_phi, from_expression, lookup, resolve_metric


def one(v):
    return Num(float(v), True)


def test_square_of_sum():
    assert parse_metric("(1+s)^2") == Binary("pow", Binary("add", one(1), Var("s")), one(2))


def test_precedence_of_power_over_subtraction():
    assert parse_metric("4 - s^2") == Binary("sub", one(4), Binary("pow", Var("s"), one(2)))


def test_unary_minus_binds_looser_than_power():
    assert parse_metric("-s^2") == Unary("neg", Binary("pow", Var("s"), one(2)))
    assert parse_metric("2^-1") == Binary("pow", one(2), Unary("neg", one(1)))


def test_power_is_right_associative():
    assert parse_metric("t^2^3") == Binary("pow", Var("t"), Binary("pow", one(2), one(3)))


def test_left_associative_chains():
    assert parse_metric("t-s-1") == Binary("sub", Binary("sub", Var("t"), Var("s")), one(1))
    assert parse_metric("t/s/2") == Binary("div", Binary("div", Var("t"), Var("s")), one(2))


def test_literals_and_functions():
    node = parse_metric("exp(s - t) * 2.5e-1 + sqrt(log(1 + t))")
    assert node.left.right == Num(0.25, False)
    assert node.right == Unary("sqrt", Unary("log", Binary("add", one(1), Var("t"))))


def test_berwald_example_round_trips():
    text = "(1-t+s)^2/(1-t)^3"
    node = parse_metric(text)
    assert parse_metric(to_text(node)) == node
    assert to_text(node) == "(1 - t + s)^2 / (1 - t)^3"


@pytest.mark.parametrize("text, offset, expected", [
    ("(1+", 3, "t"),
    ("1 + * s", 4, "number"),
    ("(t", 2, ")"),
    ("t s", 2, "end of input"),
    ("tan(t)", 0, "sqrt"),
    ("t # s", 2, "("),
])
def test_parse_errors_locate_the_problem(text, offset, expected):
    with pytest.raises(ParseError) as info:
        parse_metric(text)
    assert info.value.offset == offset
    assert expected in info.value.expected


def test_parse_error_offset_counts_bytes():
    with pytest.raises(ParseError) as info:
        parse_metric("t + é")
    assert info.value.offset == 4
    with pytest.raises(ParseError) as info:
        parse_metric("(é) + ")
    assert info.value.offset == 1


# -- printer round trip -------------------------------------------------------
leaves = st.one_of(
    st.sampled_from([Var("t"), Var("s")]),
    st.integers(0, 50).map(lambda k: Num(float(k), True)),
    st.floats(0, 1e3, allow_nan=False, allow_infinity=False).map(lambda x: Num(x, False)),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["neg", "exp", "log", "sqrt"]), children).map(lambda a: Unary(*a)),
        st.tuples(st.sampled_from(["add", "sub", "mul", "div", "pow"]), children, children).map(lambda a: Binary(*a)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_print_parse_is_a_fixed_point(tree):
    text = to_text(tree)
    again = parse_metric(text)
    assert again == tree
    assert to_text(again) == text


# -- evaluation ---------------------------------------------------------------
def _phi(text, t, s):
    return evaluate(parse_metric(text), jet_seed("t", t, s), jet_seed("s", t, s))


def test_integer_literal_exponent_allows_negative_base():
    assert _phi("(1-t)^3", 2.0, 0.0).value == -1.0


def test_fractional_literal_exponent_needs_positive_base():
    assert _phi("t^0.5", 4.0, 0.0).value == pytest.approx(2.0)
    with pytest.raises(DomainError):
        _phi("(1-t)^0.5", 2.0, 0.0)


def test_negated_integer_exponent():
    j = _phi("t^-2", 2.0, 0.0)
    assert (j.value, j.dt) == pytest.approx((0.25, -0.25))


# -- metric definitions ---------------------------------------------------------
def test_euclidean_jet():
    assert eval_phi(lookup("euclidean"), 0.7, 0.3).as_tuple() == (1, 0, 0, 0, 0, 0)


def test_convex_ball_jet():
    assert eval_phi(lookup("convex_ball"), 0.5, 0.25).as_tuple() == pytest.approx((1.5625, 0, 2.5, 0, 0, 2))


def test_wrona_jet():
    assert eval_phi(lookup("wrona"), 1.0, 0.0).as_tuple() == pytest.approx((1, -1, 1, 2, -2, 2))


def test_wrona_guard_blocks_singular_set():
    w = lookup("wrona")
    assert "t - s > delta" in w.guard.describe()
    with pytest.raises(DomainError):
        eval_phi(w, 1.0, 1.0)
    with pytest.raises(DomainError):
        eval_phi(w, 1.0, 1.0 - 1e-10)


def test_catalog_guards():
    guards = {m.name: m.guard for m in catalog()}
    assert guards["euclidean"].unrestricted and guards["hermitian"].unrestricted
    assert guards["convex_ball"].t_below == 1.0 and guards["bergman"].t_below == 1.0
    assert guards["berwald_neg"].t_below == 1.0
    assert guards["nonconvex_ball"].t_below == pytest.approx(math.sqrt(3))
    assert guards["flat_exp"].unrestricted and guards["flat_quad"].unrestricted
    assert guards["berwald_pos"].unrestricted
    assert guards["wrona"].gap_above == pytest.approx(1e-9)


def test_catalog_notes():
    assert "unbounded" in lookup("bergman").normalization_note
    assert lookup("euclidean").normalization_note.startswith("normalized")
    assert "4" in lookup("nonconvex_ball").normalization_note


def test_lookup_unknown():
    with pytest.raises(KeyError):
        lookup("nope")


def test_range_check():
    with pytest.raises(DomainError):
        eval_phi(lookup("euclidean"), 0.5, 0.7)
    with pytest.raises(DomainError):
        eval_phi(lookup("euclidean"), 0.5, -0.1)


def test_non_positive_phi_raises():
    m = from_expression("1 - t")
    with pytest.raises(DomainError):
        eval_phi(m, 2.0, 0.5)


def test_resolve_prefers_catalog():
    assert resolve_metric("wrona").name == "wrona"
    assert resolve_metric("(1+s)^2").name == "convex_ball"
    custom = resolve_metric("(1+s)^3")
    assert custom.guard.unrestricted and custom.text == "(1+s)^3"


def test_scaled_metric():
    m = lookup("nonconvex_ball").scaled(0.25)
    assert eval_phi(m, 1.0, 0.0).value == pytest.approx(1.0)
    assert m.guard == lookup("nonconvex_ball").guard


def test_guard_is_vectorized():
    g = DomainGuard(t_below=1.0, gap_above=0.1)
    assert list(g.admits(np.array([0.5, 0.5, 1.5]), np.array([0.1, 0.45, 0.0]))) == [True, False, False]


@pytest.mark.parametrize("metric", catalog(), ids=lambda m: m.name)
@settings(max_examples=40, deadline=None)
@given(a=st.floats(0, 1), b=st.floats(0, 1))
def test_phi_positive_inside_guard(metric, a, b):
    t = a * metric.sample_t_max
    s = b * t
    if not metric.guard.admits(t, s):
        return
    assert eval_phi(metric, t, s).value > 0
