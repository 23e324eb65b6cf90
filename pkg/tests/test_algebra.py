import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tailorder as to
from tailorder.errors import ArityError, ParamError

L = to.ClassLabel


# ---------------------------------------------------------------------------
# label arithmetic
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("op,operands,a,expected", [
    (to.OpKind.SCALE_ADD, [L.m(-2.0), L.m(-1.0)], 1.0, L.m(-1.0)),
    (to.OpKind.SCALE_ADD, [L.m(-2.0), L.m(3.0)], 0.0, L.m(3.0)),
    (to.OpKind.SCALE_ADD, [L.m_inf(), L.m_inf()], 1.0, L.m_inf()),
    (to.OpKind.SCALE_ADD, [L.m_neg_inf(), L.m_neg_inf()], 2.0, L.m_neg_inf()),
    (to.OpKind.SCALE_ADD, [L.m_inf(), L.m(1.0)], 1.0, L.undecided()),
    (to.OpKind.RECIPROCAL, [L.m(-2.0)], None, L.m(2.0)),
    (to.OpKind.RECIPROCAL, [L.m_inf()], None, L.m_neg_inf()),
    (to.OpKind.RECIPROCAL, [L.oscillating(0.5, 1.0)], None, L.oscillating(-1.0, -0.5)),
    (to.OpKind.PRODUCT, [L.m(-2.0), L.m(3.0)], None, L.m(1.0)),
    (to.OpKind.PRODUCT, [L.m(0.0), L.m(-1.5)], None, L.m(-1.5)),
    (to.OpKind.PRODUCT, [L.m_inf(), L.m(5.0)], None, L.m_inf()),
    (to.OpKind.PRODUCT, [L.m_neg_inf(), L.m(5.0)], None, L.m_neg_inf()),
    (to.OpKind.PRODUCT, [L.m_inf(), L.m_neg_inf()], None, L.undecided()),
    (to.OpKind.CONVOLVE, [L.m(-3.0), L.m(-2.0)], None, L.m(-2.0)),
    (to.OpKind.CONVOLVE, [L.m(0.0), L.m(0.0)], None, L.m(1.0)),
    (to.OpKind.CONVOLVE, [L.m(-0.5), L.m(-0.5)], None, L.m(0.0)),
    (to.OpKind.CONVOLVE, [L.m(-3.0), L.m(2.0)], None, L.m(2.0)),
    (to.OpKind.CONVOLVE, [L.m(-1.0), L.m(-0.5)], None, L.undecided()),
    (to.OpKind.CONVOLVE, [L.m(-3.0), L.m(-0.5)], None, L.undecided()),
    (to.OpKind.CONVOLVE, [L.m_inf(), L.m(-0.5)], None, L.undecided()),
    (to.OpKind.CONVOLVE, [L.m_inf(), L.m(5.0)], None, L.m(5.0)),
    (to.OpKind.CONVOLVE, [L.m_inf(), L.m_inf()], None, L.m_inf()),
    (to.OpKind.CONVOLVE, [L.m_neg_inf(), L.m(1.0)], None, L.m_neg_inf()),
    (to.OpKind.COMPOSE, [L.m(-2.0), L.m(3.0)], None, L.m(-6.0)),
    (to.OpKind.COMPOSE, [L.m(-2.0), L.m(-3.0)], None, L.undecided()),
    (to.OpKind.COMPOSE, [L.m_inf(), L.m(2.0)], None, L.m_inf()),
    (to.OpKind.COMPOSE, [L.m_inf(), L.m_neg_inf()], None, L.m_inf()),
    (to.OpKind.COMPOSE, [L.oscillating(0.0, 1.0), L.m(2.0)], None, L.undecided()),
])
def test_predicted_class_table(op, operands, a, expected):
    assert to.predicted_class(op, operands, a) == expected


def test_predicted_class_arity():
    with pytest.raises(ArityError):
        to.predicted_class(to.OpKind.PRODUCT, [L.m(1.0)])
    with pytest.raises(ArityError):
        to.predicted_class(to.OpKind.RECIPROCAL, [L.m(1.0), L.m(1.0)])
    with pytest.raises(ParamError):
        to.predicted_class(to.OpKind.SCALE_ADD, [L.m(1.0), L.m(1.0)], a=-1.0)


@given(rho=st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_reciprocal_label_involution(rho):
    lab = L.m(rho)
    twice = to.predicted_class(to.OpKind.RECIPROCAL,
                               [to.predicted_class(to.OpKind.RECIPROCAL, [lab])])
    assert twice == lab


@given(a=st.floats(min_value=-5, max_value=5), b=st.floats(min_value=-5, max_value=5))
@settings(max_examples=100, deadline=None)
def test_product_label_commutes(a, b):
    l1 = to.predicted_class(to.OpKind.PRODUCT, [L.m(a), L.m(b)])
    l2 = to.predicted_class(to.OpKind.PRODUCT, [L.m(b), L.m(a)])
    assert l1 == l2
    l3 = to.predicted_class(to.OpKind.CONVOLVE, [L.m(a), L.m(b)])
    l4 = to.predicted_class(to.OpKind.CONVOLVE, [L.m(b), L.m(a)])
    assert l3 == l4


# ---------------------------------------------------------------------------
# constructed handles
# ---------------------------------------------------------------------------


def test_scale_add_values_and_label():
    u, v = to.make_power_tail(-2.0), to.make_power_tail(-1.0)
    h = to.scale_add(1.0, u, v)
    x = 50.0
    want = math.log(x ** -2 + x ** -1)
    assert to.eval_log(h, x) == pytest.approx(want, abs=1e-12)
    assert h.truth.label == L.m(-1.0)
    assert to.classify(h).rho == pytest.approx(-1.0, abs=0.05)


def test_scale_add_zero_weight_is_other_operand():
    u, v = to.make_power_tail(-2.0), to.make_power_tail(3.0)
    h = to.scale_add(0.0, u, v)
    assert h.truth.label == L.m(3.0)
    assert to.eval_log(h, 7.0) == to.eval_log(v, 7.0)


def test_scale_add_rapid_decay_closed():
    h = to.scale_add(1.0, to.make_exp_neg(), to.make_exp_neg())
    assert h.truth.label == L.m_inf()
    assert to.classify(h).tag == "MInf"


def test_reciprocal_handle():
    h = to.reciprocal(to.make_power_tail(-2.0))
    assert h.truth.label == L.m(2.0)
    assert to.eval_log(h, 10.0) == pytest.approx(2.0 * math.log(10.0), abs=1e-12)
    assert to.reciprocal(to.make_exp_neg()).truth.label == L.m_neg_inf()


def test_product_identity_and_inverse():
    u = to.make_power_tail(-2.0)
    ident = to.product(to.make_power_tail(0.0), u)
    assert ident.truth.label == L.m(-2.0)
    inv = to.product(u, to.reciprocal(u))
    assert to.classify(inv) == L.m(0.0)


def test_product_absorbs_into_rapid_class():
    h = to.product(to.make_exp_neg(), to.make_power_tail(5.0))
    assert h.truth.label == L.m_inf()
    assert to.classify(h).tag == "MInf"


def test_compose_orders_multiply():
    h = to.compose(to.make_power_tail(-2.0), to.make_power_tail(3.0))
    assert h.truth.label == L.m(-6.0)
    assert to.eval_log(h, 10.0) == pytest.approx(-6.0 * math.log(10.0), abs=1e-12)
    assert to.classify(h).rho == pytest.approx(-6.0, abs=0.05)


def test_compose_identity_inner():
    u = to.make_power_tail(-2.0)
    h = to.compose(u, to.make_power_tail(1.0))
    assert h.truth.label == L.m(-2.0)
    assert to.eval_log(h, 40.0) == to.eval_log(u, 40.0)


def test_compose_rapid_outer():
    h = to.compose(to.make_exp_neg(), to.make_power_tail(2.0))
    assert h.truth.label == L.m_inf()
    # e^{-x^2} without overflow at large x
    assert to.eval_log(h, 1e6) == pytest.approx(-1e12, rel=1e-12)


def test_compose_with_rapidly_growing_inner():
    # inner e^x feeds log-space argument to the outer power
    h = to.compose(to.make_power_tail(-2.0), to.make_exp_pos())
    assert to.eval_log(h, 800.0) == pytest.approx(-1600.0, rel=1e-12)


def test_convolve_closed_form():
    cfg = to.QuadratureConfig()
    h = to.convolve(to.make_exp_neg(), to.make_exp_neg(), cfg)
    for x in (2.0, 10.0, 50.0):
        want = math.log(x) - x
        assert to.eval_log(h, x) == pytest.approx(want, rel=1e-8)
    assert h.truth.label == L.m_inf()


def test_convolve_symmetric():
    u, v = to.make_power_tail(-3.0), to.make_power_tail(-2.0)
    c1, c2 = to.convolve(u, v), to.convolve(v, u)
    for x in (7.0, 123.0, 4567.0):
        a, b = to.eval_log(c1, x), to.eval_log(c2, x)
        assert abs(math.exp(a - b) - 1.0) <= 2e-8


@pytest.mark.parametrize("au,av,want", [
    (-3.0, -2.0, -2.0),   # lighter factor integrable, heavier order wins
    (-3.0, 2.0, 2.0),     # integrable against a growing factor
    (-0.5, -0.5, 0.0),    # both above the integrability line
])
def test_convolve_classifies_as_predicted(au, av, want):
    h = to.convolve(to.make_power_tail(au), to.make_power_tail(av))
    assert h.truth.label == L.m(want)
    grid = to.GridSpec(points=400, windows=8)
    got = to.classify(h, grid)
    assert got.tag == "M"
    assert got.rho == pytest.approx(want, abs=0.05)


def test_derived_labels_match_numerics_on_sample_pairs():
    cases = [
        to.scale_add(2.0, to.make_power_tail(-2.0), to.make_peter_paul()),
        to.product(to.make_peter_paul(), to.make_power_tail(3.0)),
        to.product(to.make_two_plus_sin(), to.make_power_tail(-1.0)),
        to.compose(to.make_power_tail(2.0), to.make_power_tail(2.0)),
    ]
    for h in cases:
        label = h.truth.label
        assert label.is_m
        got = to.classify(h)
        assert got.tag == "M" and got.rho == pytest.approx(label.rho, abs=0.05), h.name
