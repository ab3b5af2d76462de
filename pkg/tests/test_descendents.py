import random
from fractions import Fraction
from math import factorial

import pytest

from quiver_virasoro.descendents import (
    DescPoly,
    T_class,
    apply_framed_L,
    apply_L,
    apply_Lwt0,
    apply_R,
    apply_S,
    context,
    enumerate_monomials,
    framed_T_class,
    parse_poly,
    poly_to_str,
    tau,
    zeta,
)
from quiver_virasoro.quivers import INFINITY, frame_at_infinity, framify, preset


# ---------------------------------------------------------------------------
# polynomial algebra and text form

def test_tau_rejects_index_zero():
    with pytest.raises(ValueError):
        tau(0, "1")


def test_poly_arithmetic_and_degree():
    p = (tau(1, "1") + 2) ** 2
    assert p == tau(1, "1") * tau(1, "1") + 4 * tau(1, "1") + 4
    assert p.degree() == 2
    assert p.homogeneous_component(1) == 4 * tau(1, "1")
    assert p.homogeneous_component(0) == DescPoly.const(4)
    assert DescPoly.zero().degree() == -1
    assert (p - p).is_zero()


def test_parse_print_round_trip():
    rng = random.Random(5)
    vertices = ("1", "2")
    for p in enumerate_monomials(vertices, 5):
        scaled = Fraction(rng.randint(-7, 7), rng.randint(1, 5)) * p
        text = poly_to_str(scaled)
        assert parse_poly(text) == scaled
    combo = parse_poly("3/2*t[1,1]^2*t[2,2] - t[4,1] + 5")
    assert poly_to_str(combo) == "3/2*t[1,1]^2*t[2,2] - t[4,1] + 5"
    assert parse_poly(poly_to_str(combo)) == combo


def test_parse_rejects_garbage():
    for bad in ("t[0,1]", "t[1]", "t[1,1]^", "qq", "t[1,1]**2"):
        with pytest.raises(ValueError):
            parse_poly(bad)


# ---------------------------------------------------------------------------
# contexts

def test_context_validation():
    q = preset("A_2")
    ctx = context(q, (2, 1))
    assert ctx.dim_of("1") == 2
    with pytest.raises(ValueError):
        context(q, (1,))  # wrong length
    with pytest.raises(ValueError):
        context(q, (-1, 1))  # negative dimension
    with pytest.raises(ValueError):
        context(framify(q), (1, 1, 1, 1), framing=(1, 1))  # framing on frozen


# ---------------------------------------------------------------------------
# R, T, L operators

def test_apply_R_weights():
    ctx = context(preset("A_1"), (3,))
    # R_k(tau_i) = (prod_{j=0..k} (i+j)) tau_{i+k}
    assert apply_R(2, tau(1, "1"), ctx) == 1 * 2 * 3 * tau(3, "1")
    assert apply_R(0, tau(2, "1"), ctx) == 2 * tau(2, "1")
    # k = -1 has an empty product, and tau_0 evaluates to the dimension
    assert apply_R(-1, tau(1, "1"), ctx) == DescPoly.const(3)
    assert apply_R(-1, tau(2, "1"), ctx) == tau(1, "1")
    # Leibniz rule on products
    p = tau(1, "1") * tau(2, "1")
    lhs = apply_R(1, p, ctx)
    rhs = apply_R(1, tau(1, "1"), ctx) * tau(2, "1") + tau(1, "1") * apply_R(
        1, tau(2, "1"), ctx
    )
    assert lhs == rhs


def test_T_class_values_unframed():
    ctx = context(preset("A_1"), (1,))
    assert T_class(-1, ctx).is_zero()
    assert T_class(0, ctx) == DescPoly.const(1)  # 0!0! * td * d * d
    assert T_class(1, ctx) == 2 * tau(1, "1")  # (0!1! + 1!0!) tau_1 * d


def test_T_class_values_infinity_context():
    # the projective-line context: one vertex framed by a 2-dimensional space
    inf = frame_at_infinity(preset("A_1"), (2,))
    ctx = context(inf, (1, 1))
    assert T_class(0, ctx).is_zero()
    assert T_class(1, ctx) == -2 * tau(1, INFINITY)


def test_unframed_commutators_small_grid():
    q = preset("A_2")
    ctx = context(q, (1, 1))
    for p in enumerate_monomials(q.vertices, 3):
        for n in range(-1, 3):
            for m in range(n, 3):
                lhs = apply_L(n, apply_L(m, p, ctx), ctx) - apply_L(
                    m, apply_L(n, p, ctx), ctx
                )
                rhs = (
                    (m - n) * apply_L(n + m, p, ctx)
                    if n + m >= -1
                    else DescPoly.zero()
                )
                assert lhs == rhs, (n, m, poly_to_str(p))


def test_S_operator():
    ctx = context(preset("A_1"), (2,))
    # S_k^v = -((k+1)!/d_v) R_{-1}(tau_{k+1}(v) * -)
    p = tau(1, "1")
    expected = Fraction(-factorial(1), 2) * apply_R(-1, tau(1, "1") * p, ctx)
    assert apply_S(0, "1", p, ctx) == expected
    ctx0 = context(preset("A_1"), (0,))
    with pytest.raises(ValueError):
        apply_S(0, "1", p, ctx0)


def test_S_errors_on_unknown_vertex():
    ctx = context(preset("A_1"), (1,))
    with pytest.raises(ValueError):
        apply_S(0, "2", tau(1, "1"), ctx)


# ---------------------------------------------------------------------------
# weight-zero combination

def test_Lwt0_frozen_values_on_projective_line():
    inf = frame_at_infinity(preset("A_1"), (2,))
    ctx = context(inf, (1, 1))
    assert apply_Lwt0(parse_poly("t[1,1]"), ctx) == DescPoly.const(-1)
    assert apply_Lwt0(parse_poly("t[2,1]"), ctx) == tau(1, INFINITY)


def test_Lwt0_reduces_to_minus_L_minus_one_on_R_kernel():
    # When R_{-1} p = 0 the defining series truncates after its first term,
    # so L_wt0 p = -L_{-1} p exactly.
    inf = frame_at_infinity(preset("A_1"), (2,))
    ctx = context(inf, (1, 1))
    for p in (
        tau(1, "1") - tau(1, INFINITY),
        (tau(1, "1") - tau(1, INFINITY)) ** 2,
        2 * tau(2, "1") - tau(1, "1") ** 2,
    ):
        assert apply_R(-1, p, ctx).is_zero(), poly_to_str(p)
        assert apply_Lwt0(p, ctx) == -1 * apply_L(-1, p, ctx), poly_to_str(p)


def test_zeta_kills_infinity_descendents():
    p = tau(1, INFINITY) * tau(1, "1") + 3 * tau(2, "1") - tau(2, INFINITY)
    assert zeta(p) == 3 * tau(2, "1")
    assert zeta(DescPoly.const(5)) == DescPoly.const(5)


# ---------------------------------------------------------------------------
# framed operators

def test_framed_T_class_conventions():
    ctx = context(preset("A_1"), (1,), framing=(2,))
    # T^fr_0 = T_0 - tau_0(framing): 1 - 2 = -1 under no-delta
    assert framed_T_class(0, ctx) == DescPoly.const(-1)
    assert framed_T_class(0, ctx, convention="paper-delta") == DescPoly.const(0)
    assert framed_T_class(-1, ctx).is_zero()
    with pytest.raises(ValueError):
        framed_T_class(0, ctx, convention="bogus")


def test_framed_matches_collapsed_infinity_class():
    # framed T-class == zeta of the infinity-quiver T-class, minus the k=0 unit
    for dims, framing in (((1,), (2,)), ((2,), (3,))):
        q = preset("A_1")
        ctx = context(q, dims, framing=framing)
        inf = frame_at_infinity(q, framing)
        inf_ctx = context(inf, (1,) + dims)
        for k in range(0, 4):
            collapsed = zeta(T_class(k, inf_ctx))
            if k == 0:
                collapsed = collapsed - 1
            assert framed_T_class(k, ctx) == collapsed, (dims, framing, k)


def test_framed_commutators_close_for_nonnegative_modes():
    ctx = context(preset("A_1"), (1,), framing=(3,))
    for p in enumerate_monomials(("1",), 4):
        for n in range(0, 4):
            for m in range(n, 4):
                lhs = apply_framed_L(
                    n, apply_framed_L(m, p, ctx), ctx
                ) - apply_framed_L(m, apply_framed_L(n, p, ctx), ctx)
                rhs = (m - n) * apply_framed_L(n + m, p, ctx)
                assert lhs == rhs, (n, m, poly_to_str(p))


def test_framed_minus_one_commutator_has_framing_tail():
    # [L^fr_{-1}, L^fr_m] = (m+1) L^fr_{m-1} + (m-1)! tau_{m-1}(framing) * -
    # so the naive Virasoro relation genuinely fails at n = -1.
    from quiver_virasoro.descendents import _tau_of_framing

    ctx = context(preset("A_1"), (2,), framing=(3,))
    for m in (1, 2, 3):
        for p in (DescPoly.const(1), tau(1, "1"), tau(2, "1") * tau(1, "1")):
            lhs = apply_framed_L(
                -1, apply_framed_L(m, p, ctx), ctx
            ) - apply_framed_L(m, apply_framed_L(-1, p, ctx), ctx)
            with_tail = (m + 1) * apply_framed_L(m - 1, p, ctx) + factorial(
                m - 1
            ) * (_tau_of_framing(m - 1, ctx) * p)
            assert lhs == with_tail, (m, poly_to_str(p))
    # explicit counterexample to the naive relation
    one = DescPoly.const(1)
    ctx1 = context(preset("A_1"), (1,), framing=(3,))
    naive = 2 * apply_framed_L(0, one, ctx1)
    actual = apply_framed_L(-1, apply_framed_L(1, one, ctx1), ctx1) - apply_framed_L(
        1, apply_framed_L(-1, one, ctx1), ctx1
    )
    assert actual != naive
    assert actual == DescPoly.const(-1)
    assert naive == DescPoly.const(-4)


# ---------------------------------------------------------------------------
# monomial enumeration

def test_enumerate_monomials_counts_and_bounds():
    monos = list(enumerate_monomials(("1",), 4))
    # partitions of 0..4: 1 + 1 + 2 + 3 + 5
    assert len(monos) == 12
    assert all(m.degree() <= 4 for m in monos)
    monos = list(enumerate_monomials(("1", "2"), 3, min_degree=1))
    assert all(1 <= m.degree() <= 3 for m in monos)
    assert len(set(poly_to_str(m) for m in monos)) == len(monos)
