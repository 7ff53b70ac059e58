"""Operator calculus: d, delta, Lie/covariant derivatives, decomposition."""

from itertools import combinations

import pytest

from excal import sexpr
from excal.alt import AltValue, VecAltValue, interior, trace, wedge
from excal.catalog import builtin
from excal.compare import max_abs, within
from excal.errors import NotADerivation
from excal.geometry import sample_points
from excal.jets import Jet, jet_diff
from excal.operators import (
    Operator,
    codiff,
    curvature_shuffle,
    d_nabla,
    endo_apply,
    endo_compose,
    ext_d,
    fn_decompose,
    graded_comm,
    lie_metric,
    lie_vec,
    nabla_vec,
    nijenhuis,
    op_d,
    op_delta,
    op_eps,
    sharp_field,
    value_of,
)
from excal.verifier import random_form, random_vec_form

E3 = builtin("euclidean(3)").geometry


def ctx_at(G, order=3, seed=17):
    p = sample_points(G, 1, seed)[0]
    return G.context(p, order)


def jet_field(ctx, srcs):
    """Vector field with jet components from expression strings."""
    G = ctx.geometry
    comps = [sexpr.eval_jet(G.parse_expr(s), ctx.p, ctx.order) for s in srcs]
    return VecAltValue.from_vector(comps)


def test_exterior_derivative_basic():
    ctx = ctx_at(E3)
    # d(x1 dx2) = dx1 ^ dx2
    x1 = sexpr.eval_jet(E3.parse_expr("x1"), ctx.p, ctx.order)
    w = AltValue(3, 1, {(1,): x1})
    dw = value_of(ext_d(ctx, w))
    assert dw.get((0, 1)) == pytest.approx(1.0)
    assert dw.get((0, 2)) == 0.0
    # top degree: d of a 3-form is canonical zero of degree 4
    top = random_form(E3, 3, 5).at(ctx)
    assert ext_d(ctx, top).k == 4


def test_d_squared_zero_pointwise():
    ctx = ctx_at(E3)
    for k in range(0, 3):
        w = random_form(E3, k, 21).at(ctx)
        assert max_abs(value_of(ext_d(ctx, ext_d(ctx, w)))) < 1e-12


def test_classical_lie_derivative_oracle():
    # L_X w against the coordinate formula
    # (L_X w)_I = X^a d_a w_I + sum_s (d_{I_s} X^a) w_{I|s->a}
    ctx = ctx_at(E3)
    X = jet_field(ctx, ["x2*x3", "x1 - x3*x3", "x1*x2 + x2"])
    for k in (1, 2):
        w = random_form(E3, k, 31).at(ctx)
        got = value_of(lie_vec(ctx, X, w))
        comps = X.as_vector()
        for I in combinations(range(3), k):
            acc = 0.0
            wI = w.coeffs.get(I, None)
            for a in range(3):
                if wI is not None:
                    acc += comps[a].value * jet_diff(wI, a).value
            for s in range(k):
                for a in range(3):
                    key = tuple(sorted(I[:s] + (a,) + I[s + 1 :]))
                    if len(set(I[:s] + (a,) + I[s + 1 :])) < k:
                        continue
                    # sign from re-sorting the substituted index
                    seq = I[:s] + (a,) + I[s + 1 :]
                    inv = sum(
                        1
                        for u in range(k)
                        for v in range(u + 1, k)
                        if seq[u] > seq[v]
                    )
                    sign = -1.0 if inv % 2 else 1.0
                    c = w.coeffs.get(key)
                    if c is None:
                        continue
                    acc += sign * jet_diff(comps[a], I[s]).value * c.value
            assert got.get(I) == pytest.approx(acc, abs=1e-11)


def test_lie_of_identity_is_d():
    ctx = ctx_at(E3)
    Id = VecAltValue.identity(3)
    for k in range(0, 3):
        w = random_form(E3, k, 8).at(ctx)
        lhs = value_of(lie_vec(ctx, Id, w))
        rhs = value_of(ext_d(ctx, w))
        assert within(lhs, rhs, atol=1e-12, rtol=1e-12)


def test_interior_identity_scales_by_degree():
    ctx = ctx_at(E3)
    Id = VecAltValue.identity(3)
    for k in range(1, 4):
        w = random_form(E3, k, 9).at(ctx)
        assert within(value_of(interior(Id, w)), value_of(w.scale(float(k))), atol=1e-12)
    assert trace(Id).get(()) == 3.0


def test_identity_is_parallel_on_curved_chart():
    S = builtin("sphere2").geometry
    ctx = ctx_at(S, order=2)
    out = d_nabla(ctx, VecAltValue.identity(2))
    assert max_abs(value_of(out)) < 1e-12


def test_codiff_euclidean_divergence():
    # delta(w) = -div on 1-forms in flat coordinates
    G = builtin("euclidean(2)").geometry
    ctx = ctx_at(G, order=2)
    x1 = sexpr.eval_jet(G.parse_expr("x1"), ctx.p, ctx.order)
    w = AltValue(2, 1, {(0,): x1})
    out = value_of(codiff(ctx, w))
    assert out.get(()) == pytest.approx(-1.0)
    # degree 0 input: canonical zero of degree -1
    z = codiff(ctx, AltValue(2, 0, {(): x1}))
    assert z.k == -1 and not z.coeffs


def test_codiff_frame_independent():
    S = builtin("sasakian_s3").geometry
    ctx = ctx_at(S, order=2)
    w = random_form(S, 2, 13).at(ctx)
    a = value_of(codiff(ctx, w))
    b = value_of(codiff(ctx, w, descending=True))
    assert within(a, b, atol=1e-10)


def test_sharp_field_euclidean():
    ctx = ctx_at(E3, order=2)
    dx1 = AltValue(3, 1, {(0,): 1.0})
    v = sharp_field(ctx, dx1)
    assert value_of(v).as_vector() == [1.0, 0.0, 0.0]


def test_graded_commutator_signs():
    ctx = ctx_at(E3, order=2)
    w = random_form(E3, 1, 3).at(ctx)
    # [d, d] = 2 d^2 = 0 (odd-odd commutator is an anticommutator)
    out = graded_comm(ctx, op_d(), op_d(), w)
    assert max_abs(value_of(out)) < 1e-12
    # [eps_f, eps_g] = 0 for two even (degree-0) multiplications
    f = random_form(E3, 0, 4)
    g = random_form(E3, 0, 5)
    out = graded_comm(ctx, op_eps(f), op_eps(g), w)
    assert max_abs(value_of(out)) < 1e-13


def test_nabla_vec_vector_case_on_flat_chart():
    # for a vector field on a flat chart, nabla_X = L_X + i_{dX} reduces to
    # the covariant (= coordinate) derivative along X on functions
    ctx = ctx_at(E3, order=2)
    X = jet_field(ctx, ["x2", "0 - x1", "1"])
    f = random_form(E3, 0, 6).at(ctx)
    got = value_of(nabla_vec(ctx, X, f))
    want = value_of(lie_vec(ctx, X, f))
    assert within(got, want, atol=1e-12)


def test_fn_decompose_round_trip():
    ctx = ctx_at(E3, order=3)
    phi = random_vec_form(E3, 1, 101).at(ctx)
    psi = random_vec_form(E3, 2, 102).at(ctx)

    def D_fn(c, w):
        return lie_vec(c, phi, w) + interior(psi, w)

    D = Operator("test", 1, D_fn)
    phi2, psi2 = fn_decompose(ctx, D)
    for b in range(3):
        assert within(value_of(phi2.comps[b]), value_of(phi.comps[b]), atol=1e-9)
        assert within(value_of(psi2.comps[b]), value_of(psi.comps[b]), atol=1e-9)


def test_fn_decompose_rejects_non_derivation():
    ctx = ctx_at(E3, order=3)
    om = random_form(E3, 1, 55)
    with pytest.raises(NotADerivation):
        fn_decompose(ctx, op_eps(om))


def test_endomorphism_algebra():
    A = VecAltValue.from_endomorphism([[0.0, 1.0], [-1.0, 0.0]])
    B = VecAltValue.from_endomorphism([[2.0, 0.0], [0.0, 3.0]])
    AB = endo_compose(A, B)
    # (A o B) e_1 = A (2 e_1) = -2 e_2
    assert endo_apply(AB, [1.0, 0.0]) == [0.0, -2.0]
    assert endo_apply(AB, [0.0, 1.0]) == [3.0, 0.0]
    # A^2 = -Id for the standard complex structure
    A2 = endo_compose(A, A)
    assert endo_apply(A2, [1.0, 0.0]) == [-1.0, 0.0]


def test_nijenhuis_vanishes_for_constant_structure():
    K = builtin("flat_kahler(1)").geometry
    ctx = ctx_at(K, order=2)
    N = nijenhuis(ctx, ctx.structure("J"))
    assert max_abs(value_of(N)) < 1e-14


def test_lie_metric_killing_and_not():
    S = builtin("sphere2").geometry
    ctx = ctx_at(S, order=2)
    # the rotation field d/dphi is Killing on the round sphere
    killing = VecAltValue.from_vector(
        [sexpr.eval_jet(S.parse_expr(s), ctx.p, ctx.order) for s in ("0", "1")]
    )
    L = lie_metric(ctx, killing)
    assert max(abs(e.value) for row in L for e in row) < 1e-12
    # d/dtheta is not Killing: L_xi g = 2 sin cos dphi^2
    not_killing = VecAltValue.from_vector(
        [sexpr.eval_jet(S.parse_expr(s), ctx.p, ctx.order) for s in ("1", "0")]
    )
    import math

    L = lie_metric(ctx, not_killing)
    th = ctx.p[0]
    assert L[1][1].value == pytest.approx(2 * math.sin(th) * math.cos(th), abs=1e-12)


def test_curvature_shuffle_matches_dnabla_squared():
    S = builtin("sphere2").geometry
    ctx = ctx_at(S, order=2)
    phi = random_vec_form(S, 0, 71).at(ctx)
    lhs = value_of(d_nabla(ctx, d_nabla(ctx, phi)))
    rhs = value_of(curvature_shuffle(ctx, phi))
    assert within(lhs, rhs, atol=1e-10)


def test_value_of_strips_jets():
    ctx = ctx_at(E3, order=2)
    w = random_form(E3, 2, 12).at(ctx)
    flat = value_of(w)
    assert all(isinstance(c, float) for c in flat.coeffs.values())
    assert all(isinstance(c, Jet) for c in w.coeffs.values())
