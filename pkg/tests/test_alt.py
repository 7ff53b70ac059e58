"""Alternating algebra, checked against a brute-force evaluation oracle.

The shuffle-sum interior product and the contraction are compared with the
defining alternation formulas evaluated through apply(), which expands
coefficients against determinants and shares no code with the shuffle path.
"""

import math
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from excal.alt import (
    AltValue,
    VecAltValue,
    apply,
    apply_vec,
    i_dir,
    interior,
    sharp,
    trace,
    wedge,
    wedge_sv,
)
from excal.errors import ArityError, DegreeError
from excal.prng import SplitMix64, derive_seed

ORACLE_TOL = 1e-12


def rand_alt(n, k, rng):
    return AltValue(n, k, {I: rng.uniform(-1, 1) for I in combinations(range(n), k)})


def rand_vec(n, p, rng):
    return VecAltValue(n, p, [rand_alt(n, p, rng) for _ in range(n)])


def basis_vectors(n, M):
    return [[1.0 if i == a else 0.0 for i in range(n)] for a in M]


def _perm_sign(perm):
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s


def oracle_interior(phi, omega, vectors):
    """(i_phi w)(X_1..X_m) by the full alternation sum over permutations."""
    p, k = phi.k, omega.k
    total = 0.0
    for sigma in permutations(range(len(vectors))):
        first = [vectors[s] for s in sigma[:p]]
        rest = [vectors[s] for s in sigma[p:]]
        vec = apply_vec(phi, first)
        total += _perm_sign(sigma) * apply(omega, [vec] + rest)
    return total / (math.factorial(p) * math.factorial(k - 1))


def oracle_trace(phi, vectors):
    """(tr phi)(X_1..X_{k-1}) = sum_b phi^b(e_b, X_1, ..., X_{k-1})."""
    n = phi.n
    total = 0.0
    for b in range(n):
        e_b = [1.0 if i == b else 0.0 for i in range(n)]
        total += apply(phi.comps[b], [e_b] + vectors)
    return total


def test_interior_matches_oracle():
    # all degree combinations for n <= 5, at least 100 sampled tensors total
    count = 0
    for n in range(2, 6):
        rng = SplitMix64(derive_seed(2024, "oracle", n))
        for p in range(0, n + 1):
            for k in range(1, n + 1):
                m = k + p - 1
                if m > n:
                    continue
                for _ in range(3):
                    phi, om = rand_vec(n, p, rng), rand_alt(n, k, rng)
                    got = interior(phi, om)
                    assert got.k == m
                    for M in combinations(range(n), m):
                        want = oracle_interior(phi, om, basis_vectors(n, M))
                        assert abs(got.get(M) - want) < ORACLE_TOL
                    count += 1
    assert count >= 100


def test_trace_matches_oracle():
    for n in range(2, 6):
        rng = SplitMix64(derive_seed(2024, "trace", n))
        for k in range(1, n + 1):
            for _ in range(3):
                phi = rand_vec(n, k, rng)
                got = trace(phi)
                assert got.k == k - 1
                for M in combinations(range(n), k - 1):
                    want = oracle_trace(phi, basis_vectors(n, M))
                    assert abs(got.get(M) - want) < ORACLE_TOL


def test_wedge_matches_oracle():
    # (a ^ b)(X_M) against the shuffle sum written out by hand
    for n in (3, 4):
        rng = SplitMix64(derive_seed(7, "wedge", n))
        for ka in range(0, n + 1):
            for kb in range(0, n - ka + 1):
                a, b = rand_alt(n, ka, rng), rand_alt(n, kb, rng)
                w = wedge(a, b)
                for M in combinations(range(n), ka + kb):
                    total = 0.0
                    for chosen in combinations(range(len(M)), ka):
                        rest = tuple(t for t in range(len(M)) if t not in chosen)
                        sign = _perm_sign(chosen + rest)
                        total += (
                            sign
                            * a.get(tuple(M[t] for t in chosen))
                            * b.get(tuple(M[t] for t in rest))
                        )
                    assert w.get(M) == pytest.approx(total, abs=ORACLE_TOL)


def test_interior_vector_case_is_classical():
    # for a plain vector field the FN interior product is i_X
    n = 4
    rng = SplitMix64(41)
    X = rand_vec(n, 0, rng)
    om = rand_alt(n, 3, rng)
    got = interior(X, om)
    want = AltValue.zero(n, 2)
    for b in range(n):
        want = want + i_dir(b, om).scale(X.comps[b].get(()))
    for M in combinations(range(n), 2):
        assert got.get(M) == pytest.approx(want.get(M), abs=1e-14)


def test_interior_identity_endomorphism():
    rng = SplitMix64(5)
    for n in (2, 3, 4):
        for k in range(1, n + 1):
            om = rand_alt(n, k, rng)
            got = interior(VecAltValue.identity(n), om)
            for M in combinations(range(n), k):
                assert got.get(M) == pytest.approx(k * om.get(M), abs=1e-14)


def test_interior_annihilates_functions():
    phi = rand_vec(3, 2, SplitMix64(9))
    f = AltValue(3, 0, {(): 2.5})
    out = interior(phi, f)
    assert not out.coeffs
    assert out.k == 1  # degree k + p - 1


def test_sharp_lowers_degree_with_metric():
    n = 3
    g_inv = [[2.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    om = AltValue(n, 1, {(0,): 1.0, (2,): -3.0})
    v = sharp(om, g_inv)
    assert v.k == 0
    assert v.as_vector() == [2.0, 0.0, -6.0]
    with pytest.raises(DegreeError):
        sharp(AltValue(n, 0, {(): 1.0}), g_inv)


def test_degree_guards():
    with pytest.raises(DegreeError):
        AltValue(3, 1, {(0,): 1.0}) + AltValue(3, 2, {(0, 1): 1.0})
    with pytest.raises(DegreeError):
        trace(VecAltValue.zero(3, 0))
    with pytest.raises(ArityError):
        apply(AltValue(3, 2, {(0, 1): 1.0}), [[1, 0, 0]])


def test_above_dimension_is_canonical_zero():
    a = AltValue(2, 2, {(0, 1): 1.0})
    w = wedge(a, a)
    assert w.k == 4 and not w.coeffs and w.is_structural_zero()


# -- hypothesis property tests -------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=4)


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_wedge_graded_commutativity(n, seed):
    rng = SplitMix64(seed)
    ka = seed % (n + 1)
    kb = (seed // 7) % (n + 1)
    a, b = rand_alt(n, ka, rng), rand_alt(n, kb, rng)
    lhs = wedge(a, b)
    rhs = wedge(b, a)
    sign = -1.0 if (ka * kb) % 2 else 1.0
    for M in combinations(range(n), ka + kb):
        assert lhs.get(M) == pytest.approx(sign * rhs.get(M), abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_wedge_associativity(n, seed):
    rng = SplitMix64(seed)
    a, b, c = rand_alt(n, 1, rng), rand_alt(n, 1, rng), rand_alt(n, n - 2, rng)
    lhs = wedge(wedge(a, b), c)
    rhs = wedge(a, wedge(b, c))
    for M in combinations(range(n), n):
        assert lhs.get(M) == pytest.approx(rhs.get(M), abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_i_dir_is_an_antiderivation(n, seed):
    rng = SplitMix64(seed)
    ka = 1 + seed % n
    kb = (seed // 5) % (n - ka + 1)
    a, b = rand_alt(n, ka, rng), rand_alt(n, kb, rng)
    v = seed % n
    lhs = i_dir(v, wedge(a, b))
    sign = -1.0 if ka % 2 else 1.0
    rhs = wedge(i_dir(v, a), b) + wedge(a, i_dir(v, b)).scale(sign)
    for M in combinations(range(n), ka + kb - 1):
        assert lhs.get(M) == pytest.approx(rhs.get(M), abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(dims, seeds)
def test_interior_wedge_derivation_rule(n, seed):
    # i_phi is a derivation of degree p - 1 over the wedge product
    rng = SplitMix64(seed)
    p = 1 + seed % 2
    ka = 1 + (seed // 3) % (n - 1)
    kb = (seed // 11) % (n - ka + 1)
    phi = rand_vec(n, p, rng)
    a, b = rand_alt(n, ka, rng), rand_alt(n, kb, rng)
    lhs = interior(phi, wedge(a, b))
    sign = -1.0 if (ka * (p - 1)) % 2 else 1.0
    rhs = wedge(interior(phi, a), b) + wedge(a, interior(phi, b)).scale(sign)
    for M in combinations(range(n), ka + kb + p - 1):
        assert lhs.get(M) == pytest.approx(rhs.get(M), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(dims, seeds)
def test_wedge_sv_consistency(n, seed):
    # componentwise wedge of a scalar with a tangent-valued form
    rng = SplitMix64(seed)
    om = rand_alt(n, 1, rng)
    phi = rand_vec(n, 1, rng)
    out = wedge_sv(om, phi)
    assert out.k == 2
    for b in range(n):
        ref = wedge(om, phi.comps[b])
        for M in combinations(range(n), 2):
            assert out.comps[b].get(M) == pytest.approx(ref.get(M), abs=1e-14)
