"""Operator calculus on jet-valued forms at a chart point.

All operators act on AltValue / VecAltValue objects whose coefficients are
jets, obtained from fields via ChartContext.form(...).  Differentiation
consumes one jet order per application; compositions fail loudly
(JetBudgetExhausted) when the budget runs out.

Sign conventions, fixed globally:
  [A, B]  = A o B - (-1)^{|A||B|} B o A
  {A, B}  = A o B + B o A
  L_phi   = i_phi o d - (-1)^{p-1} d o i_phi     (phi of degree p)
  nabla_phi = L_phi - (-1)^p i_{d^nabla phi}
"""

from itertools import combinations

from .alt import AltValue, VecAltValue, i_dir, interior, sharp, trace, wedge, wedge_sv
from .alt import _is_num_zero as _alt_is_zero
from .errors import DegreeError, NotADerivation, ReconstructionMismatch
from .jets import Jet, jet_const, jet_diff, jet_var
from .prng import SplitMix64, derive_seed


def _dx(n, a):
    return AltValue(n, 1, {(a,): 1.0})


def _diff_alt(w, a):
    """Coefficientwise partial derivative along coordinate a."""
    out = {}
    for I, c in w.coeffs.items():
        if isinstance(c, Jet):
            out[I] = jet_diff(c, a)
    return AltValue(w.n, w.k, out)


def _sort_sign(seq):
    """(sign, sorted tuple) of an index sequence; sign 0 on repeats."""
    seq = tuple(seq)
    if len(set(seq)) != len(seq):
        return 0, None
    inv = sum(
        1
        for i in range(len(seq))
        for j in range(i + 1, len(seq))
        if seq[i] > seq[j]
    )
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


def _lookup(w, seq):
    sign, key = _sort_sign(seq)
    if sign == 0:
        return 0.0
    c = w.coeffs.get(key)
    if c is None:
        return 0.0
    return c if sign > 0 else -c


# -- first-order operators -------------------------------------------------


def ext_d(ctx, w):
    """Exterior derivative from coefficient jets."""
    n = w.n
    if w.k + 1 > n:
        return AltValue.zero(n, w.k + 1)
    out = AltValue.zero(n, w.k + 1)
    for a in range(n):
        out = out + wedge(_dx(n, a), _diff_alt(w, a))
    return out


def _gamma_zero_mask(ctx):
    """gamma_zero[m][a][i] is True when Gamma^m_{a i} vanishes identically."""

    def build():
        gamma = ctx.gamma()
        n = len(gamma)
        return [
            [[not gamma[m][a][i].c.any() for i in range(n)] for a in range(n)]
            for m in range(n)
        ]

    return ctx._memo("gamma_zero", build)


def nabla_coord(ctx, a, w):
    """Covariant derivative along the coordinate vector e_a."""
    if w.k == 0:
        return _diff_alt(w, a)
    gamma = ctx.gamma()
    gz = _gamma_zero_mask(ctx)
    n, k = w.n, w.k
    out = {}
    for I in combinations(range(n), k):
        acc = 0.0
        c = w.coeffs.get(I)
        if isinstance(c, Jet):
            acc = jet_diff(c, a)
        for s in range(k):
            for m in range(n):
                if gz[m][a][I[s]]:
                    continue
                cm = _lookup(w, I[:s] + (m,) + I[s + 1 :])
                if isinstance(cm, float) and cm == 0.0:
                    continue
                acc = acc - gamma[m][a][I[s]] * cm
        if not (isinstance(acc, float) and acc == 0.0):
            out[I] = acc
    return AltValue(n, k, out)


def nabla_form(ctx, X, w):
    """Covariant derivative along a tangent vector X (VecAltValue deg 0)."""
    comps = X.as_vector()
    out = AltValue.zero(w.n, w.k)
    for a in range(w.n):
        xa = comps[a]
        if _alt_is_zero(xa):
            continue
        out = out + nabla_coord(ctx, a, w).scale(xa)
    return out


def codiff(ctx, w, descending=False):
    """Hodge codifferential by the orthonormal-frame formula."""
    if w.k == 0 or w.k > w.n:
        # degree k - 1 even when structurally zero, so compositions that
        # wedge or add the result keep consistent degree bookkeeping
        return AltValue.zero(w.n, w.k - 1)
    nabla_all = [nabla_coord(ctx, a, w) for a in range(w.n)]
    out = AltValue.zero(w.n, w.k - 1)
    for X in ctx.frame(descending=descending):
        comps = X.as_vector()
        nx = AltValue.zero(w.n, w.k)
        for a in range(w.n):
            xa = comps[a]
            if _alt_is_zero(xa):
                continue
            nx = nx + nabla_all[a].scale(xa)
        out = out - interior(X, nx)
    return out


def nabla_vec_coord(ctx, a, phi):
    """Covariant derivative of a tangent-valued form along e_a."""
    gamma = ctx.gamma()
    gz = _gamma_zero_mask(ctx)
    n = phi.n
    comps = [nabla_coord(ctx, a, c) for c in phi.comps]
    for b in range(n):
        for m in range(n):
            if gz[b][a][m] or not phi.comps[m].coeffs:
                continue
            comps[b] = comps[b] + phi.comps[m].scale(gamma[b][a][m])
    return VecAltValue(n, phi.k, comps)


def nabla_vec_dir(ctx, X, phi):
    comps_x = X.as_vector()
    out = VecAltValue.zero(phi.n, phi.k)
    for a in range(phi.n):
        xa = comps_x[a]
        if _alt_is_zero(xa):
            continue
        out = out + nabla_vec_coord(ctx, a, phi).scale(xa)
    return out


def d_nabla(ctx, phi):
    """Covariant exterior derivative of a tangent-valued form."""
    n = phi.n
    out = VecAltValue.zero(n, phi.k + 1)
    for a in range(n):
        out = out + wedge_sv(_dx(n, a), nabla_vec_coord(ctx, a, phi))
    return out


def lie_vec(ctx, phi, w):
    """Frolicher-Nijenhuis Lie derivative L_phi = [i_phi, d]."""
    p = phi.k
    out = interior(phi, ext_d(ctx, w))
    second = ext_d(ctx, interior(phi, w))
    if (p - 1) % 2 == 0:
        return out - second
    return out + second


def nabla_vec(ctx, phi, w):
    """Generalized covariant derivative nabla_phi = L_phi - (-1)^p i_{d^nabla phi}."""
    p = phi.k
    out = lie_vec(ctx, phi, w)
    corr = interior(d_nabla(ctx, phi), w)
    if p % 2 == 0:
        return out - corr
    return out + corr


# -- metric-dependent vector-valued companions of a form --------------------


def sharp_field(ctx, w):
    """Musical sharp with jet coefficients (evaluable in a neighborhood)."""
    return sharp(w, ctx.g_inv())


def omega_nabla(ctx, w):
    """sum_{a,b} g^{ab} (nabla_a w) wedge e_b."""
    if w.k == 0:
        raise DegreeError("omega_nabla needs a form of degree >= 1")
    n = w.n
    g_inv = ctx.g_inv()
    nabla_all = [nabla_coord(ctx, a, w) for a in range(n)]
    comps = []
    for b in range(n):
        acc = AltValue.zero(n, w.k)
        for a in range(n):
            gab = g_inv[a][b]
            acc = acc + nabla_all[a].scale(gab)
        comps.append(acc)
    return VecAltValue(n, w.k, comps)


def omega_diamond(ctx, w, variant=0):
    """The tangent-valued form controlling [delta, eps_w]; three equal forms."""
    if w.k == 0:
        raise DegreeError("diamond needs a form of degree >= 1")
    if variant == 0:
        return d_nabla(ctx, sharp_field(ctx, w)) + omega_nabla(ctx, w)
    if variant == 1:
        two_d = d_nabla(ctx, sharp_field(ctx, w)).scale(2.0)
        return two_d + _sharp_or_zero(ctx, ext_d(ctx, w))
    if variant == 2:
        return omega_nabla(ctx, w).scale(2.0) - _sharp_or_zero(ctx, ext_d(ctx, w))
    raise ValueError(f"diamond variant must be 0, 1 or 2, got {variant!r}")


def _sharp_or_zero(ctx, w):
    if w.k > w.n:
        return VecAltValue.zero(w.n, w.k - 1)
    return sharp_field(ctx, w)


# -- graded commutators ------------------------------------------------------


class Operator:
    """A degree-graded operator on jet-valued forms, applied via ctx."""

    def __init__(self, name, degree, fn):
        self.name = name
        self.degree = degree
        self.fn = fn

    def __call__(self, ctx, w):
        return self.fn(ctx, w)

    def __repr__(self):
        return f"Operator({self.name!r}, degree={self.degree})"


def op_d():
    return Operator("d", 1, ext_d)


def op_delta():
    return Operator("delta", -1, codiff)


def op_eps(field_or_value, degree=None):
    """Left wedge multiplication by a (field or evaluated) form."""

    def fn(ctx, w):
        omega = field_or_value
        if hasattr(omega, "at"):
            omega = omega.at(ctx)
        return wedge(omega, w)

    if degree is None:
        degree = getattr(field_or_value, "degree", None)
        if degree is None:
            degree = field_or_value.k
    return Operator("eps", degree, fn)


def op_interior(phi_source, degree):
    """i_phi for a tangent-valued form (callable(ctx) or value)."""

    def fn(ctx, w):
        phi = phi_source(ctx) if callable(phi_source) else phi_source
        return interior(phi, w)

    return Operator("i", degree - 1, fn)


def op_lie(phi_source, degree):
    def fn(ctx, w):
        phi = phi_source(ctx) if callable(phi_source) else phi_source
        return lie_vec(ctx, phi, w)

    return Operator("lie", degree, fn)


def graded_comm(ctx, A, B, w, anti=False):
    """[A,B]w = A(B w) - (-1)^{|A||B|} B(A w); with anti, A(B w) + B(A w)."""
    ab = A(ctx, B(ctx, w))
    ba = B(ctx, A(ctx, w))
    if anti:
        return ab + ba
    if (A.degree * B.degree) % 2 == 0:
        return ab - ba
    return ab + ba


# -- Frolicher-Nijenhuis decomposition ---------------------------------------


def _coord_fn(ctx, c):
    n = ctx.geometry.n
    return AltValue(n, 0, {(): jet_var(ctx.p, c, ctx.order)})


def _coord_one_form(ctx, c):
    n = ctx.geometry.n
    return AltValue(n, 1, {(c,): jet_const(1.0, n, ctx.order)})


def _test_form(ctx, degree, seed):
    """Deterministic low-degree polynomial jet form for validation passes."""
    n = ctx.geometry.n
    rng = SplitMix64(derive_seed(seed, n, degree, "fn-test"))
    coeffs = {}
    for I in combinations(range(n), degree):
        c = jet_const(rng.uniform(-1.0, 1.0), n, ctx.order)
        for v in range(n):
            c = c + rng.uniform(-1.0, 1.0) * jet_var(ctx.p, v, ctx.order)
        coeffs[I] = c
    return AltValue(n, degree, coeffs)


def _max_abs(w):
    vals = [abs(c.value if isinstance(c, Jet) else c) for c in w.coeffs.values()]
    return max(vals, default=0.0)


def fn_decompose(ctx, D, rel_tol=1e-8, seed=12345):
    """Split a degree-p derivation into D = L_phi + i_psi.

    phi is read off from D on coordinate functions, psi from the residue of
    D on coordinate 1-forms.  Validates the Leibniz property on sampled
    products (NotADerivation) and the reconstruction on a randomized form
    (ReconstructionMismatch).
    """
    n = ctx.geometry.n
    p = D.degree

    # Leibniz check on products of sampled forms
    alpha = _test_form(ctx, 0, seed)
    beta = _test_form(ctx, 1, derive_seed(seed, 1))
    lhs = D(ctx, wedge(alpha, beta))
    rhs = wedge(D(ctx, alpha), beta) + wedge(alpha, D(ctx, beta))
    scale = max(_max_abs(lhs), _max_abs(rhs), 1.0)
    if _max_abs(lhs - rhs) > rel_tol * scale:
        raise NotADerivation(
            f"operator {D.name!r} fails the Leibniz property (err {_max_abs(lhs - rhs)})"
        )

    phi = VecAltValue(n, p, [D(ctx, _coord_fn(ctx, c)) for c in range(n)])
    psi_comps = []
    for c in range(n):
        resid = D(ctx, _coord_one_form(ctx, c)) - lie_vec(ctx, phi, _coord_one_form(ctx, c))
        psi_comps.append(resid)
    psi = VecAltValue(n, p + 1, psi_comps)

    # reconstruction check on a randomized degree-2 form
    if n >= 2:
        test = _test_form(ctx, 2, derive_seed(seed, 2))
        got = D(ctx, test)
        want = lie_vec(ctx, phi, test) + interior(psi, test)
        scale = max(_max_abs(got), _max_abs(want), 1.0)
        if _max_abs(got - want) > rel_tol * scale:
            raise ReconstructionMismatch(
                f"decomposition of {D.name!r} fails to reconstruct it "
                f"(err {_max_abs(got - want)})"
            )
    return phi, psi


# -- auxiliary tensors --------------------------------------------------------


def endo_apply(T, v_comps):
    """Apply an endomorphism (VecAltValue deg 1) to vector components."""
    return [
        sum(T.comps[b].coeffs.get((c,), 0.0) * v_comps[c] for c in range(T.n))
        for b in range(T.n)
    ]


def endo_compose(T, S):
    """Composition T o S of endomorphisms given as degree-1 VecAltValues."""
    n = T.n
    comps = []
    for b in range(n):
        row = {}
        for c in range(n):
            acc = 0.0
            for m in range(n):
                t = T.comps[b].coeffs.get((m,))
                s = S.comps[m].coeffs.get((c,))
                if t is None or s is None:
                    continue
                acc = acc + t * s
            if not (isinstance(acc, float) and acc == 0.0):
                row[(c,)] = acc
        comps.append(AltValue(n, 1, row))
    return VecAltValue(n, 1, comps)


def nijenhuis(ctx, T):
    """Nijenhuis tensor of an endomorphism field, on coordinate vectors."""
    n = T.n

    def tcol(c):
        return [T.comps[b].coeffs.get((c,), 0.0) for b in range(n)]

    def dvec(v, a):
        out = []
        for x in v:
            out.append(jet_diff(x, a) if isinstance(x, Jet) else 0.0)
        return out

    def bracket(x, y):
        # [X, Y]^b = sum_a X^a d_a Y^b - Y^a d_a X^b
        out = [0.0] * n
        for a in range(n):
            dy = dvec(y, a)
            dx = dvec(x, a)
            for b in range(n):
                out[b] = out[b] + x[a] * dy[b] - y[a] * dx[b]
        return out

    comps_out = [dict() for _ in range(n)]
    for i in range(n):
        ti = tcol(i)
        for j in range(i + 1, n):
            tj = tcol(j)
            term = bracket(ti, tj)
            # [T e_i, e_j] = -d_j(T e_i); [e_i, T e_j] = d_i(T e_j)
            b1 = [-x for x in dvec(ti, j)]
            b2 = dvec(tj, i)
            tb1 = endo_apply(T, b1)
            tb2 = endo_apply(T, b2)
            for b in range(n):
                v = term[b] - tb1[b] - tb2[b]
                if not (isinstance(v, float) and v == 0.0):
                    comps_out[b][(i, j)] = v
    return VecAltValue(n, 2, [AltValue(n, 2, d) for d in comps_out])


def nabla_vector_field(ctx, xi):
    """(d^nabla xi)(Y) = nabla_Y xi as an endomorphism (VecAltValue deg 1)."""
    return d_nabla(ctx, xi)


def lie_metric(ctx, xi, printed_variant=False):
    """(L_xi g)_{ij} as a jet matrix, assembled from Christoffel jets.

    The standard Killing identity (L_xi g)(Y,Z) = g(nabla_Y xi, Z)
    + g(Y, nabla_Z xi) is used; printed_variant swaps the second term for
    g(xi, nabla_Z xi), which does not close the Goldberg identity (kept
    only so tests can demonstrate the difference).
    """
    n = ctx.geometry.n
    g = ctx.g()
    gamma = ctx.gamma()
    comps = xi.as_vector()
    # (nabla_a xi)^b = d_a xi^b + Gamma^b_{am} xi^m
    nab = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            acc = jet_diff(comps[b], a) if isinstance(comps[b], Jet) else 0.0
            for m in range(n):
                acc = acc + gamma[b][a][m] * comps[m]
            nab[a][b] = acc

    def g_dot(u, v):
        acc = 0.0
        for i in range(n):
            for j in range(n):
                acc = acc + g[i][j] * u[i] * v[j]
        return acc

    e = lambda a: [1.0 if i == a else 0.0 for i in range(n)]
    out = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            first = g_dot(nab[a], e(b))
            if printed_variant:
                second = g_dot(comps, nab[b])
            else:
                second = g_dot(e(a), nab[b])
            out[a][b] = first + second
    return out


def two_tensor_sharp(ctx, t):
    """Metric contraction of a symmetric (0,2)-tensor to an endomorphism."""
    n = ctx.geometry.n
    g_inv = ctx.g_inv()
    comps = []
    for b in range(n):
        row = {}
        for j in range(n):
            acc = 0.0
            for a in range(n):
                acc = acc + g_inv[a][b] * t[a][j]
            if not (isinstance(acc, float) and acc == 0.0):
                row[(j,)] = acc
        comps.append(AltValue(n, 1, row))
    return VecAltValue(n, 1, comps)


def curvature_shuffle(ctx, phi):
    """(d^nabla)^2 phi via the Riemann curvature shuffle sum."""
    n, p = phi.n, phi.k
    R = ctx.curvature()
    m = p + 2
    comps_out = [dict() for _ in range(n)]
    for M in combinations(range(n), m):
        for chosen in combinations(range(m), 2):
            inv = sum(chosen) - 1
            sign = -1 if inv % 2 else 1
            i, j = M[chosen[0]], M[chosen[1]]
            rest = tuple(M[t] for t in range(m) if t not in chosen)
            for b in range(n):
                cb = phi.comps[b].coeffs.get(rest)
                if cb is None:
                    continue
                for l in range(n):
                    term = R[i][j][b][l] * cb
                    term = term if sign > 0 else -term
                    d = comps_out[l]
                    d[M] = d[M] + term if M in d else term
    return VecAltValue(n, m, [AltValue(n, m, d) for d in comps_out])


# -- pointwise extraction -----------------------------------------------------


def value_of(w):
    """Strip jets down to order-0 coefficient values."""
    if isinstance(w, VecAltValue):
        return VecAltValue(w.n, w.k, [value_of(c) for c in w.comps])
    out = {}
    for I, c in w.coeffs.items():
        out[I] = c.value if isinstance(c, Jet) else float(c)
    return AltValue(w.n, w.k, out)
