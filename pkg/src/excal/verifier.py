"""Declarative identity checks: sample points and random forms, evaluate
both sides of each identity, compare to mixed tolerance, and report.

Every built-in check evaluates its left side by raw operator composition
and its right side from independently computed closed-form ingredients,
so the two paths share nothing beyond the leaf field evaluations.
Reports follow the excal-report v1 JSON schema and are deterministic for
a fixed (geometry, seed) pair up to the wall-time field.
"""

import time
from dataclasses import dataclass, field as dc_field
from itertools import combinations

from . import catalog, opexpr
from .alt import AltValue, VecAltValue, interior, trace, wedge, wedge_sv
from .compare import DEFAULT_ATOL, DEFAULT_RTOL, alt_errors
from .errors import ConfigError, DegreeError, UnknownSuite
from .geometry import FormField, Geometry, VecFormField, sample_points
from .jets import Jet
from .operators import (
    Operator,
    codiff,
    curvature_shuffle,
    d_nabla,
    endo_compose,
    ext_d,
    fn_decompose,
    graded_comm,
    lie_metric,
    lie_vec,
    nabla_vec,
    nabla_vec_coord,
    omega_diamond,
    omega_nabla,
    op_delta,
    op_eps,
    sharp_field,
    two_tensor_sharp,
)
from .prng import SplitMix64, derive_seed

REPORT_VERSION = "excal-report v1"
DEFAULT_SEED = 20240
DEFAULT_POINTS = 20
FAIL_FLOOR = 1e-3


# -- random fields -----------------------------------------------------------


def random_form(G, k, seed, kind="poly", max_poly_degree=2):
    """Deterministic random FormField of degree k on G.

    poly: each coefficient is a polynomial of total degree <= max_poly_degree;
    trig: a degree-<=1 polynomial in sin/cos of single coordinates.  All
    scalar draws are uniform in [-1, 1] from a splitmix64 stream derived
    from (seed, geometry name, k, kind).
    """
    if not 0 <= k <= G.n:
        raise DegreeError(f"random form degree {k} out of range for n={G.n}")
    rng = SplitMix64(derive_seed(seed, "form", G.name, k, kind))
    names = G.coord_names
    coeffs = {}
    for I in combinations(range(G.n), k):
        terms = [repr(rng.uniform(-1.0, 1.0))]
        if kind == "poly":
            if max_poly_degree >= 1:
                for v in names:
                    terms.append(f"{rng.uniform(-1.0, 1.0)!r}*{v}")
            if max_poly_degree >= 2:
                for a in range(G.n):
                    for b in range(a, G.n):
                        terms.append(
                            f"{rng.uniform(-1.0, 1.0)!r}*{names[a]}*{names[b]}"
                        )
        elif kind == "trig":
            for v in names:
                terms.append(f"{rng.uniform(-1.0, 1.0)!r}*sin({v})")
                terms.append(f"{rng.uniform(-1.0, 1.0)!r}*cos({v})")
        else:
            raise ConfigError(f"unknown random form kind {kind!r}")
        coeffs[I] = G.parse_expr(" + ".join(terms))
    return FormField(k, coeffs)


def random_vec_form(G, k, seed, kind="poly"):
    """Deterministic random tangent-valued form of degree k."""
    return VecFormField(
        k, [random_form(G, k, derive_seed(seed, "comp", b), kind) for b in range(G.n)]
    )


# -- checks ------------------------------------------------------------------


@dataclass
class IdentityCheck:
    id: str
    geometry: object  # catalog entry name or a Geometry
    lhs: object  # opexpr source string or callable(ctx, env)
    rhs: object
    inputs: dict = dc_field(default_factory=dict)
    points: list = None
    n_points: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL
    jet_order: int = 2
    expected_fail: bool = False


def _errors(lhs, rhs):
    """Like compare.alt_errors but also accepts parallel lists of values."""
    if isinstance(lhs, (list, tuple)) or isinstance(rhs, (list, tuple)):
        err = scale = 0.0
        for a, b in zip(lhs, rhs):
            e, s = _errors(a, b)
            err = max(err, e)
            scale = max(scale, s)
        return err, scale
    return alt_errors(lhs, rhs)


def _side(side, ctx, env):
    if callable(side):
        return side(ctx, env)
    return opexpr.evaluate_str(side, ctx, env)


def _resolve_geometry(check):
    if isinstance(check.geometry, Geometry):
        return check.geometry
    return catalog.builtin(check.geometry).geometry


def run_check(check):
    """Evaluate one identity check at its sampled points; never aborts on a
    single-point evaluation error (it is recorded as a failing point)."""
    t0 = time.perf_counter()
    G = _resolve_geometry(check)
    point_seed = derive_seed(check.seed, "points", G.name)
    points = check.points
    if points is None:
        points = sample_points(G, check.n_points, point_seed)
    if not points:
        raise ConfigError(f"check {check.id!r} has an empty point list")

    env = dict(check.inputs)
    records = []
    max_abs_err = 0.0
    max_rel_err = 0.0
    ok = True
    for p in points:
        try:
            ctx = G.context(tuple(p), check.jet_order)
            lhs = _side(check.lhs, ctx, env)
            rhs = _side(check.rhs, ctx, env)
            abs_err, scale = _errors(lhs, rhs)
            rel_err = abs_err / max(scale, 1.0)
            rec = {"p": list(p), "abs_err": abs_err, "rel_err": rel_err}
            if abs_err > check.atol + check.rtol * max(scale, 1.0):
                ok = False
        except Exception as exc:  # recorded, not raised
            abs_err = rel_err = float("1e308")
            rec = {
                "p": list(p),
                "abs_err": abs_err,
                "rel_err": rel_err,
                "error": f"{type(exc).__name__}: {exc}",
            }
            ok = False
        max_abs_err = max(max_abs_err, abs_err)
        max_rel_err = max(max_rel_err, rel_err)
        records.append(rec)

    if check.expected_fail:
        ok = max_abs_err > FAIL_FLOOR and not any("error" in r for r in records)
    report = {
        "version": REPORT_VERSION,
        "check": check.id,
        "pass": bool(ok),
        "expected_fail": check.expected_fail,
        "max_abs_err": max_abs_err,
        "max_rel_err": max_rel_err,
        "points": records,
        "seeds": {"run": check.seed, "points": point_seed},
        "jet_order": check.jet_order,
        "tolerance": {"atol": check.atol, "rtol": check.rtol},
        "wall_time_s": time.perf_counter() - t0,
    }
    return report


# -- identity helpers --------------------------------------------------------


def _zero(n, k):
    return AltValue.zero(n, k)


def _as_list(fn, degrees):
    def run(ctx, env):
        return [fn(ctx, env, q) for q in degrees]

    return run


def _scalar(value):
    return value.coeffs.get((), 0.0) if isinstance(value, AltValue) else value


def _xi_flat(ctx, xi):
    """The 1-form g(xi, .) with jet coefficients."""
    n = ctx.geometry.n
    g = ctx.g()
    comps = xi.as_vector()
    out = {}
    for c in range(n):
        acc = 0.0
        for b in range(n):
            acc = acc + g[c][b] * comps[b]
        out[(c,)] = acc
    return AltValue(n, 1, out)


def _amatrix(ctx):
    """A = -phi o (nabla xi) from the chart's almost-contact structure."""
    phi = ctx.structure("phi")
    nxi = d_nabla(ctx, ctx.structure("xi"))
    return -endo_compose(phi, nxi)


def _betas(G, seed, degrees, kind="poly"):
    return {q: random_form(G, q, derive_seed(seed, "beta", q), kind) for q in degrees}


def _comm_eps(ctx, omega_val, beta_val):
    """[delta, eps_omega] beta by raw operator composition."""
    return graded_comm(ctx, op_delta(), op_eps(omega_val, omega_val.k), beta_val)


# -- suite builders ----------------------------------------------------------

GEOMS_ALL = [
    "euclidean(3)",
    "flat_torus(2)",
    "sphere2",
    "flat_kahler(2)",
    "hopf_lck",
    "sasakian_s3",
    "flat_cokahler(1)",
]

MAIN_GEOMS = [
    "euclidean(3)",
    "sphere2",
    "flat_kahler(1)",
    "flat_kahler(2)",
    "hopf_lck",
    "sasakian_s3",
    "flat_cokahler(1)",
    "flat_cokahler(2)",
]


def _resolve_pair(spec):
    """A geometry spec is a catalog entry name or an inline Geometry."""
    if isinstance(spec, Geometry):
        return spec, spec.name
    return catalog.builtin(spec).geometry, spec



def _s_fn_contraction(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        for k in (1, 2):
            for p in (1, 2):
                if k + p > n:
                    continue
                om = random_form(G, k, derive_seed(seed, gname, "omega", k, p))
                ph = random_vec_form(G, p, derive_seed(seed, gname, "phi", k, p))

                def lhs(ctx, env, om=om, ph=ph):
                    return trace(wedge_sv(om.at(ctx), ph.at(ctx)))

                def rhs(ctx, env, om=om, ph=ph, k=k, p=p):
                    w, f = om.at(ctx), ph.at(ctx)
                    s1 = -1.0 if k % 2 else 1.0
                    s2 = -1.0 if ((k + 1) * p) % 2 else 1.0
                    return wedge(w, trace(f)).scale(s1) + interior(f, w).scale(s2)

                checks.append(
                    IdentityCheck(
                        id=f"fn-contraction/{gname}/k{k}p{p}",
                        geometry=spec,
                        lhs=lhs,
                        rhs=rhs,
                        seed=seed,
                        atol=atol,
                        rtol=rtol,
                        jet_order=0,
                    )
                )
    return checks


def _s_omegaiphi(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        for k, p, l in ((1, 1, 1), (1, 1, 2), (1, 2, 1)):
            if k + p + l - 1 > n:
                continue
            om = random_form(G, k, derive_seed(seed, gname, "om", k, p, l))
            ph = random_vec_form(G, p, derive_seed(seed, gname, "ph", k, p, l))
            be = random_form(G, l, derive_seed(seed, gname, "be", k, p, l))

            def lhs(ctx, env, om=om, ph=ph, be=be):
                return wedge(om.at(ctx), interior(ph.at(ctx), be.at(ctx)))

            def rhs(ctx, env, om=om, ph=ph, be=be):
                return interior(wedge_sv(om.at(ctx), ph.at(ctx)), be.at(ctx))

            checks.append(
                IdentityCheck(
                    id=f"omegaiphi/{gname}/k{k}p{p}l{l}",
                    geometry=spec,
                    lhs=lhs,
                    rhs=rhs,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=0,
                )
            )
    return checks


def _s_lie_wedge(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        combos = [(1, 1, 1)]
        if n >= 3:
            combos.append((1, 1, 2))
        for k, p, l in combos:
            om = random_form(G, k, derive_seed(seed, gname, "om", k, p, l))
            ph = random_vec_form(G, p, derive_seed(seed, gname, "ph", k, p, l))
            be = random_form(G, l, derive_seed(seed, gname, "be", k, p, l))

            def lhs(ctx, env, om=om, ph=ph, be=be):
                return wedge(om.at(ctx), lie_vec(ctx, ph.at(ctx), be.at(ctx)))

            def rhs(ctx, env, om=om, ph=ph, be=be, k=k, p=p):
                w, f, b = om.at(ctx), ph.at(ctx), be.at(ctx)
                sign = -1.0 if (p + k) % 2 else 1.0
                return lie_vec(ctx, wedge_sv(w, f), b) - interior(
                    wedge_sv(ext_d(ctx, w), f), b
                ).scale(sign)

            checks.append(
                IdentityCheck(
                    id=f"lie-wedge/{gname}/k{k}p{p}l{l}",
                    geometry=spec,
                    lhs=lhs,
                    rhs=rhs,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=2,
                )
            )
    return checks


def _s_dsquared(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        degrees = list(range(0, max(n - 1, 1)))
        betas = _betas(G, derive_seed(seed, gname, "d2"), degrees)

        def lhs(ctx, env, betas=betas, degrees=degrees):
            return [ext_d(ctx, ext_d(ctx, betas[q].at(ctx))) for q in degrees]

        def rhs(ctx, env, n=n, degrees=degrees):
            return [_zero(n, q + 2) for q in degrees]

        checks.append(
            IdentityCheck(
                id=f"dsquared/{gname}",
                geometry=spec,
                lhs=lhs,
                rhs=rhs,
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _s_deltasquared(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        degrees = list(range(2, n + 1))
        betas = _betas(G, derive_seed(seed, gname, "delta2"), degrees)

        def lhs(ctx, env, betas=betas, degrees=degrees):
            return [codiff(ctx, codiff(ctx, betas[q].at(ctx))) for q in degrees]

        def rhs(ctx, env, n=n, degrees=degrees):
            return [_zero(n, q - 2) for q in degrees]

        checks.append(
            IdentityCheck(
                id=f"deltasquared/{gname}",
                geometry=spec,
                lhs=lhs,
                rhs=rhs,
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _s_frame_independence(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        degrees = list(range(1, n + 1))
        betas = _betas(G, derive_seed(seed, gname, "frame"), degrees)

        def lhs(ctx, env, betas=betas, degrees=degrees):
            return [codiff(ctx, betas[q].at(ctx)) for q in degrees]

        def rhs(ctx, env, betas=betas, degrees=degrees):
            return [codiff(ctx, betas[q].at(ctx), descending=True) for q in degrees]

        checks.append(
            IdentityCheck(
                id=f"frame-independence/{gname}",
                geometry=spec,
                lhs=lhs,
                rhs=rhs,
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _s_curvature_dnabla2(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        for p in (0, 1):
            if p + 2 > G.n:
                continue
            ph = random_vec_form(G, p, derive_seed(seed, gname, "curv", p))

            def lhs(ctx, env, ph=ph):
                return d_nabla(ctx, d_nabla(ctx, ph.at(ctx)))

            def rhs(ctx, env, ph=ph):
                return curvature_shuffle(ctx, ph.at(ctx))

            checks.append(
                IdentityCheck(
                    id=f"curvature-dnabla2/{gname}/p{p}",
                    geometry=spec,
                    lhs=lhs,
                    rhs=rhs,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=2,
                )
            )
    return checks


def _s_omegacov(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        for k in range(1, min(2, n) + 1):
            om = random_form(G, k, derive_seed(seed, gname, "cov", k))

            def lhs(ctx, env, om=om):
                w = om.at(ctx)
                dn = d_nabla(ctx, sharp_field(ctx, w))
                dw = ext_d(ctx, w)
                if dw.k > dw.n:
                    return dn
                return dn + sharp_field(ctx, dw)

            def rhs(ctx, env, om=om):
                return omega_nabla(ctx, om.at(ctx))

            checks.append(
                IdentityCheck(
                    id=f"omegacov/{gname}/k{k}",
                    geometry=spec,
                    lhs=lhs,
                    rhs=rhs,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=2,
                )
            )
        # omega wedge nabla_phi = nabla_{omega wedge phi}
        if n >= 2:
            om = random_form(G, 1, derive_seed(seed, gname, "covphi-om"))
            ph = random_vec_form(G, 1, derive_seed(seed, gname, "covphi-ph"))
            be = random_form(G, 1, derive_seed(seed, gname, "covphi-be"))

            def lhs2(ctx, env, om=om, ph=ph, be=be):
                return wedge(om.at(ctx), nabla_vec(ctx, ph.at(ctx), be.at(ctx)))

            def rhs2(ctx, env, om=om, ph=ph, be=be):
                return nabla_vec(ctx, wedge_sv(om.at(ctx), ph.at(ctx)), be.at(ctx))

            checks.append(
                IdentityCheck(
                    id=f"omegacov/{gname}/wedge-compat",
                    geometry=spec,
                    lhs=lhs2,
                    rhs=rhs2,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=2,
                )
            )
    return checks


def _s_diamond_consistency(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        for k in range(1, min(3, n) + 1):
            om = random_form(G, k, derive_seed(seed, gname, "dia", k))
            for va, vb in ((0, 1), (1, 2)):

                def lhs(ctx, env, om=om, va=va):
                    return omega_diamond(ctx, om.at(ctx), variant=va)

                def rhs(ctx, env, om=om, vb=vb):
                    return omega_diamond(ctx, om.at(ctx), variant=vb)

                checks.append(
                    IdentityCheck(
                        id=f"diamond-consistency/{gname}/k{k}/v{va}{vb}",
                        geometry=spec,
                        lhs=lhs,
                        rhs=rhs,
                        seed=seed,
                        atol=atol,
                        rtol=rtol,
                        jet_order=2,
                    )
                )
    return checks


def _s_delta_trace(seed, atol, rtol, geoms=None):
    checks = []
    for spec in geoms if geoms is not None else GEOMS_ALL:
        G, gname = _resolve_pair(spec)
        n = G.n
        degrees = list(range(1, min(3, n) + 1))
        oms = {
            k: random_form(G, k, derive_seed(seed, gname, "dt", k)) for k in degrees
        }

        def lhs(ctx, env, oms=oms, degrees=degrees):
            out = []
            for k in degrees:
                w = oms[k].at(ctx)
                out.append(codiff(ctx, w))
                out.append(trace(omega_nabla(ctx, w)))
                if k >= 2:  # the sharp of a 1-form is a vector, no trace
                    out.append(trace(sharp_field(ctx, w)))
            return out

        def rhs(ctx, env, oms=oms, degrees=degrees, n=n):
            out = []
            for k in degrees:
                w = oms[k].at(ctx)
                out.append(trace(omega_diamond(ctx, w)).scale(-0.5))
                out.append(-codiff(ctx, w))
                if k >= 2:
                    out.append(_zero(n, k - 2))
            return out

        checks.append(
            IdentityCheck(
                id=f"delta-trace/{gname}",
                geometry=spec,
                lhs=lhs,
                rhs=rhs,
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _main_checks(seed, atol, rtol, covariant, geoms=None):
    tag = "main-covariant" if covariant else "main-lie"
    checks = []
    for spec in geoms if geoms is not None else MAIN_GEOMS:
        G, gname = _resolve_pair(spec)
        n = G.n
        for p in range(1, min(3, n) + 1):
            om = random_form(G, p, derive_seed(seed, gname, tag, "omega", p))
            degrees = list(range(0, n + 1))
            betas = _betas(G, derive_seed(seed, gname, tag, p), degrees)

            def lhs(ctx, env, om=om, betas=betas, degrees=degrees):
                w = om.at(ctx)
                return [_comm_eps(ctx, w, betas[q].at(ctx)) for q in degrees]

            def rhs(ctx, env, om=om, betas=betas, degrees=degrees, p=p):
                w = om.at(ctx)
                dw = codiff(ctx, w)
                sgn = -1.0 if p % 2 else 1.0
                out = []
                if covariant:
                    shp = sharp_field(ctx, w)
                    wn = omega_nabla(ctx, w)
                    dn_shp = d_nabla(ctx, shp)
                    # nabla_{omega-sharp} = L_{omega-sharp} - (-1)^{p-1} i_{d-nabla omega-sharp}
                    s2 = -1.0 if (p - 1) % 2 else 1.0
                    for q in degrees:
                        b = betas[q].at(ctx)
                        cov = lie_vec(ctx, shp, b) - interior(dn_shp, b).scale(s2)
                        out.append(wedge(dw, b) - cov - interior(wn, b).scale(sgn))
                else:
                    shp = sharp_field(ctx, w)
                    dia = omega_diamond(ctx, w)
                    for q in degrees:
                        b = betas[q].at(ctx)
                        out.append(
                            wedge(dw, b)
                            - lie_vec(ctx, shp, b)
                            - interior(dia, b).scale(sgn)
                        )
                return out

            checks.append(
                IdentityCheck(
                    id=f"{tag}/{gname}/p{p}",
                    geometry=spec,
                    lhs=lhs,
                    rhs=rhs,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=2,
                )
            )
    return checks


def _s_main_covariant(seed, atol, rtol):
    return _main_checks(seed, atol, rtol, covariant=True)


def _s_main_lie(seed, atol, rtol):
    return _main_checks(seed, atol, rtol, covariant=False)


def _rotation_field(G):
    """x1 d2 - x2 d1 as a VecFormField (a flat-chart Killing field)."""
    zero = G.parse_expr("0")
    comps = []
    for b in range(G.n):
        if b == 0:
            comps.append(FormField(0, {(): G.parse_expr(f"-{G.coord_names[1]}")}))
        elif b == 1:
            comps.append(FormField(0, {(): G.parse_expr(G.coord_names[0])}))
        else:
            comps.append(FormField(0, {(): zero}))
    return VecFormField(0, comps)


def _const_vec(G, comps_src):
    return VecFormField(
        0, [FormField(0, {(): G.parse_expr(s)}) for s in comps_src]
    )


def _goldberg_lhs(xi_field, degrees):
    def lhs(ctx, env):
        xi = xi_field.at(ctx)
        eta = _xi_flat(ctx, xi)
        out = []
        for q in degrees:
            b = env["betas"][q].at(ctx)
            out.append(_comm_eps(ctx, eta, b) + lie_vec(ctx, xi, b))
        return out

    return lhs


def _goldberg_rhs(xi_field, degrees):
    def rhs(ctx, env):
        xi = xi_field.at(ctx)
        eta = _xi_flat(ctx, xi)
        deta = codiff(ctx, eta)
        lg_sharp = two_tensor_sharp(ctx, lie_metric(ctx, xi))
        out = []
        for q in degrees:
            b = env["betas"][q].at(ctx)
            out.append(wedge(deta, b) + interior(lg_sharp, b))
        return out

    return rhs


def _s_goldberg(seed, atol, rtol):
    checks = []
    cases = []
    for gname in ("euclidean(3)", "sphere2"):
        G = catalog.builtin(gname).geometry
        cases.append((gname, "random", random_vec_form(G, 0, derive_seed(seed, gname, "xi"))))
    Ge = catalog.builtin("euclidean(3)").geometry
    cases.append(("euclidean(3)", "killing", _rotation_field(Ge)))
    Gs = catalog.builtin("sphere2").geometry
    cases.append(("sphere2", "killing", _const_vec(Gs, ["0", "1"])))

    for gname, label, xi_field in cases:
        G = catalog.builtin(gname).geometry
        degrees = list(range(0, G.n + 1))
        betas = _betas(G, derive_seed(seed, gname, "goldberg", label), degrees)
        checks.append(
            IdentityCheck(
                id=f"goldberg/{gname}/{label}",
                geometry=gname,
                lhs=_goldberg_lhs(xi_field, degrees),
                rhs=_goldberg_rhs(xi_field, degrees),
                inputs={"betas": betas},
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
        if label == "killing":
            # Killing witnesses additionally satisfy delta(xi-flat) = 0 and
            # (L_xi g)-sharp = 0.
            def lhs_k(ctx, env, xi_field=xi_field):
                xi = xi_field.at(ctx)
                return [
                    codiff(ctx, _xi_flat(ctx, xi)),
                    two_tensor_sharp(ctx, lie_metric(ctx, xi)),
                ]

            def rhs_k(ctx, env, n=G.n):
                return [_zero(n, 0), VecAltValue.zero(n, 1)]

            checks.append(
                IdentityCheck(
                    id=f"goldberg/{gname}/killing-constants",
                    geometry=gname,
                    lhs=lhs_k,
                    rhs=rhs_k,
                    seed=seed,
                    atol=atol,
                    rtol=rtol,
                    jet_order=2,
                )
            )
    return checks


def _s_fn_decompose(seed, atol, rtol):
    checks = []
    G = catalog.builtin("euclidean(3)").geometry
    for i in range(10):
        p = 1 if i < 5 else 2
        ph = random_vec_form(G, p, derive_seed(seed, "fnd", i, "phi"))
        ps = random_vec_form(G, p + 1, derive_seed(seed, "fnd", i, "psi"))

        def make_d(ph, ps, p):
            def fn(ctx, w):
                return lie_vec(ctx, ph.at(ctx), w) + interior(ps.at(ctx), w)

            return Operator("L_phi+i_psi", p, fn)

        def lhs(ctx, env, ph=ph, ps=ps, p=p):
            phi_rec, psi_rec = fn_decompose(ctx, make_d(ph, ps, p))
            return [phi_rec, psi_rec]

        def rhs(ctx, env, ph=ph, ps=ps):
            return [ph.at(ctx), ps.at(ctx)]

        checks.append(
            IdentityCheck(
                id=f"fn-decompose-roundtrip/euclidean(3)/pair{i}",
                geometry="euclidean(3)",
                lhs=lhs,
                rhs=rhs,
                n_points=2,
                seed=seed,
                atol=atol,
                rtol=0.0,
                jet_order=2,
            )
        )
    return checks


def _const_form(G, k, coeffs):
    return FormField(k, {I: G.parse_expr(src) for I, src in coeffs.items()})


def _residual_lhs(om_field, degrees):
    """[delta, eps_omega] beta + L_{omega-sharp} beta per degree."""

    def lhs(ctx, env):
        w = om_field.at(ctx)
        shp = sharp_field(ctx, w)
        out = []
        for q in degrees:
            b = env["betas"][q].at(ctx)
            out.append(_comm_eps(ctx, w, b) + lie_vec(ctx, shp, b))
        return out

    return lhs


def _zero_rhs(n, out_degrees):
    def rhs(ctx, env):
        return [_zero(n, d) for d in out_degrees]

    return rhs


def _s_parallel_anticommute(seed, atol, rtol):
    G = catalog.builtin("euclidean(3)").geometry
    checks = []
    forms = {
        2: _const_form(G, 2, {(0, 1): "1", (1, 2): "0.5", (0, 2): "-0.25"}),
        3: _const_form(G, 3, {(0, 1, 2): "0.75"}),
    }
    for p, om in forms.items():
        degrees = list(range(0, 4))
        betas = _betas(G, derive_seed(seed, "par", p), degrees)
        out_degrees = [q + p - 1 for q in degrees]
        checks.append(
            IdentityCheck(
                id=f"parallel-anticommute/euclidean(3)/p{p}",
                geometry="euclidean(3)",
                lhs=_residual_lhs(om, degrees),
                rhs=_zero_rhs(3, out_degrees),
                inputs={"betas": betas},
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _killing_residual_check(cid, xi_field, seed, atol, rtol, expected_fail=False):
    G = catalog.builtin("sphere2").geometry
    degrees = [0, 1, 2]
    betas = _betas(G, derive_seed(seed, cid), degrees)

    def lhs(ctx, env, xi_field=xi_field, degrees=degrees):
        xi = xi_field.at(ctx)
        eta = _xi_flat(ctx, xi)
        out = []
        for q in degrees:
            b = env["betas"][q].at(ctx)
            out.append(_comm_eps(ctx, eta, b) + lie_vec(ctx, xi, b))
        return out

    return IdentityCheck(
        id=cid,
        geometry="sphere2",
        lhs=lhs,
        rhs=_zero_rhs(2, degrees),
        inputs={"betas": betas},
        seed=seed,
        atol=atol,
        rtol=rtol,
        jet_order=2,
        expected_fail=expected_fail,
    )


def _s_killing_anticommute(seed, atol, rtol):
    G = catalog.builtin("sphere2").geometry
    return [
        _killing_residual_check(
            "killing-anticommute/sphere2", _const_vec(G, ["0", "1"]), seed, atol, rtol
        )
    ]


def _s_killing_negative(seed, atol, rtol):
    G = catalog.builtin("sphere2").geometry
    return [
        _killing_residual_check(
            "killing-negative/sphere2",
            _const_vec(G, ["1", "0"]),
            seed,
            atol,
            rtol,
            expected_fail=True,
        )
    ]


def _s_parallel_negative(seed, atol, rtol):
    G = catalog.builtin("euclidean(3)").geometry
    om = _const_form(G, 2, {(0, 1): "1 + x1", (1, 2): "x3"})
    degrees = [0, 1, 2, 3]
    betas = _betas(G, derive_seed(seed, "parneg"), degrees)
    return [
        IdentityCheck(
            id="parallel-negative/euclidean(3)",
            geometry="euclidean(3)",
            lhs=_residual_lhs(om, degrees),
            rhs=_zero_rhs(3, [q + 1 for q in degrees]),
            inputs={"betas": betas},
            seed=seed,
            atol=atol,
            rtol=rtol,
            jet_order=2,
            expected_fail=True,
        )
    ]


def _s_kahler(seed, atol, rtol):
    checks = []
    for gname in ("flat_kahler(1)", "flat_kahler(2)"):
        G = catalog.builtin(gname).geometry
        degrees = list(range(0, G.n + 1))
        betas = _betas(G, derive_seed(seed, gname, "kahler"), degrees)

        def lhs(ctx, env, degrees=degrees):
            omega = ctx.geometry.forms["Omega"].at(ctx)
            J = ctx.structure("J")
            out = []
            for q in degrees:
                b = env["betas"][q].at(ctx)
                out.append(_comm_eps(ctx, omega, b) + lie_vec(ctx, J, b))
            return out

        checks.append(
            IdentityCheck(
                id=f"kahler/{gname}",
                geometry=gname,
                lhs=lhs,
                rhs=_zero_rhs(G.n, [q + 1 for q in degrees]),
                inputs={"betas": betas},
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _s_lck(seed, atol, rtol):
    G = catalog.builtin("hopf_lck").geometry
    degrees = list(range(0, 5))
    betas = _betas(G, derive_seed(seed, "lck"), degrees)

    def lhs(ctx, env, degrees=degrees):
        omega = ctx.geometry.forms["Omega"].at(ctx)
        return [_comm_eps(ctx, omega, env["betas"][q].at(ctx)) for q in degrees]

    def rhs(ctx, env, degrees=degrees):
        omega = ctx.geometry.forms["Omega"].at(ctx)
        eta = ctx.structure("eta")
        theta = ctx.structure("theta")
        J = ctx.structure("J")
        theta_sharp = sharp_field(ctx, theta)
        out = []
        for q in degrees:
            b = env["betas"][q].at(ctx)
            term = wedge(eta, b).scale(float(q - 1)) - lie_vec(ctx, J, b)
            out.append(term + wedge(omega, interior(theta_sharp, b)))
        return out

    return [
        IdentityCheck(
            id="lck/hopf_lck",
            geometry="hopf_lck",
            lhs=lhs,
            rhs=rhs,
            inputs={"betas": betas},
            seed=seed,
            atol=atol,
            rtol=rtol,
            jet_order=2,
        )
    ]


def _s_lck_constants(seed, atol, rtol):
    def lhs_tr_eta(ctx, env):
        eta = ctx.structure("eta")
        return trace(wedge_sv(eta, VecAltValue.identity(4)))

    def rhs_tr_eta(ctx, env):
        return ctx.structure("eta").scale(-3.0)

    def lhs_tr_theta(ctx, env):
        return trace(wedge_sv(ctx.structure("theta"), ctx.structure("J")))

    def rhs_tr_theta(ctx, env):
        return ctx.structure("eta")

    def lhs_delta(ctx, env):
        return codiff(ctx, ctx.geometry.forms["Omega"].at(ctx))

    def rhs_delta(ctx, env):
        return -ctx.structure("eta")

    def lhs_diamond(ctx, env):
        return omega_diamond(ctx, ctx.geometry.forms["Omega"].at(ctx))

    def rhs_diamond(ctx, env):
        omega = ctx.geometry.forms["Omega"].at(ctx)
        eta = ctx.structure("eta")
        theta_sharp = sharp_field(ctx, ctx.structure("theta"))
        return -wedge_sv(eta, VecAltValue.identity(4)) - wedge_sv(omega, theta_sharp)

    sides = [
        ("trace-eta-id", lhs_tr_eta, rhs_tr_eta, 0),
        ("trace-theta-J", lhs_tr_theta, rhs_tr_theta, 0),
        ("delta-Omega", lhs_delta, rhs_delta, 2),
        ("Omega-diamond", lhs_diamond, rhs_diamond, 2),
    ]
    return [
        IdentityCheck(
            id=f"lck-constants/hopf_lck/{label}",
            geometry="hopf_lck",
            lhs=lhs,
            rhs=rhs,
            seed=seed,
            atol=atol,
            rtol=rtol,
            jet_order=order,
        )
        for label, lhs, rhs, order in sides
    ]


def _s_quasi_sasakian(seed, atol, rtol):
    checks = []
    for gname in ("sasakian_s3", "flat_cokahler(1)"):
        G = catalog.builtin(gname).geometry
        degrees = list(range(0, G.n + 1))
        betas = _betas(G, derive_seed(seed, gname, "qs"), degrees)

        def lhs(ctx, env, degrees=degrees):
            Phi = ctx.geometry.forms["Phi"].at(ctx)
            return [_comm_eps(ctx, Phi, env["betas"][q].at(ctx)) for q in degrees]

        def rhs(ctx, env, degrees=degrees):
            eta = ctx.structure("eta")
            phi = ctx.structure("phi")
            A = _amatrix(ctx)
            trA = _scalar(trace(A))
            out = []
            for q in degrees:
                b = env["betas"][q].at(ctx)
                term = wedge(eta, b).scale(trA).scale(-1.0) - lie_vec(ctx, phi, b)
                out.append(term + wedge(eta, interior(A, b)).scale(2.0))
            return out

        checks.append(
            IdentityCheck(
                id=f"quasi-sasakian/{gname}",
                geometry=gname,
                lhs=lhs,
                rhs=rhs,
                inputs={"betas": betas},
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _s_sasakian(seed, atol, rtol):
    G = catalog.builtin("sasakian_s3").geometry
    degrees = [0, 1, 2, 3]
    betas = _betas(G, derive_seed(seed, "sas"), degrees)

    def lhs(ctx, env, degrees=degrees):
        Phi = ctx.geometry.forms["Phi"].at(ctx)
        return [_comm_eps(ctx, Phi, env["betas"][q].at(ctx)) for q in degrees]

    def rhs(ctx, env, degrees=degrees):
        eta = ctx.structure("eta")
        phi = ctx.structure("phi")
        Id = VecAltValue.identity(3)
        out = []
        for q in degrees:
            b = env["betas"][q].at(ctx)
            term = wedge(eta, b).scale(2.0) - lie_vec(ctx, phi, b)
            out.append(term - wedge(eta, interior(Id, b)).scale(2.0))
        return out

    return [
        IdentityCheck(
            id="sasakian/sasakian_s3",
            geometry="sasakian_s3",
            lhs=lhs,
            rhs=rhs,
            inputs={"betas": betas},
            seed=seed,
            atol=atol,
            rtol=rtol,
            jet_order=2,
        )
    ]


def _s_sasakian_constants(seed, atol, rtol):
    def lhs_a(ctx, env):
        return _amatrix(ctx)

    def rhs_a(ctx, env):
        eta = ctx.structure("eta")
        xi = ctx.structure("xi")
        return wedge_sv(eta, xi) - VecAltValue.identity(3)

    def lhs_tr(ctx, env):
        return trace(_amatrix(ctx))

    def rhs_tr(ctx, env):
        return AltValue(3, 0, {(): -2.0})

    def lhs_delta(ctx, env):
        return codiff(ctx, ctx.geometry.forms["Phi"].at(ctx))

    def rhs_delta(ctx, env):
        return ctx.structure("eta").scale(2.0)

    def lhs_diamond(ctx, env):
        return omega_diamond(ctx, ctx.geometry.forms["Phi"].at(ctx))

    def rhs_diamond(ctx, env):
        return wedge_sv(ctx.structure("eta"), _amatrix(ctx)).scale(-2.0)

    sides = [
        ("A-matrix", lhs_a, rhs_a),
        ("trace-A", lhs_tr, rhs_tr),
        ("delta-Phi", lhs_delta, rhs_delta),
        ("Phi-diamond", lhs_diamond, rhs_diamond),
    ]
    return [
        IdentityCheck(
            id=f"sasakian-constants/sasakian_s3/{label}",
            geometry="sasakian_s3",
            lhs=lhs,
            rhs=rhs,
            seed=seed,
            atol=atol,
            rtol=rtol,
            jet_order=2,
        )
        for label, lhs, rhs in sides
    ]


def _s_cokahler(seed, atol, rtol):
    checks = []
    for gname in ("flat_cokahler(1)", "flat_cokahler(2)"):
        G = catalog.builtin(gname).geometry
        degrees = list(range(0, G.n + 1))
        betas = _betas(G, derive_seed(seed, gname, "cok"), degrees)

        def lhs(ctx, env, degrees=degrees):
            Phi = ctx.geometry.forms["Phi"].at(ctx)
            return [_comm_eps(ctx, Phi, env["betas"][q].at(ctx)) for q in degrees]

        def rhs(ctx, env, degrees=degrees):
            phi = ctx.structure("phi")
            return [
                -lie_vec(ctx, phi, env["betas"][q].at(ctx)) for q in degrees
            ]

        checks.append(
            IdentityCheck(
                id=f"cokahler/{gname}",
                geometry=gname,
                lhs=lhs,
                rhs=rhs,
                inputs={"betas": betas},
                seed=seed,
                atol=atol,
                rtol=rtol,
                jet_order=2,
            )
        )
    return checks


def _s_kanemaki(seed, atol, rtol):
    def lhs(ctx, env):
        phi = ctx.structure("phi")
        out = [nabla_vec_coord(ctx, a, phi) for a in range(3)]
        # symmetry of A: g(A e_i, e_j) as a matrix, compared both ways
        A = _amatrix(ctx)
        g = ctx.g()
        sym = {}
        for i in range(3):
            for j in range(3):
                acc = 0.0
                for b in range(3):
                    acc = acc + g[b][j] * A.comps[b].coeffs.get((i,), 0.0)
                sym[(i, j)] = acc
        out.append(
            AltValue(3, 0, {(): max(abs(_jv(sym[(i, j)] - sym[(j, i)])) for i in range(3) for j in range(3))})
        )
        return out

    def rhs(ctx, env):
        eta = ctx.structure("eta")
        xi = ctx.structure("xi")
        A = _amatrix(ctx)
        g = ctx.g()
        xic = xi.as_vector()
        out = []
        for a in range(3):
            # (nabla_a phi)(Y) = eta(Y) A e_a - g(A e_a, Y) xi
            Aa = [A.comps[b].coeffs.get((a,), 0.0) for b in range(3)]
            comps = []
            for b in range(3):
                row = {}
                for c in range(3):
                    gAc = 0.0
                    for m in range(3):
                        gAc = gAc + g[m][c] * Aa[m]
                    v = eta.coeffs.get((c,), 0.0) * Aa[b] - gAc * xic[b]
                    row[(c,)] = v
                comps.append(AltValue(3, 1, row))
            out.append(VecAltValue(3, 1, comps))
        out.append(AltValue(3, 0, {(): 0.0}))
        return out

    return [
        IdentityCheck(
            id="kanemaki/sasakian_s3",
            geometry="sasakian_s3",
            lhs=lhs,
            rhs=rhs,
            seed=seed,
            atol=atol,
            rtol=rtol,
            jet_order=2,
        )
    ]


def _jv(x):
    return x.value if isinstance(x, Jet) else float(x)


SUITES = {
    "fn-contraction": _s_fn_contraction,
    "omegaiphi": _s_omegaiphi,
    "lie-wedge": _s_lie_wedge,
    "dsquared": _s_dsquared,
    "deltasquared": _s_deltasquared,
    "frame-independence": _s_frame_independence,
    "curvature-dnabla2": _s_curvature_dnabla2,
    "omegacov": _s_omegacov,
    "diamond-consistency": _s_diamond_consistency,
    "delta-trace": _s_delta_trace,
    "main-covariant": _s_main_covariant,
    "main-lie": _s_main_lie,
    "goldberg": _s_goldberg,
    "fn-decompose-roundtrip": _s_fn_decompose,
    "parallel-anticommute": _s_parallel_anticommute,
    "killing-anticommute": _s_killing_anticommute,
    "killing-negative": _s_killing_negative,
    "parallel-negative": _s_parallel_negative,
    "kahler": _s_kahler,
    "lck": _s_lck,
    "lck-constants": _s_lck_constants,
    "quasi-sasakian": _s_quasi_sasakian,
    "sasakian": _s_sasakian,
    "sasakian-constants": _s_sasakian_constants,
    "cokahler": _s_cokahler,
    "kanemaki": _s_kanemaki,
}


STRUCTURAL_SUITES = [
    "fn-contraction",
    "omegaiphi",
    "lie-wedge",
    "dsquared",
    "deltasquared",
    "frame-independence",
    "curvature-dnabla2",
    "omegacov",
    "diamond-consistency",
    "delta-trace",
]


def inline_checks(G, seed=DEFAULT_SEED, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL,
                  n_points=None):
    """Checks applicable to an arbitrary loaded geometry: the structural
    suites plus both forms of the commutator identity, on G alone."""
    checks = []
    for name in STRUCTURAL_SUITES:
        checks.extend(SUITES[name](seed, atol, rtol, geoms=[G]))
    checks.extend(_main_checks(seed, atol, rtol, covariant=True, geoms=[G]))
    checks.extend(_main_checks(seed, atol, rtol, covariant=False, geoms=[G]))
    reports = []
    for check in checks:
        if n_points is not None and check.points is None:
            check.n_points = n_points
        reports.append(run_check(check))
    return reports


def suite(names="all", seed=DEFAULT_SEED, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL,
          n_points=None):
    """Run the named built-in suites (or all of them) and return reports."""
    if names == "all":
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    reports = []
    for name in names:
        if name not in SUITES:
            raise UnknownSuite(f"unknown suite {name!r}")
        for check in SUITES[name](seed, atol, rtol):
            if n_points is not None and check.points is None:
                check.n_points = n_points
            reports.append(run_check(check))
    return reports


def all_pass(reports):
    return all(r["pass"] for r in reports)
