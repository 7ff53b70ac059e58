"""Tolerance comparison of alternating values, shared by catalog and verifier.

Pass criterion: abs_err <= atol + rtol * scale with
scale = max(|lhs coeff|, |rhs coeff|, 1); the scale floor avoids false
failures on near-zero identities and false passes on large magnitudes.
"""

from itertools import combinations

from .alt import AltValue, VecAltValue
from .jets import Jet

DEFAULT_ATOL = 1e-9
DEFAULT_RTOL = 1e-8


def _val(c):
    return c.value if isinstance(c, Jet) else float(c)


def alt_errors(lhs, rhs):
    """(max_abs_err, scale) between two AltValue/VecAltValue operands."""
    if isinstance(lhs, VecAltValue) or isinstance(rhs, VecAltValue):
        err = scale = 0.0
        for a, b in zip(lhs.comps, rhs.comps):
            e, s = alt_errors(a, b)
            err = max(err, e)
            scale = max(scale, s)
        return err, scale
    err = scale = 0.0
    for key in set(lhs.coeffs) | set(rhs.coeffs):
        a = _val(lhs.coeffs.get(key, 0.0))
        b = _val(rhs.coeffs.get(key, 0.0))
        err = max(err, abs(a - b))
        scale = max(scale, abs(a), abs(b))
    return err, scale


def within(lhs, rhs, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL):
    err, scale = alt_errors(lhs, rhs)
    return err <= atol + rtol * max(scale, 1.0)


def max_abs(value):
    if isinstance(value, VecAltValue):
        return max((max_abs(c) for c in value.comps), default=0.0)
    return max((abs(_val(c)) for c in value.coeffs.values()), default=0.0)


def all_basis(n, k):
    return combinations(range(n), k)


def zero_like(value):
    if isinstance(value, VecAltValue):
        return VecAltValue.zero(value.n, value.k)
    return AltValue.zero(value.n, value.k)
