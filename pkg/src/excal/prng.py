"""splitmix64 PRNG.

Bit-reproducible across platforms and runs; used for every sampling
decision (points, random form coefficients) so that reports are
deterministic given their seeds.
"""

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z):
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """The splitmix64 generator of Steele, Lea and Flood."""

    def __init__(self, seed):
        self._state = seed & _MASK

    def next_u64(self):
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self, lo=0.0, hi=1.0):
        """Uniform double in [lo, hi), using the top 53 bits."""
        u = (self.next_u64() >> 11) * (2.0 ** -53)
        return lo + (hi - lo) * u


def derive_seed(seed, *salts):
    """Deterministic sub-seed from a base seed and hashable salts.

    Each salt (int or str) is folded in through the splitmix64 mixer, so
    independent streams (per degree, per kind, ...) never collide in
    practice.
    """
    z = seed & _MASK
    for salt in salts:
        if isinstance(salt, str):
            for ch in salt.encode():
                z = _mix((z + _GAMMA + ch) & _MASK)
        else:
            z = _mix((z + _GAMMA + (int(salt) & _MASK)) & _MASK)
    return z
