"""Pure-Python versions of the compiled loops, used when the extension is absent."""

import math

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF


def speed_profile(s, kappa, vcap, a_max):
    """Forward/backward pass for the fastest speed along a curve.

    Starting from rest, the speed at each arc-length node is the largest
    value reachable under the acceleration budget left after the centripetal
    term ``kappa v^2``, capped by ``vcap`` and by what can still be braked
    down to the caps further along.
    """
    s = np.asarray(s, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    vcap = np.asarray(vcap, dtype=float)
    n = s.size
    v = [0.0] * n
    aa = a_max * a_max
    for j in range(n - 1):
        c = kappa[j] * v[j] * v[j]
        a = math.sqrt(max(aa - c * c, 0.0))
        v[j + 1] = min(math.sqrt(v[j] * v[j] + 2.0 * a * (s[j + 1] - s[j])), vcap[j + 1])
    for j in range(n - 2, -1, -1):
        c = kappa[j + 1] * v[j + 1] * v[j + 1]
        a = math.sqrt(max(aa - c * c, 0.0))
        w = math.sqrt(v[j + 1] * v[j + 1] + 2.0 * a * (s[j + 1] - s[j]))
        if w < v[j]:
            v[j] = w
    return np.array(v)


def arrival_times(s, v):
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    vs = v[1:] + v[:-1]
    with np.errstate(divide="ignore"):
        dt = np.where(vs > 0, 2.0 * np.diff(s) / vs, np.inf)
    return np.concatenate(([0.0], np.cumsum(dt)))


def fnv1a64(data):
    h = _FNV_OFFSET
    for byte in bytes(data):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK
    return h
