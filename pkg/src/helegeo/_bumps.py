"""C-infinity cutoff and blending functions.

All constructions are built from the classic mollifier seed
``f(x) = exp(-1/x)`` for ``x > 0``, so every function here is smooth and
exactly constant outside its transition band (not merely to rounding).
"""

from __future__ import annotations

import numpy as np


def _seed(x):
    """exp(-1/x) for x > 0, exactly 0 for x <= 0 (vectorized, overflow-safe)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 1e-12
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smoothstep(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a = _seed(x)
    b = _seed(1.0 - x)
    return a / (a + b + 1e-300)


def step_between(x, a, b):
    """Smooth step rising 0 -> 1 across [a, b].

    For b < a the step falls 1 -> 0 across [b, a].
    """
    if b == a:
        return np.where(np.asarray(x, dtype=float) >= a, 1.0, 0.0)
    return smoothstep((np.asarray(x, dtype=float) - a) / (b - a))


def plateau(x, a, b, c, d):
    """Smooth plateau: 0 outside [a, d], exactly 1 on [b, c]."""
    return step_between(x, a, b) * step_between(x, d, c)


def _sign_profile(u):
    """Odd C-infinity profile equal to sign(u) exactly for |u| >= 1."""
    return 2.0 * smoothstep(0.5 * (np.asarray(u, dtype=float) + 1.0)) - 1.0


# 32-point Gauss-Legendre rule on [0, 1]; the blend integrand is analytic
# inside the band so this evaluates the integral to machine precision.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _sign_integral(u):
    """integral of _sign_profile over [0, u] for u in [0, 1], vectorized."""
    u = np.asarray(u, dtype=float)
    nodes = u[..., None] * _GL_X
    return u * np.sum(_GL_W * _sign_profile(nodes), axis=-1)


_H_OFFSET = 1.0 - float(_sign_integral(np.array(1.0)))


def _habs(u):
    """Smooth even convex majorant of |u|, equal to |u| exactly for |u| >= 1.

    Its derivative is _sign_profile, so slopes stay within [-1, 1].
    """
    u = np.abs(np.asarray(u, dtype=float))
    out = np.array(u, dtype=float, copy=True)
    inner = u < 1.0
    if np.any(inner):
        out[inner] = _sign_integral(u[inner]) + _H_OFFSET
    return out


def smooth_max(a, b, mu):
    """C-infinity majorant of max(a, b); exact where |a - b| >= mu."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a - b
    return 0.5 * (a + b) + 0.5 * mu * _habs(d / mu)


def smooth_pos(x, w):
    """Smooth positive part: exactly 0 for x <= -w, exactly x for x >= w."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (x + w * _habs(x / w))


# --- real-analytic variants --------------------------------------------------
#
# The exp(-1/x) family above is C-infinity but not analytic, which limits the
# Fourier decay of curves built from it.  Where spectral representations
# matter (the tangency template) we use analytic profiles instead; their
# deviation from the exact step/max outside the transition band decays like
# exp(-scale), which is driven far below every tolerance in this package.

def tanh_step(x, sharp: float = 10.0):
    """Analytic monotone step: ~0 for x <= 0, ~1 for x >= 1 (tails ~ e^-2s)."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + np.tanh(sharp * (2.0 * x - 1.0)))


def tanh_step_between(x, a, b, sharp: float = 10.0):
    """Analytic step rising 0 -> 1 across [a, b] (falling if b < a)."""
    return tanh_step((np.asarray(x, dtype=float) - a) / (b - a), sharp)


def tanh_plateau(x, a, b, c, d, sharp: float = 10.0):
    """Analytic plateau: ~0 outside [a, d], ~1 on [b, c]."""
    return tanh_step_between(x, a, b, sharp) * tanh_step_between(x, d, c, sharp)


def soft_max_pair(a, b, w):
    """Analytic majorant of max(a, b): w*logaddexp(a/w, b/w)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return w * np.logaddexp(a / w, b / w)


def softplus(x, w):
    """Analytic positive part: w*log(1 + e^(x/w))."""
    x = np.asarray(x, dtype=float)
    return w * np.logaddexp(0.0, x / w)
