"""Weighted area integrals over curve interiors."""

from __future__ import annotations

import numpy as np

from ..errors import NumericError
from .curve import BoundaryCurve

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre_01(n: int):
    """Gauss-Legendre nodes/weights on (0, 1), cached."""
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]


def _radial_value(curve: BoundaryCurve, density, n_theta: int, n_r: int) -> float:
    phi, rho, _ = curve.radial_function(n_theta)
    x, w = gauss_legendre_01(n_r)
    r = rho[:, None] * x[None, :]
    z = r * np.exp(1j * phi)[:, None]
    f = np.asarray(density(z.ravel()), dtype=float).reshape(z.shape)
    ray = np.sum(f * r * (rho[:, None] * w[None, :]), axis=1)
    return float(ray.sum() * 2.0 * np.pi / n_theta)


def area_wrt(curve: BoundaryCurve, density, tol: float = 1e-9,
             conformal_map=None, n_theta: int = 128, n_r: int = 48,
             max_doublings: int = 4) -> float:
    """Integral of the density over the curve interior.

    Uses the conformal route when a map is supplied (exact in angle for the
    disc), otherwise radial-ray Gauss-Legendre quadrature from the origin for
    star-shaped curves.  Non-star-shaped curves without a supplied map get a
    map computed on the fly.  The result is accepted when doubling both node
    counts moves it by less than tol (Richardson-style error estimate);
    otherwise NumericError carries the estimate.

    Parameters
    ----------
    curve : BoundaryCurve
    density : callable
        Vectorized map from complex samples to nonnegative weights.
    """
    if conformal_map is None and not curve.is_star_shaped():
        from ..conformal import riemann_map
        conformal_map = riemann_map(curve)
    if conformal_map is not None:
        return conformal_map.integrate(density, tol=tol, n_theta=n_theta,
                                       n_r=n_r, max_doublings=max_doublings)
    prev = _radial_value(curve, density, n_theta, n_r)
    for _ in range(max_doublings):
        n_theta *= 2
        n_r = int(1.5 * n_r)
        val = _radial_value(curve, density, n_theta, n_r)
        if abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
    raise NumericError("area quadrature did not converge",
                       residual=abs(val - prev))
