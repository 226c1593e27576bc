"""Quadrature helpers for the logarithmic kernel.

Two regimes: spectrally accurate pointwise integrals (polar coordinates
around the singularity with graded radial panels), and grid-wide potentials
by FFT convolution with a product-integration kernel whose near field uses
exact cell integrals of log|.|^2.
"""

from __future__ import annotations

import numpy as np

from .flow_geometry.area import gauss_legendre_01

TWO_PI = 2.0 * np.pi

# --- exact cell integrals of log|z|^2 over unit cells at integer offsets ----

_NEAR = 2  # offsets with |i|,|j| <= _NEAR get exact cell integrals


def _cell_integral_log(ox: int, oy: int) -> float:
    """integral of log(x^2+y^2) over the unit square centered at (ox, oy)."""
    if ox == 0 and oy == 0:
        # polar decomposition of the centered unit square (8-fold symmetry)
        x, w = np.polynomial.legendre.leggauss(64)
        th = 0.25 * np.pi * 0.5 * (x + 1.0)
        wth = 0.25 * np.pi * 0.5 * w
        R = 0.5 / np.cos(th)
        vals = 2.0 * (R ** 2 * np.log(R) / 2.0 - R ** 2 / 4.0) * 2.0
        return float(8.0 * np.sum(wth * vals))
    x, w = np.polynomial.legendre.leggauss(24)
    xs = ox + 0.5 * x
    ys = oy + 0.5 * x
    W = np.outer(w, w) * 0.25
    vals = np.log(xs[:, None] ** 2 + ys[None, :] ** 2)
    return float(np.sum(W * vals))


_NEAR_TABLE = {(i, j): _cell_integral_log(i, j)
               for i in range(-_NEAR, _NEAR + 1)
               for j in range(-_NEAR, _NEAR + 1)}


def log_kernel(n: int, h: float) -> np.ndarray:
    """Product-integration kernel K[dy, dx] for offsets in (-n, n)^2.

    K approximates the cell integral of log|.|^2 about each offset: exact
    integrals in the near field, midpoint h^2 log elsewhere.  Scaling:
    integral over a cell of side h at offset (i, j)h equals
    h^2 (log h^2 + C_ij) with C_ij the unit-cell constant.
    """
    idx = np.arange(-(n - 1), n)
    dx, dy = np.meshgrid(idx, idx, indexing="xy")
    with np.errstate(divide="ignore"):
        K = h * h * np.log((h * h) * (dx ** 2 + dy ** 2).astype(float))
    for (i, j), c in _NEAR_TABLE.items():
        K[(dy == j) & (dx == i)] = h * h * (np.log(h * h) + c)
    return K


class GridLogPotential:
    """FFT convolution of grid densities with the log kernel (kernel cached)."""

    def __init__(self, n: int, h: float):
        self.n, self.h = n, h
        K = log_kernel(n, h)
        self._shape = (2 * n - 1 + 1, 2 * n - 1 + 1)  # padded even size
        Kp = np.zeros(self._shape)
        Kp[: 2 * n - 1, : 2 * n - 1] = K
        self._Khat = np.fft.rfft2(Kp)

    def apply(self, density: np.ndarray) -> np.ndarray:
        """U[iy, ix] = sum over cells of density * cell-integral of log|.|^2."""
        n = self.n
        rho = np.zeros(self._shape)
        rho[:n, :n] = density
        conv = np.fft.irfft2(np.fft.rfft2(rho) * self._Khat, s=self._shape)
        return conv[n - 1: 2 * n - 1, n - 1: 2 * n - 1]


_POTENTIAL_CACHE: dict[tuple[int, float], GridLogPotential] = {}


def grid_log_potential(density: np.ndarray, h: float) -> np.ndarray:
    n = density.shape[0]
    key = (n, round(h, 15))
    if key not in _POTENTIAL_CACHE:
        _POTENTIAL_CACHE[key] = GridLogPotential(n, h)
        if len(_POTENTIAL_CACHE) > 6:
            _POTENTIAL_CACHE.pop(next(iter(_POTENTIAL_CACHE)))
    return _POTENTIAL_CACHE[key].apply(density)


# --- pointwise integrals -----------------------------------------------------

def _radial_panels(n_panels: int = 24, n_gl: int = 16):
    """Geometrically graded Gauss-Legendre nodes on (0, 1] (cached)."""
    key = (n_panels, n_gl)
    if key not in _PANEL_CACHE:
        x, w = gauss_legendre_01(n_gl)
        edges = 2.0 ** -np.arange(n_panels + 1, dtype=float)
        edges = edges[::-1]
        nodes, weights = [], []
        lo = 0.0
        for hi in edges:
            nodes.append(lo + (hi - lo) * x)
            weights.append((hi - lo) * w)
            lo = hi
        _PANEL_CACHE[key] = (np.concatenate(nodes), np.concatenate(weights))
    return _PANEL_CACHE[key]


_PANEL_CACHE: dict = {}


def disc_integral(weight, radius: float = 1.0, tol: float = 1e-10,
                  n_alpha: int = 128, n_r: int = 48,
                  max_doublings: int = 4) -> float:
    """integral of a smooth weight over the disc |zeta| < radius."""
    prev = None
    val = None
    for _ in range(max_doublings + 1):
        x, wgl = gauss_legendre_01(n_r)
        alpha = TWO_PI * np.arange(n_alpha) / n_alpha
        r = radius * x
        pts = r[:, None] * np.exp(1j * alpha)[None, :]
        wt = np.asarray(weight(pts.ravel()), dtype=float).reshape(pts.shape)
        val = float((radius * wgl * r).dot(wt).sum() * TWO_PI / n_alpha)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        n_alpha *= 2
        n_r = int(1.5 * n_r)
    return val


def disc_log_integral(z: complex, radius: float, weight, tol: float = 1e-10,
                      n_alpha: int = 128, max_doublings: int = 4) -> float:
    """integral over |zeta| < radius of weight(zeta) log|z - zeta|^2 dA.

    For z inside the disc the integration is polar about z with graded radial
    panels (the r log r integrand is resolved to machine precision); for z
    outside, polar about the disc center.  The alpha direction doubles until
    the result is stable to tol.
    """
    z = complex(z)
    prev = None
    val = None
    for _ in range(max_doublings + 1):
        val = _disc_log_once(z, radius, weight, n_alpha)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        n_alpha *= 2
    return val


def _disc_log_once(z: complex, radius: float, weight, n_alpha: int) -> float:
    alpha = TWO_PI * np.arange(n_alpha) / n_alpha
    e = np.exp(1j * alpha)
    if abs(z) < radius * (1.0 - 1e-12):
        b = np.real(np.conj(z) * e)
        r_max = -b + np.sqrt(b * b + radius * radius - abs(z) ** 2)
        # relative radial nodes scaled per ray
        rel, wrel = _radial_panels()
        r = r_max[:, None] * rel[None, :]
        wq = r_max[:, None] * wrel[None, :]
        pts = z + r * e[:, None]
        wt = np.asarray(weight(pts.ravel()), dtype=float).reshape(pts.shape)
        with np.errstate(divide="ignore"):
            integrand = wt * 2.0 * np.log(np.where(r > 0, r, 1.0)) * r
        return float(np.sum(integrand * wq) * TWO_PI / n_alpha)
    # z outside (or on): smooth integrand over the disc, polar about center
    n_r = max(48, n_alpha // 2)
    x, wgl = gauss_legendre_01(n_r)
    r = radius * x
    pts = r[:, None] * e[None, :]
    wt = np.asarray(weight(pts.ravel()), dtype=float).reshape(pts.shape)
    logk = np.log(np.abs(z - pts) ** 2)
    return float((radius * wgl * r).dot(wt * logk).sum() * TWO_PI / n_alpha)


def map_log_integral(conformal_map, z: complex, weight, tol: float = 1e-9,
                     n_alpha: int = 128, max_doublings: int = 3) -> float:
    """integral over the map's image domain of weight(zeta) log|z-zeta|^2 dA.

    Pulled back to the disc: the kernel splits into log|w - w*|^2 (handled by
    the polar-disc routine) plus a bounded correction log|(f(w)-z)/(w-w*)|^2,
    where w* is the preimage of z.  For z outside the image only the smooth
    direct form is integrated.
    """
    fmap = conformal_map

    def pullback(wp):
        return (np.asarray(weight(fmap.f(wp)), dtype=float)
                * np.abs(fmap.fprime(wp)) ** 2)

    inside = bool(fmap.curve.contains(np.atleast_1d(z))[0])
    if not inside:
        def smooth(wp):
            return pullback(wp) * np.log(np.abs(fmap.f(wp) - z) ** 2)
        return disc_integral(smooth, 1.0, tol=tol, n_alpha=n_alpha,
                             max_doublings=max_doublings)
    w_star = fmap.inverse(z)

    part1 = disc_log_integral(w_star, 1.0, pullback, tol=tol,
                              n_alpha=n_alpha, max_doublings=max_doublings)

    def correction(wp):
        d = wp - w_star
        tiny = np.abs(d) < 1e-9
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = (fmap.f(wp) - z) / np.where(tiny, 1.0, d)
        if np.any(tiny):
            ratio = np.where(tiny, fmap.fprime(w_star), ratio)
        return pullback(wp) * np.log(np.abs(ratio) ** 2)

    part2 = disc_integral(correction, 1.0, tol=tol, n_alpha=n_alpha,
                          max_doublings=max_doublings)
    return part1 + part2
