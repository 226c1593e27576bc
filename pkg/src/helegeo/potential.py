"""Designer potentials and Hele-Shaw envelopes.

The potential synthesized from a permeability field is

    phi(z) = integral over |zeta| < C of log|z - zeta|^2
             (1/kappa(zeta) - 1/(pi (1+|zeta|^2)^2)) dA_zeta,

a proper integral once kappa matches the standard formula outside C.  The
envelope at level t is computed by two independent routes: the closed form

    psi_t(z) = phi(z) - integral over Omega_t of log|z-zeta|^2 dA/kappa
               + t log|z|^2   (= phi exactly off Omega_t),

and the largest grid subsolution below phi with spherical curvature bound,
solved as an obstacle problem by projected SOR on the smooth part
v = psi - t log|z|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quadrature import disc_log_integral, grid_log_potential, map_log_integral
from .conformal import riemann_map
from .errors import DomainError, NumericError
from .fields import ScalarField, fubini_study_density
from .flow_geometry import DomainFamily, ball_radius
from .permeability import PermeabilityField

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# closed forms of the fully standard scenario (radial oracles)
# ---------------------------------------------------------------------------

def standard_envelope(z, t: float):
    """Envelope of the standard flow: the C^{1,1}-matched radial profile."""
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    R2 = t / (1.0 - t)
    with np.errstate(divide="ignore"):
        inside = t * np.log(r2 / R2) + np.log((1.0 + R2) / (1.0 + r2))
    return np.where(r2 < R2, inside, 0.0)


def standard_ray(z, s):
    """Legendre transform of the standard envelopes: the explicit ray."""
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    s = np.asarray(s, dtype=float)
    return np.log1p(r2 * np.exp(s)) - np.log1p(r2) - s


def fs_disc_log_integral(z, radius: float):
    """Analytic integral over |zeta|<radius of log|z-zeta|^2 with the
    spherical density 1/(pi (1+|zeta|^2)^2)."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    mass = radius ** 2 / (1.0 + radius ** 2)
    inside = (mass * np.log(radius ** 2) - np.log1p(radius ** 2) + np.log1p(r2))
    with np.errstate(divide="ignore"):
        outside = mass * np.log(r2)
    return np.where(r2 <= radius ** 2, inside, outside)


# ---------------------------------------------------------------------------
# designer potential
# ---------------------------------------------------------------------------

def _sigma_weight(field: PermeabilityField):
    def sigma(z):
        return 1.0 / field.evaluate(z) - fubini_study_density(z)
    return sigma


def support_radius(field: PermeabilityField, probe: int = 24,
                   floor: float = 1e-11) -> float:
    """Radius beyond which 1/kappa matches the spherical density."""
    if field.outer_blend is None:
        raise DomainError("field has no outer patch: potential synthesis "
                          "requires a scenario standardized near infinity")
    r_hi = field.outer_blend[1]
    sigma = _sigma_weight(field)
    radii = np.linspace(field.inner_blend[0] * 0.5, r_hi, probe * 8)
    th = TWO_PI * np.arange(probe) / probe
    vals = np.abs(sigma((radii[:, None] * np.exp(1j * th)[None, :]).ravel()))
    vals = vals.reshape(len(radii), probe).max(axis=1)
    big = np.nonzero(vals > floor)[0]
    if len(big) == 0:
        return field.inner_blend[0]
    return float(min(radii[big[-1]] * 1.05 + 0.05, r_hi))


def synthesize_phi(field: PermeabilityField, z, tol: float = 1e-9,
                   radius: float | None = None):
    """Pointwise designer potential (spectrally accurate polar quadrature)."""
    C = radius if radius is not None else support_radius(field)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    pts = np.atleast_1d(z).ravel()
    sigma = _sigma_weight(field)
    out = np.array([disc_log_integral(complex(p), C, sigma, tol=tol)
                    for p in pts])
    return float(out[0]) if scalar else out.reshape(np.shape(z))


def synthesize_phi_grid(field: PermeabilityField, L: float, n: int,
                        radius: float | None = None) -> ScalarField:
    """Designer potential on a grid window by FFT log-convolution.

    The convolution is carried out on a grid extended to cover the full
    support of the integrand, then cropped to the requested window.
    """
    C = radius if radius is not None else support_radius(field)
    h = 2.0 * L / (n - 1)
    extra = max(0, int(np.ceil((C + 2 * h - L) / h)))
    n_ext = n + 2 * extra
    L_ext = L + extra * h
    sigma = _sigma_weight(field)
    x = -L_ext + h * np.arange(n_ext)
    Z = x[None, :] + 1j * x[:, None]
    dens = np.zeros((n_ext, n_ext))
    mask = np.abs(Z) <= C
    dens[mask] = sigma(Z[mask])
    U = grid_log_potential(dens, h)
    off = (n_ext - n) // 2
    vals = U[off: off + n, off: off + n]
    return ScalarField(vals, x0=-L, y0=-L, h=h)


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

def envelope_closed(field: PermeabilityField, family: DomainFamily, t: float,
                    z, phi_value=None, tol: float = 1e-9,
                    conformal_map=None):
    """Envelope by the closed form; equals phi exactly off Omega_t.

    phi_value may carry precomputed potential values at z (else synthesized
    pointwise).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    pts = np.atleast_1d(z).ravel()
    if np.any(pts == 0):
        raise DomainError("envelope_closed requires z != 0")
    if phi_value is None:
        phi_vals = np.atleast_1d(synthesize_phi(field, pts, tol=tol))
    else:
        phi_vals = np.atleast_1d(np.asarray(phi_value, dtype=float)).ravel()
    inside = np.atleast_1d(family.inside(pts, float(t)))
    out = np.array(phi_vals, dtype=float)
    if np.any(inside):
        if conformal_map is None:
            conformal_map = riemann_map(family.curve_at(float(t)),
                                        stall_floor=1e-6, validate=False)
        inv_kappa = lambda q: 1.0 / field.evaluate(q)
        for i in np.nonzero(inside)[0]:
            I = map_log_integral(conformal_map, complex(pts[i]), inv_kappa,
                                 tol=tol)
            out[i] = phi_vals[i] - I + t * np.log(np.abs(pts[i]) ** 2)
    return float(out[0]) if scalar else out.reshape(np.shape(z))


def envelope_closed_grid(field: PermeabilityField, family: DomainFamily,
                         t: float, phi: ScalarField,
                         coverage_subsample: int = 4) -> ScalarField:
    """Envelope on the potential's grid by FFT log-convolution.

    The indicator of Omega_t is rasterized with coverage-weighted boundary
    cells; the returned field stores the smooth part v = psi - t log|z|^2.
    """
    Z = phi.mesh()
    dens = np.zeros(Z.shape)
    inside = family.inside(Z.ravel(), float(t)).reshape(Z.shape)
    band = _boundary_band(inside)
    carriers = inside | band
    dens[carriers] = 1.0 / field.evaluate(Z[carriers])
    cov = inside.astype(float)
    cov[band] = _coverage_fractions(family, t, phi, band, coverage_subsample)
    dens *= cov
    U = grid_log_potential(dens, phi.h)
    v = phi.values - U
    return phi.copy_with(v, pole_coefficient=float(t))


def _boundary_band(inside):
    """Cells within one step of the boundary (either side)."""
    grown = inside.copy()
    grown[1:, :] |= inside[:-1, :]
    grown[:-1, :] |= inside[1:, :]
    grown[:, 1:] |= inside[:, :-1]
    grown[:, :-1] |= inside[:, 1:]
    return (grown ^ inside) | (inside & ~_erode(inside))


def _coverage_fractions(family, t, phi: ScalarField, band, sub: int):
    """Covered-area fraction of each band cell, by subsampling."""
    iy, ix = np.nonzero(band)
    if len(ix) == 0:
        return np.zeros(0)
    x, y = phi.axes()
    offs = (np.arange(sub) + 0.5) / sub - 0.5
    OX, OY = np.meshgrid(offs, offs)
    pts = ((x[ix][:, None] + OX.ravel()[None, :] * phi.h)
           + 1j * (y[iy][:, None] + OY.ravel()[None, :] * phi.h))
    ins = family.inside(pts.ravel(), float(t)).reshape(pts.shape)
    return ins.mean(axis=1)


def _erode(mask):
    out = mask.copy()
    out[1:, :] &= mask[:-1, :]
    out[:-1, :] &= mask[1:, :]
    out[:, 1:] &= mask[:, :-1]
    out[:, :-1] &= mask[:, 1:]
    return out


# ---------------------------------------------------------------------------
# obstacle-problem envelope
# ---------------------------------------------------------------------------

@dataclass
class ObstacleResult:
    """Envelope field (smooth part, pole t) with its coincidence set."""
    field: ScalarField
    coincidence: np.ndarray
    sweeps: int
    residual: float


def envelope_obstacle(phi: ScalarField, t: float, omega: float | None = None,
                      tol: float = 1e-10, max_sweeps: int = 100_000,
                      cascade: bool = True) -> ObstacleResult:
    """Largest grid function u <= phi with spherical curvature bound.

    Solved by projected red-black SOR on the smooth part v = u - t log|z|^2:
    the discrete constraints are v <= phi - t log|z|^2 and
    (1/4 pi) Lap_h v + 1/(pi (1+|z|^2)^2) >= 0 with complementarity.  Frame
    values are Dirichlet (= the obstacle, exact when Omega_t is interior to
    the window).  Returns the envelope and its coincidence set.
    """
    Z = phi.mesh()
    with np.errstate(divide="ignore"):
        pole = np.log(np.abs(Z) ** 2)
    obstacle = phi.values - t * pole          # +inf at an exact origin node
    obstacle[np.isinf(pole) & (pole < 0)] = np.inf
    rho = fubini_study_density(Z)
    levels = [(obstacle, rho, phi.h)]
    if cascade:
        step = 1
        while levels[-1][0].shape[0] >= 129 and (levels[-1][0].shape[0] - 1) % 2 == 0:
            ob, rr, hh = levels[-1]
            levels.append((ob[::2, ::2], rr[::2, ::2], 2 * hh))
            step += 1
    v = None
    sweeps_total = 0
    res = np.inf
    for ob, rr, hh in reversed(levels):
        if v is None:
            v = np.where(np.isfinite(ob), ob, 0.0).copy()
            v[~np.isfinite(ob)] = np.nanmin(ob[np.isfinite(ob)])
        else:
            v = _prolong(v)
            v = np.minimum(v, ob)
        is_top = ob is levels[0][0]
        lv_tol = tol if is_top else max(tol, 1e-8)
        v, sw, res = _psor(v, ob, rr, hh, omega, lv_tol,
                           max_sweeps if is_top else 4000)
        sweeps_total += sw
    if res > tol * 10:
        raise NumericError("obstacle solver did not reach tolerance",
                           residual=res)
    out = phi.copy_with(v, pole_coefficient=float(t))
    coincidence = np.isclose(v, obstacle, rtol=0.0, atol=1e-9)
    return ObstacleResult(out, coincidence, sweeps_total, res)


def _prolong(v):
    n = 2 * (v.shape[0] - 1) + 1
    out = np.empty((n, n))
    out[::2, ::2] = v
    out[1::2, ::2] = 0.5 * (v[:-1, :] + v[1:, :])
    out[::2, 1::2] = 0.5 * (v[:, :-1] + v[:, 1:])
    out[1::2, 1::2] = 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])
    return out


def _psor(v, obstacle, rho, h, omega, tol, max_sweeps):
    """Projected red-black SOR; returns (v, sweeps, residual)."""
    n = v.shape[0]
    if omega is None:
        omega = 2.0 / (1.0 + np.sin(np.pi / n))
    c = 4.0 * np.pi * h * h * rho
    iy, ix = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    interior = (iy > 0) & (iy < n - 1) & (ix > 0) & (ix < n - 1)
    colors = [(interior & (((ix + iy) % 2) == p)) for p in (0, 1)]
    res = np.inf
    sweeps = 0
    check_every = 40
    while sweeps < max_sweeps:
        for mask in colors:
            nb = np.zeros_like(v)
            nb[1:-1, 1:-1] = (v[1:-1, 2:] + v[1:-1, :-2]
                              + v[2:, 1:-1] + v[:-2, 1:-1])
            target = 0.25 * (nb + c)
            upd = v + omega * (target - v)
            v = np.where(mask, np.minimum(obstacle, upd), v)
        sweeps += 1
        if sweeps % check_every == 0 or sweeps == max_sweeps:
            nb = np.zeros_like(v)
            nb[1:-1, 1:-1] = (v[1:-1, 2:] + v[1:-1, :-2]
                              + v[2:, 1:-1] + v[:-2, 1:-1])
            target = 0.25 * (nb + c)
            gs = np.minimum(obstacle, target)
            res = float(np.abs((gs - v)[interior]).max())
            if res < tol:
                break
    return v, sweeps, res


def recover_domain(psi: ScalarField, phi: ScalarField,
                   threshold: float | None = None) -> np.ndarray:
    """Grid cells where the envelope detaches from the potential.

    threshold defaults to 1e-8 + 5 h^2.
    """
    if psi.values.shape != phi.values.shape:
        raise DomainError("fields must share a grid")
    if threshold is None:
        threshold = 1e-8 + 5.0 * psi.h ** 2
    Z = psi.mesh()
    with np.errstate(divide="ignore"):
        pole = np.log(np.abs(Z) ** 2)
    gap = phi.values - (psi.values + psi.pole_coefficient * pole)
    gap[~np.isfinite(gap)] = np.inf   # the origin node is always detached
    return gap > threshold


def masked_area(mask: np.ndarray, field_like: ScalarField, density) -> float:
    """Midpoint quadrature of the density over the marked cells."""
    Z = field_like.mesh()
    vals = np.zeros(Z.shape)
    vals[mask] = density(Z[mask])
    return float(vals.sum() * field_like.h ** 2)
