"""Darcy-law inversion: recover the permeability field from a domain family.

On each family slice the balance V = kappa * |dp/dn| determines kappa on the
boundary; with |dp/dn| = 1/(2 pi |f'|) from the Riemann map this gives

    kappa(gamma(theta, t)) = 2 pi V(theta, t) |f_t'(e^{i phi})|

at the boundary point with circle preimage angle phi.  Values are assembled
on the flow-adapted chart (t, conformal angle) and completed by the
closed-form patch pi (1+|z|^2)^2 near 0 (and near infinity when the scenario
is standard there), stitched with a partition of unity.
"""

from __future__ import annotations

import numpy as np

from . import _fourier as fourier
from ._bumps import step_between
from .conformal import ConformalMap, riemann_map
from .errors import DomainError, NumericError, ScenarioError
from .flow_geometry import DomainFamily, TangencyFamily, standard_kappa

TWO_PI = 2.0 * np.pi


class PermeabilityField:
    """kappa > 0 on the swept annulus plus closed-form patches.

    Attributes
    ----------
    t_grid : array
        Family times with successfully extracted slices.
    maps : list of ConformalMap
    log_kappa : array, shape (n_t, m)
        log kappa at the slice boundary points f_t(e^{i phi_j}).
    cap_time : float or None
        For tangency families, the largest time the conformal solver
        certified; slices above it are not represented.
    """

    def __init__(self, family: DomainFamily, t_grid, maps, log_kappa,
                 inner_blend, outer_blend, cap_time=None):
        self.family = family
        self.t_grid = np.asarray(t_grid, dtype=float)
        self.maps = list(maps)
        self.log_kappa = np.asarray(log_kappa, dtype=float)
        self.m = self.log_kappa.shape[1]
        self.inner_blend = inner_blend      # (r_patch, r_chart)
        self.outer_blend = outer_blend      # (r_chart, r_patch) or None
        self.cap_time = cap_time
        # spectral representations per slice
        self._k_coeffs = np.fft.fft(self.log_kappa, axis=1) / self.m
        # correspondence inverse phi(theta) - theta as Fourier on uniform theta
        th_uniform = TWO_PI * np.arange(self.m) / self.m
        devs = []
        for mp in self.maps:
            phi_grid = TWO_PI * np.arange(mp.m) / mp.m
            raw = mp.theta - phi_grid
            raw -= TWO_PI * np.round(np.mean(raw) / TWO_PI)
            if np.max(np.abs(raw)) < 1e-12:
                devs.append(np.zeros(self.m))
                continue
            phi_at = mp.correspondence_inverse(th_uniform)
            dev = phi_at - th_uniform
            dev -= TWO_PI * np.round(np.mean(dev) / TWO_PI)
            devs.append(dev)
        self._phi_dev = np.stack(devs)       # (n_t, m) on uniform theta grid
        self._phi_dev_coeffs = np.fft.fft(self._phi_dev, axis=1) / self.m

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, z, fill: float | None = None):
        """kappa at complex points (patches, blend zones, or chart).

        Points covered by no chart slice and no patch raise DomainError,
        unless a fill value is given.
        """
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        zf = np.atleast_1d(z).ravel()
        out = np.full(zf.shape, np.nan)
        r = np.abs(zf)
        r_in_patch, r_in_chart = self.inner_blend
        inner = r <= r_in_patch
        out[inner] = standard_kappa(zf[inner])
        blend_in = (~inner) & (r < r_in_chart)
        chart_hi = np.inf
        if self.outer_blend is not None:
            r_out_chart, r_out_patch = self.outer_blend
            outer = r >= r_out_patch
            out[outer] = standard_kappa(zf[outer])
            blend_out = (~outer) & (r > r_out_chart)
            chart_zone = ~(inner | blend_in | outer | blend_out)
        else:
            outer = np.zeros(zf.shape, dtype=bool)
            blend_out = outer
            chart_zone = ~(inner | blend_in)
        todo = chart_zone | blend_in | blend_out
        if np.any(todo):
            chart_vals = self._chart_values(zf[todo])
            tmp = np.full(zf.shape, np.nan)
            tmp[todo] = chart_vals
            out[chart_zone] = tmp[chart_zone]
            if np.any(blend_in):
                w = step_between(r[blend_in], r_in_patch, r_in_chart)
                out[blend_in] = ((1.0 - w) * standard_kappa(zf[blend_in])
                                 + w * tmp[blend_in])
            if np.any(blend_out):
                w = step_between(r[blend_out], r_out_patch, r_out_chart)
                out[blend_out] = ((1.0 - w) * standard_kappa(zf[blend_out])
                                  + w * tmp[blend_out])
        if np.any(np.isnan(out)):
            if fill is None:
                raise DomainError("point outside the represented region "
                                  "(no chart slice and no patch covers it)")
            out[np.isnan(out)] = fill
        return float(out[0]) if scalar else out.reshape(np.shape(z))

    def _exit_times(self, z):
        sc = self.family.scenario
        if sc is not None and hasattr(sc, "exit_time_exact"):
            return np.asarray(sc.exit_time_exact(z), dtype=float)
        t, _ = self.family.exit_times(z)
        return t

    def _curve_parameter(self, z, t_star):
        """Curve parameter of each z on the boundary through it."""
        sc = self.family.scenario
        if sc is not None and hasattr(sc, "alpha"):
            return np.angle(sc.alpha.inverse(z)) % TWO_PI
        if sc is not None and sc.__class__.__name__ == "StandardScenario":
            return np.angle(z) % TWO_PI
        # generic: nearest-sample seed + Newton on the interpolated curve
        out = np.empty(len(z))
        for i, (zi, ti) in enumerate(zip(z, t_star)):
            curve = self.family.curve_at(float(np.clip(ti, self.family.t_lo,
                                                       self.family.t_hi)))
            samples = curve.samples(2 * curve.cutoff)
            th = TWO_PI * np.arange(len(samples)) / len(samples)
            j = int(np.argmin(np.abs(samples - zi)))
            theta = th[j]
            for _ in range(6):
                g = curve.gamma(theta) - zi
                dg = curve.dgamma(theta)
                theta = theta - np.real(g * np.conj(dg)) / np.abs(dg) ** 2
            out[i] = theta % TWO_PI
        return out

    def _chart_values(self, z):
        """kappa through the (t, conformal angle) chart with log-cubic in t."""
        raw_t = self._exit_times(z)
        pad = self.t_grid[-1] - self.t_grid[-2]
        t_star = np.clip(raw_t, self.t_grid[0], self.t_grid[-1])
        beyond = raw_t > self.t_grid[-1] + pad
        theta_star = self._curve_parameter(z, t_star)
        tg = self.t_grid
        j = np.clip(np.searchsorted(tg, t_star) - 1, 0, len(tg) - 2)
        lo = np.clip(j - 1, 0, len(tg) - 4)
        out = np.empty(len(z))
        for base in np.unique(lo):
            sel = lo == base
            idx = np.arange(base, base + 4)
            ts = tg[idx]
            zt = t_star[sel]
            th = theta_star[sel]
            vals = np.zeros((4, int(sel.sum())))
            for a, slice_i in enumerate(idx):
                dev = np.real(fourier.evaluate(self._phi_dev_coeffs[slice_i], th))
                phi = th + dev
                vals[a] = np.real(fourier.evaluate(self._k_coeffs[slice_i], phi))
            w = _lagrange_weights(ts, zt)
            out[sel] = np.exp(np.sum(w * vals, axis=0))
        out[beyond] = np.nan
        return out

    def chart_points(self):
        """Boundary positions and kappa values of the whole chart (cloud)."""
        pos = np.concatenate([mp.boundary_values() for mp in self.maps])
        val = np.exp(self.log_kappa).ravel()
        return pos, val


def _lagrange_weights(ts, t):
    """Cubic Lagrange weights through 4 nodes, vectorized over t."""
    t = np.asarray(t, dtype=float)
    w = np.ones((4, len(t)))
    for a in range(4):
        for b in range(4):
            if a != b:
                w[a] *= (t - ts[b]) / (ts[a] - ts[b])
    return w




def extract_kappa(family: DomainFamily, tol: float = 1e-10,
                  min_fprime: float = 1e-8, stall_floor: float = 1e-6
                  ) -> PermeabilityField:
    """Invert the Darcy law over the family's t-grid.

    Slices are solved with warm-started boundary correspondences; for
    tangency families the extraction stops at the last slice whose map is
    certified (recorded as cap_time).

    Raises
    ------
    ScenarioError
        If the normal velocity is not strictly positive on a represented
        slice.
    """
    is_tangency = isinstance(family, TangencyFamily)
    sc = family.scenario
    t_grid = family.t_grid
    t_top = family.T - 1e-3 * family.T if is_tangency else np.inf
    maps: list[ConformalMap] = []
    logk = []
    kept_t = []
    theta0 = None
    cap_time = None
    for i, t in enumerate(t_grid):
        if t > t_top:
            cap_time = kept_t[-1] if kept_t else None
            break
        curve = family.curves[i]
        try:
            mp = riemann_map(curve, theta0=theta0, tol=tol,
                             stall_floor=stall_floor, validate=False)
        except NumericError:
            if is_tangency and len(kept_t) > 3:
                cap_time = kept_t[-1]
                break
            raise
        if np.abs(mp.boundary_fprime()).min() < min_fprime:
            if is_tangency and len(kept_t) > 3:
                cap_time = kept_t[-1]
                break
            raise NumericError("boundary derivative below floor (crowding)",
                               residual=float(np.abs(mp.boundary_fprime()).min()))
        theta0 = mp.theta
        theta = mp.theta
        if sc is not None and hasattr(sc, "boundary_velocity"):
            v = np.asarray(sc.boundary_velocity(float(t), theta), dtype=float)
        else:
            v = np.asarray(family.normal_velocity(float(t), theta), dtype=float)
        if np.any(v <= 0):
            raise ScenarioError(f"normal velocity not positive at t={t}")
        kappa = TWO_PI * v * np.abs(mp.boundary_fprime())
        maps.append(mp)
        logk.append(np.log(kappa))
        kept_t.append(float(t))
    if len(kept_t) < 4:
        raise ScenarioError("too few extractable slices for a chart")
    # pad slices to a common angle count (warm starts keep m constant in
    # practice; resample spectra if curves changed resolution)
    m = max(len(v) for v in logk)
    logk = [v if len(v) == m else
            np.real(fourier.resample(fourier.fit(v), m)) for v in logk]
    r_lo = family.curves[0].inradius()
    inner_blend = (r_lo, 1.1 * r_lo)
    outer_blend = None
    if not is_tangency:
        r_hi = family.curves[len(kept_t) - 1].outradius()
        outer_blend = (r_hi / 1.1, r_hi)
    return PermeabilityField(family, kept_t, maps, np.stack(logk),
                             inner_blend, outer_blend, cap_time=cap_time)


def evaluate_kappa(field: PermeabilityField, z):
    """Interpolated permeability: spectral in angle, log-cubic in t, patches."""
    return field.evaluate(z)


def verify_moments(family: DomainFamily, field: PermeabilityField, t: float,
                   k: int, tol: float = 1e-9):
    """integral over Omega_t of zeta^k dA/kappa.

    Equals t for k = 0 and 0 for k >= 1 exactly when the family is the
    strong flow for kappa.
    """
    if k < 0:
        raise DomainError("k must be a nonnegative integer")
    curve = family.curve_at(float(t))
    j = int(np.argmin(np.abs(np.asarray(field.t_grid) - t)))
    mp = field.maps[j] if abs(field.t_grid[j] - t) < 1e-13 else riemann_map(
        curve, theta0=field.maps[j].theta, stall_floor=1e-6, validate=False)

    if k == 0:
        def density(z):
            return 1.0 / field.evaluate(z)
        return complex(mp.integrate(density, tol=tol))
    re = mp.integrate(lambda z: np.real(z ** k) / field.evaluate(z), tol=tol)
    im = mp.integrate(lambda z: np.imag(z ** k) / field.evaluate(z), tol=tol)
    return complex(re, im)
