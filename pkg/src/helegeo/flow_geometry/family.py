"""Increasing one-parameter families of boundary curves."""

from __future__ import annotations

import numpy as np

from .. import _fourier as fourier
from ..errors import DomainError, ScenarioError
from .curve import BoundaryCurve, winding_numbers


def chebyshev_grid(a: float, b: float, n: int) -> np.ndarray:
    """Chebyshev-Lobatto samples of [a, b], clustering at both endpoints."""
    i = np.arange(n)
    return a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * i / (n - 1)))


class DomainFamily:
    """An increasing family {Omega_t} of curves over a discrete t-grid.

    Curves share a common theta-parameterization so gamma(theta, t) is
    jointly smooth.  Between grid slices, curves are interpolated by cubic
    Lagrange interpolation of Fourier coefficients; families built from a
    scenario delegate to the scenario's analytic curve instead.

    Parameters
    ----------
    t_grid : array
        Strictly increasing times in (0, 1).
    curves : list of BoundaryCurve
    scenario : object, optional
        Provider of analytic fast paths (curve, inside, exit_time, velocity).
    """

    def __init__(self, t_grid, curves, scenario=None):
        self.t_grid = np.asarray(t_grid, dtype=float)
        if np.any(np.diff(self.t_grid) <= 0):
            raise ScenarioError("t_grid must be strictly increasing")
        if self.t_grid[0] <= 0.0 or self.t_grid[-1] >= 1.0:
            raise ScenarioError("t_grid must lie in (0, 1)")
        if len(curves) != len(self.t_grid):
            raise ScenarioError("one curve per t sample required")
        m = max(len(c.coeffs) for c in curves)
        self.curves = [c if len(c.coeffs) == m else
                       BoundaryCurve(fourier.fit(fourier.resample(c.coeffs, m)), c.cutoff)
                       for c in curves]
        self.scenario = scenario
        self._coeff_matrix = np.stack([c.coeffs for c in self.curves])

    # -- basic access ------------------------------------------------------

    @property
    def t_lo(self) -> float:
        return float(self.t_grid[0])

    @property
    def t_hi(self) -> float:
        return float(self.t_grid[-1])

    def __len__(self) -> int:
        return len(self.t_grid)

    def curve_at(self, t: float) -> BoundaryCurve:
        """Curve at arbitrary t in range (analytic if a scenario is attached)."""
        t = float(t)
        if t < self.t_grid[0] - 1e-12 or t > self.t_grid[-1] + 1e-12:
            raise DomainError(f"t={t} outside family range "
                              f"[{self.t_grid[0]}, {self.t_grid[-1]}]")
        j = int(np.argmin(np.abs(self.t_grid - t)))
        if abs(self.t_grid[j] - t) < 1e-13:
            return self.curves[j]
        if self.scenario is not None:
            return self.scenario.curve(t)
        return BoundaryCurve(self._interp_coeffs(t), self.curves[0].cutoff)

    def _interp_coeffs(self, t: float) -> np.ndarray:
        """Cubic Lagrange interpolation of Fourier coefficients in t."""
        tg = self.t_grid
        j = int(np.searchsorted(tg, t))
        lo = max(0, min(j - 2, len(tg) - 4))
        idx = np.arange(lo, lo + 4)
        ts = tg[idx]
        w = np.ones(4)
        for a in range(4):
            for b in range(4):
                if a != b:
                    w[a] *= (t - ts[b]) / (ts[a] - ts[b])
        return np.tensordot(w, self._coeff_matrix[idx], axes=(0, 0))

    # -- normal velocity ----------------------------------------------------

    def normal_velocity(self, t: float, theta, return_flag: bool = False):
        """Outward normal velocity <d(gamma)/dt, n> at (t, theta).

        Differencing across the t-grid (centered 3-point away from the grid
        edges, one-sided at the edges, in which case the warning flag is set),
        followed by spectral evaluation in theta.
        """
        t = float(t)
        tg = self.t_grid
        if t < tg[0] - 1e-12 or t > tg[-1] + 1e-12:
            raise DomainError("t outside the family's t-range")
        j = int(np.clip(np.searchsorted(tg, t) - 1, 0, len(tg) - 2))
        edge = j == 0 or j >= len(tg) - 2
        if edge:
            idx = [j, j + 1]
        else:
            idx = [j - 1, j, j + 1, j + 2]
        ts = tg[idx]
        # derivative of the local Lagrange interpolant at t
        dw = _lagrange_derivative_weights(ts, t)
        theta = np.asarray(theta, dtype=float)
        dgdt = np.zeros(np.shape(theta), dtype=complex)
        for w_i, k in zip(dw, idx):
            if w_i != 0.0:
                dgdt = dgdt + w_i * self.curves[k].gamma(theta)
        n = self.curve_at(t).outward_normal(theta)
        v = np.real(dgdt * np.conj(n))
        if return_flag:
            return v, edge
        return v

    # -- interior / exit time ----------------------------------------------

    def inside(self, z, t: float) -> np.ndarray:
        """Vectorized interior test of points against Omega_t."""
        if self.scenario is not None and hasattr(self.scenario, "inside"):
            return self.scenario.inside(z, t)
        curve = self.curve_at(t)
        return curve.contains(z)

    def exit_times(self, z, tol: float = 1e-11, flags_out: list | None = None
                   ) -> tuple[np.ndarray, np.ndarray]:
        """sup{t : z not in Omega_t} for each z, by monotone bisection.

        Returns (t, flag) arrays; flag 0 = interior root found, -1 = inside
        the first curve already (value t_lo), +1 = outside the last curve
        (value t_hi).
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        tg = self.t_grid
        t_out = np.empty(len(z))
        flag = np.zeros(len(z), dtype=int)
        inside_lo = self._inside_grid(z, 0)
        inside_hi = self._inside_grid(z, len(tg) - 1)
        t_out[inside_lo] = tg[0]
        flag[inside_lo] = -1
        t_out[~inside_hi] = tg[-1]
        flag[~inside_hi] = +1
        active = ~inside_lo & inside_hi
        if np.any(active):
            idx_act = np.nonzero(active)[0]
            za = z[idx_act]
            lo = np.zeros(len(za), dtype=int)
            hi = np.full(len(za), len(tg) - 1, dtype=int)
            while np.any(hi - lo > 1):
                mid = (lo + hi) // 2
                ins = np.zeros(len(za), dtype=bool)
                for mval in np.unique(mid[hi - lo > 1]):
                    sel = (mid == mval) & (hi - lo > 1)
                    ins[sel] = self._inside_grid(za[sel], int(mval))
                upd = hi - lo > 1
                hi = np.where(upd & ins, mid, hi)
                lo = np.where(upd & ~ins, mid, lo)
            t_lo_arr = tg[lo]
            t_hi_arr = tg[hi]
            # continuous bisection within the bracketing interval
            while np.max(t_hi_arr - t_lo_arr) > tol:
                t_mid = 0.5 * (t_lo_arr + t_hi_arr)
                ins = self._inside_many(za, t_mid)
                t_hi_arr = np.where(ins, t_mid, t_hi_arr)
                t_lo_arr = np.where(ins, t_lo_arr, t_mid)
            t_out[idx_act] = 0.5 * (t_lo_arr + t_hi_arr)
        if flags_out is not None:
            flags_out.append(flag)
        return t_out, flag

    def _inside_grid(self, z, j: int) -> np.ndarray:
        if self.scenario is not None and hasattr(self.scenario, "inside"):
            return np.atleast_1d(self.scenario.inside(z, float(self.t_grid[j])))
        return np.atleast_1d(self.curves[j].contains(z))

    def _inside_many(self, z, t_arr) -> np.ndarray:
        """Interior test where each z has its own t."""
        if self.scenario is not None and hasattr(self.scenario, "inside_many"):
            return self.scenario.inside_many(z, t_arr)
        if self.scenario is not None and hasattr(self.scenario, "inside"):
            out = np.zeros(len(z), dtype=bool)
            for i in range(len(z)):
                out[i] = bool(np.atleast_1d(self.scenario.inside(z[i], float(t_arr[i])))[0])
            return out
        out = np.zeros(len(z), dtype=bool)
        for i in range(len(z)):
            c = BoundaryCurve(self._interp_coeffs(float(t_arr[i])), self.curves[0].cutoff)
            out[i] = bool(c.contains(z[i])[0])
        return out

    # -- invariant checks -----------------------------------------------------

    def check_nesting(self, stride: int = 1, n_samples: int = 128) -> None:
        """Strict nesting of consecutive grid curves (raises on violation)."""
        for j in range(0, len(self.curves) - stride, stride):
            inner = self.curves[j].samples(n_samples)
            if self.scenario is not None and hasattr(self.scenario, "inside"):
                ok = np.all(self.scenario.inside(inner, float(self.t_grid[j + stride])))
            else:
                w = winding_numbers(
                    self.curves[j + stride].samples(4 * self.curves[j].cutoff), inner)
                ok = np.all(w == 1)
            if not ok:
                raise ScenarioError(f"nesting violated between t={self.t_grid[j]:.6f} "
                                    f"and t={self.t_grid[j + stride]:.6f}")

    def min_normal_velocity(self, n_theta: int = 64, t_exclusive_hi: float | None = None
                            ) -> float:
        """Minimum boundary speed over the grid.

        Prefers the scenario's analytic velocity; the differencing fallback is
        only second-order accurate in the grid spacing.
        """
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        analytic = self.scenario is not None and hasattr(self.scenario,
                                                         "boundary_velocity")
        vmin = np.inf
        for t in self.t_grid[1:-1]:
            if t_exclusive_hi is not None and t >= t_exclusive_hi:
                continue
            if analytic:
                v = self.scenario.boundary_velocity(float(t), theta)
            else:
                v = self.normal_velocity(float(t), theta)
            vmin = min(vmin, float(np.min(v)))
        return vmin


def _lagrange_derivative_weights(ts: np.ndarray, t: float) -> np.ndarray:
    """d/dt of Lagrange basis polynomials through nodes ts, evaluated at t."""
    n = len(ts)
    w = np.zeros(n)
    for a in range(n):
        tot = 0.0
        for b in range(n):
            if b == a:
                continue
            prod = 1.0
            for c in range(n):
                if c == a or c == b:
                    continue
                prod *= (t - ts[c]) / (ts[a] - ts[c])
            tot += prod / (ts[a] - ts[b])
        w[a] = tot
    return w


class TangencyFamily(DomainFamily):
    """A domain family on (0, T] whose final curve touches itself along S.

    Attributes
    ----------
    pinches : list
        Pinch descriptors (point, frame, kind, contact samples).
    T : float
        Tangency time; curves are simple for t < T.
    """

    def __init__(self, t_grid, curves, scenario, pinches, T: float):
        super().__init__(t_grid, curves, scenario=scenario)
        self.pinches = pinches
        self.T = float(T)
