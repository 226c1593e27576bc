"""Scalar fields sampled on uniform grids over a chart window."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass
class ScalarField:
    """A real function on a square grid over [x0, x0+(n-1)h]^2.

    Fields carrying a logarithmic pole at 0 store only the smooth part;
    the full function is values + pole_coefficient * log|z|^2, with the
    pole handled symbolically by consumers.

    values is indexed [iy, ix].
    """

    values: np.ndarray
    x0: float
    y0: float
    h: float
    pole_coefficient: float = 0.0
    chart: str = "zero"
    flags: np.ndarray | None = None
    _spline: object = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def axes(self):
        nx = self.values.shape[1]
        ny = self.values.shape[0]
        return (self.x0 + self.h * np.arange(nx),
                self.y0 + self.h * np.arange(ny))

    def mesh(self) -> np.ndarray:
        x, y = self.axes()
        return x[None, :] + 1j * y[:, None]

    def full_values(self) -> np.ndarray:
        """Smooth part plus the reconstructed pole term (inf at exact 0)."""
        if self.pole_coefficient == 0.0:
            return self.values
        z = self.mesh()
        with np.errstate(divide="ignore"):
            pole = np.log(np.abs(z) ** 2)
        return self.values + self.pole_coefficient * pole

    def smooth_sample(self, z):
        """Bicubic interpolation of the smooth part at complex points."""
        from scipy.interpolate import RectBivariateSpline
        if self._spline is None:
            x, y = self.axes()
            self._spline = RectBivariateSpline(y, x, self.values, kx=3, ky=3)
        z = np.asarray(z, dtype=complex)
        x, y = self.axes()
        if np.any(z.real < x[0] - 1e-12) or np.any(z.real > x[-1] + 1e-12) or \
           np.any(z.imag < y[0] - 1e-12) or np.any(z.imag > y[-1] + 1e-12):
            raise DomainError("sample point outside the field window")
        return self._spline(np.atleast_1d(z.imag).ravel(),
                            np.atleast_1d(z.real).ravel(), grid=False
                            ).reshape(np.shape(z))

    def sample(self, z):
        """Full function (smooth part + pole term) at complex points."""
        out = self.smooth_sample(z)
        if self.pole_coefficient:
            out = out + self.pole_coefficient * np.log(np.abs(z) ** 2)
        return out

    def interior_laplacian(self) -> np.ndarray:
        """Discrete 5-point Laplacian of the smooth part (interior nodes)."""
        v = self.values
        return (v[1:-1, 2:] + v[1:-1, :-2] + v[2:, 1:-1] + v[:-2, 1:-1]
                - 4.0 * v[1:-1, 1:-1]) / self.h ** 2

    def copy_with(self, values, **kw) -> "ScalarField":
        args = dict(x0=self.x0, y0=self.y0, h=self.h,
                    pole_coefficient=self.pole_coefficient, chart=self.chart)
        args.update(kw)
        return ScalarField(np.asarray(values, dtype=float), **args)


def make_window(L: float, n: int) -> ScalarField:
    """Empty field on the symmetric window [-L, L]^2 with n points per side."""
    h = 2.0 * L / (n - 1)
    return ScalarField(np.zeros((n, n)), x0=-L, y0=-L, h=h)


def fubini_study_density(z) -> np.ndarray:
    """Density of the background spherical form: 1/(pi (1+|z|^2)^2)."""
    return 1.0 / (np.pi * (1.0 + np.abs(np.asarray(z)) ** 2) ** 2)
