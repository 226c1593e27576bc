"""Built-in parametric diffeomorphisms of the Riemann sphere fixing 0.

Each map is the identity outside a compact radial band, hence smooth at both
0 and infinity, and comes with an analytic Jacobian action and an inverse so
that boundary velocities and exit times of the transported ball flow can be
evaluated without numerical differentiation.
"""

from __future__ import annotations

import numpy as np

from .._bumps import plateau
from ..errors import DomainError, ScenarioError


class DiffeoMap:
    """Base class: an orientation-preserving diffeomorphism alpha with
    alpha(0) = 0 and alpha = identity near infinity."""

    name = "identity"

    def apply(self, z):
        return np.asarray(z, dtype=complex)

    def jac_action(self, z, v):
        """Real-linear derivative D(alpha)_z applied to the vector v."""
        return np.asarray(v, dtype=complex)

    def inverse(self, w):
        return np.asarray(w, dtype=complex)

    # generic 2D Newton inverse using Wirtinger derivatives
    def _newton_inverse(self, w, seed, wirtinger, steps: int = 40, tol: float = 1e-13):
        w = np.asarray(w, dtype=complex)
        z = np.array(seed, dtype=complex, copy=True)
        for _ in range(steps):
            r = self.apply(z) - w
            if np.max(np.abs(r)) < tol:
                break
            az, azb = wirtinger(z)
            det = np.abs(az) ** 2 - np.abs(azb) ** 2
            step = (np.conj(az) * r - azb * np.conj(r)) / det
            z = z - step
        return z


class Rotation(DiffeoMap):
    def __init__(self, angle: float):
        self.angle = float(angle)
        self.name = f"rotation:{angle:g}"

    def apply(self, z):
        return np.asarray(z, dtype=complex) * np.exp(1j * self.angle)

    def jac_action(self, z, v):
        return np.asarray(v, dtype=complex) * np.exp(1j * self.angle)

    def inverse(self, w):
        return np.asarray(w, dtype=complex) * np.exp(-1j * self.angle)


class RadialPetal(DiffeoMap):
    """Polar modulation r -> r(1 + eps*b(r)(1 + a*cos(k*theta + phase))).

    b is a smooth plateau supported on [r1, r2], so the map is the identity
    both near 0 and near infinity; k = 0 gives a pure radial modulation.
    Angles are preserved, so the inverse reduces to a monotone 1-D solve
    along each ray.
    """

    def __init__(self, eps: float = 0.05, k: int = 3, a: float = 0.5,
                 phase: float = 0.0, r1: float = 0.30, r2: float = 2.60):
        if not (0 < r1 < r2):
            raise ScenarioError("need 0 < r1 < r2")
        self.eps, self.k, self.a, self.phase = float(eps), int(k), float(a), float(phase)
        self.r1, self.r2 = float(r1), float(r2)
        self.name = f"petal:k={k},eps={eps:g}" if k else f"radial:eps={eps:g}"
        # diffeo condition: dF/dr > 0 where F = r(1 + eps*b(r)*g(theta))
        rr = np.linspace(0.5 * r1, 1.5 * r2, 4001)
        gmax = 1.0 + abs(a)
        slope = self._b(rr) + rr * self._db(rr)
        dF = 1.0 + eps * np.where(slope < 0, slope * gmax, slope * max(1 - abs(a), 0.0))
        if np.min(dF) <= 0.05:
            raise ScenarioError("petal parameters are not a diffeomorphism "
                                "(radial derivative loses positivity)")

    def _b(self, r):
        mid1 = self.r1 + 0.25 * (self.r2 - self.r1)
        mid2 = self.r2 - 0.25 * (self.r2 - self.r1)
        return plateau(r, self.r1, mid1, mid2, self.r2)

    def _db(self, r, h: float = 1e-6):
        return (self._b(r + h) - self._b(r - h)) / (2.0 * h)

    def _g(self, theta):
        return 1.0 + self.a * np.cos(self.k * theta + self.phase)

    def _dg(self, theta):
        return -self.a * self.k * np.sin(self.k * theta + self.phase)

    def apply(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        theta = np.angle(z)
        fac = 1.0 + self.eps * self._b(r) * self._g(theta)
        return z * fac

    def jac_action(self, z, v):
        z = np.asarray(z, dtype=complex)
        v = np.asarray(v, dtype=complex)
        r = np.abs(z)
        theta = np.angle(z)
        ez = np.where(r > 0, z / np.where(r == 0, 1.0, r), 1.0)
        vr = np.real(v * np.conj(ez))
        vt = np.imag(v * np.conj(ez))  # r * d(theta)
        F = r * (1.0 + self.eps * self._b(r) * self._g(theta))
        dFdr = 1.0 + self.eps * (self._b(r) + r * self._db(r)) * self._g(theta)
        dFdth = r * self.eps * self._b(r) * self._dg(theta)
        # alpha = F(r, theta) e^{i theta}
        dth = np.where(r > 0, vt / np.where(r == 0, 1.0, r), 0.0)
        dF = dFdr * vr + dFdth * dth
        return (dF + 1j * F * dth) * np.exp(1j * theta)

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        rho = np.abs(w)
        theta = np.angle(w)
        g = self._g(theta)
        r = np.array(rho, copy=True)
        for _ in range(60):
            F = r * (1.0 + self.eps * self._b(r) * g)
            dF = 1.0 + self.eps * (self._b(r) + r * self._db(r)) * g
            step = (F - rho) / dF
            r = np.maximum(r - step, 0.0)
            if np.max(np.abs(step)) < 1e-14:
                break
        return r * np.exp(1j * theta)


class QuadraticShear(DiffeoMap):
    """alpha(z) = z + eps * c(|z|) * z^2 with a plateau window c.

    c is a smooth plateau supported on [r_in, r_out], so the map agrees with
    the quadratic shear z + eps z^2 on a middle annulus and is the identity
    both near the origin and near infinity.
    """

    def __init__(self, eps: float = 0.06, r_in: float = 0.35, mid1: float = 0.60,
                 mid2: float = 1.60, r_out: float = 3.00):
        self.eps = float(eps)
        self.r_in, self.mid1 = float(r_in), float(mid1)
        self.mid2, self.r_out = float(mid2), float(r_out)
        self.name = f"shear:eps={eps:g}"
        if eps < 0:
            raise ScenarioError("eps must be nonnegative")
        # injectivity: contraction bound sup(|a_z - 1| + |a_zbar|) < 1
        rr = np.linspace(1e-3, self.r_out * 1.2, 4001)
        zz = rr.astype(complex)
        az, azb = self._wirtinger(zz)
        pert = np.abs(az - 1.0) + np.abs(azb)
        if np.max(pert) >= 0.85:
            raise ScenarioError("shear parameters too strong to stay injective")

    def _c(self, r):
        return plateau(r, self.r_in, self.mid1, self.mid2, self.r_out)

    def _dc(self, r, h: float = 1e-6):
        return (self._c(r + h) - self._c(r - h)) / (2.0 * h)

    def apply(self, z):
        z = np.asarray(z, dtype=complex)
        return z + self.eps * self._c(np.abs(z)) * z ** 2

    def _wirtinger(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        c = self._c(r)
        dc = self._dc(r)
        safe = np.where(r == 0, 1.0, r)
        az = 1.0 + self.eps * (2.0 * c * z + dc * np.conj(z) * z ** 2 / (2.0 * safe))
        azb = self.eps * dc * z ** 3 / (2.0 * safe)
        return az, azb

    def jac_action(self, z, v):
        az, azb = self._wirtinger(z)
        v = np.asarray(v, dtype=complex)
        return az * v + azb * np.conj(v)

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        return self._newton_inverse(w, w, self._wirtinger)


def make_diffeo(spec: str) -> DiffeoMap:
    """Parse a scenario diffeo spec like 'shear', 'rotation:0.7', 'petal:3'."""
    parts = str(spec).split(":")
    kind = parts[0]
    if kind in ("identity", "id"):
        return DiffeoMap()
    if kind == "rotation":
        return Rotation(float(parts[1]) if len(parts) > 1 else 0.5)
    if kind == "radial":
        return RadialPetal(eps=float(parts[1]) if len(parts) > 1 else 0.08, k=0, a=0.0)
    if kind == "petal":
        return RadialPetal(k=int(parts[1]) if len(parts) > 1 else 3)
    if kind in ("shear", "quadratic-shear"):
        return QuadraticShear(eps=float(parts[1]) if len(parts) > 1 else 0.08)
    raise DomainError(f"unknown diffeomorphism spec: {spec!r}")
