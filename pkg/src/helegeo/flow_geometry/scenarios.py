"""Built-in flow scenarios and the module-level operations."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, ScenarioError
from .curve import BoundaryCurve, DEFAULT_MODES, hausdorff_distance
from .diffeos import DiffeoMap, make_diffeo
from .family import DomainFamily, TangencyFamily, chebyshev_grid
from .tangency import PinchSpec, TangencyTemplate, build_tangency_family

DEFAULT_T_SAMPLES = 160
DEFAULT_T_RANGE = (0.02, 0.98)


def ball_radius(t) -> np.ndarray:
    """Radius of the spherical-area-t ball about 0 in the Fubini-Study chart."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(t / (1.0 - t))


def ball_radius_rate(t) -> np.ndarray:
    """d/dt of ball_radius."""
    t = np.asarray(t, dtype=float)
    return 1.0 / (2.0 * ball_radius(t) * (1.0 - t) ** 2)


def standard_exit_time(z) -> np.ndarray:
    """Spherical area of the centred ball through z: |z|^2/(1+|z|^2)."""
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    return r2 / (1.0 + r2)


def standard_kappa(z) -> np.ndarray:
    """Permeability of the standard flow: pi (1+|z|^2)^2."""
    return np.pi * (1.0 + np.abs(np.asarray(z, dtype=complex)) ** 2) ** 2


class StandardScenario:
    """The rotation-invariant flow of centred balls."""

    name = "standard"

    def __init__(self, n_modes: int = DEFAULT_MODES):
        self.n_modes = n_modes

    def curve(self, t: float) -> BoundaryCurve:
        if not 0.0 < t < 1.0:
            raise DomainError("t must lie in (0, 1)")
        return BoundaryCurve.circle(float(ball_radius(t)), n_modes=self.n_modes)

    def inside(self, z, t: float):
        return np.atleast_1d(standard_exit_time(z) < t)

    def inside_many(self, z, t_arr):
        return np.atleast_1d(standard_exit_time(z)) < np.asarray(t_arr)

    def exit_time_exact(self, z):
        return standard_exit_time(z)

    def boundary_velocity(self, t: float, theta):
        return np.full(np.shape(np.asarray(theta, dtype=float)), float(ball_radius_rate(t)))

    def kappa_exact(self, z):
        return standard_kappa(z)

    def is_star(self, t: float) -> bool:
        return True

    def family(self, n_t: int = DEFAULT_T_SAMPLES, t_range=DEFAULT_T_RANGE) -> DomainFamily:
        tg = chebyshev_grid(t_range[0], t_range[1], n_t)
        return DomainFamily(tg, [self.curve(float(t)) for t in tg], scenario=self)


class DiffeoScenario:
    """Flow of images alpha(B(t)) of the standard balls under a built-in map.

    The curve parameter theta is the polar angle of the ball preimage, so the
    correspondence gamma(theta, t) = alpha(R_t e^{i theta}) is jointly smooth
    and boundary velocities follow from the chain rule.
    """

    def __init__(self, alpha: DiffeoMap, n_modes: int = DEFAULT_MODES):
        self.alpha = alpha
        self.n_modes = n_modes
        self.name = f"diffeo:{alpha.name}"
        self._curve_cache: dict[float, BoundaryCurve] = {}

    def curve(self, t: float) -> BoundaryCurve:
        if not 0.0 < t < 1.0:
            raise DomainError("t must lie in (0, 1)")
        key = round(float(t), 14)
        if key not in self._curve_cache:
            m = 4 * self.n_modes
            th = 2.0 * np.pi * np.arange(m) / m
            pts = self.alpha.apply(ball_radius(t) * np.exp(1j * th))
            c = BoundaryCurve.from_samples(pts, cutoff=self.n_modes)
            self._curve_cache[key] = c
        return self._curve_cache[key]

    def inside(self, z, t: float):
        w = self.alpha.inverse(np.asarray(z, dtype=complex))
        return np.atleast_1d(standard_exit_time(w) < t)

    def inside_many(self, z, t_arr):
        w = self.alpha.inverse(np.asarray(z, dtype=complex))
        return np.atleast_1d(standard_exit_time(w)) < np.asarray(t_arr)

    def exit_time_exact(self, z):
        return standard_exit_time(self.alpha.inverse(np.asarray(z, dtype=complex)))

    def boundary_velocity(self, t: float, theta):
        theta = np.asarray(theta, dtype=float)
        w = ball_radius(t) * np.exp(1j * theta)
        vel = self.alpha.jac_action(w, ball_radius_rate(t) * np.exp(1j * theta))
        n = self.curve(t).outward_normal(theta)
        return np.real(vel * np.conj(n))

    def kappa_exact(self, z):
        return None

    def is_star(self, t: float) -> bool:
        return self.curve(t).is_star_shaped()

    def family(self, n_t: int = DEFAULT_T_SAMPLES, t_range=DEFAULT_T_RANGE) -> DomainFamily:
        tg = chebyshev_grid(t_range[0], t_range[1], n_t)
        fam = DomainFamily(tg, [self.curve(float(t)) for t in tg], scenario=self)
        for t in (tg[0], tg[len(tg) // 2], tg[-1]):
            self.curve(float(t)).validate()
        return fam


class TangencyScenario:
    """Scenario wrapper around the tangency template."""

    def __init__(self, pinches, t_lo: float = 0.04):
        self.template = TangencyTemplate(pinches, t_lo=t_lo)
        self.name = self.template.name

    def __getattr__(self, item):
        return getattr(self.template, item)

    def family(self, n_t: int = 120) -> TangencyFamily:
        return build_tangency_family(None, n_t=n_t, template=self.template)


def make_scenario(spec: str):
    """Scenario factory from a config string.

    'standard', 'diffeo:<map spec>', or 'tangency:<pinch>[;<pinch>]' where a
    pinch is 'point@<complex>' or 'arc@<complex>:<len>'.
    """
    spec = str(spec)
    if spec == "standard":
        return StandardScenario()
    if spec.startswith("diffeo:"):
        return DiffeoScenario(make_diffeo(spec[len("diffeo:"):]))
    if spec.startswith("tangency"):
        rest = spec[len("tangency"):].lstrip(":")
        pinches = []
        if not rest:
            pinches = [PinchSpec(center=1.0 + 0.0j)]
        else:
            for part in rest.split(";"):
                part = part.strip()
                if part.startswith("arc@"):
                    loc, _, ln = part[len("arc@"):].partition(":")
                    pinches.append(PinchSpec(center=complex(loc), kind="arc",
                                             arc_len=float(ln or 0.2)))
                else:
                    loc = part[len("point@"):] if part.startswith("point@") else part
                    pinches.append(PinchSpec(center=complex(loc)))
        return TangencyScenario(pinches)
    raise DomainError(f"unknown scenario spec: {spec!r}")


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def standard_flow(t: float, n_modes: int = DEFAULT_MODES) -> BoundaryCurve:
    """Boundary of the standard flow at time t: the circle of radius R_t."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t={t} outside (0, 1)")
    return BoundaryCurve.circle(float(ball_radius(t)), n_modes=n_modes)


def diffeo_flow(alpha, t: float, n_modes: int = DEFAULT_MODES) -> BoundaryCurve:
    """Image of the standard ball boundary under a built-in diffeomorphism."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t={t} outside (0, 1)")
    if isinstance(alpha, str):
        alpha = make_diffeo(alpha)
    curve = DiffeoScenario(alpha, n_modes=n_modes).curve(t)
    curve.validate()
    return curve


def tangency_flow(pinches, n_t: int = 120, t_lo: float = 0.04) -> TangencyFamily:
    """Family developing tangency along the given pinch configuration."""
    if isinstance(pinches, PinchSpec):
        pinches = [pinches]
    pinches = [p if isinstance(p, PinchSpec) else PinchSpec(center=complex(p))
               for p in pinches]
    return build_tangency_family(pinches, n_t=n_t, t_lo=t_lo)


def normal_velocity(family: DomainFamily, t: float, theta, return_flag: bool = False):
    """Outward normal velocity of the family boundary at (t, theta)."""
    return family.normal_velocity(t, theta, return_flag=return_flag)


def exit_time(family: DomainFamily, z, return_flag: bool = False):
    """sup{t : z outside Omega_t}, by monotone bisection on the interior test."""
    t, flag = family.exit_times(np.atleast_1d(np.asarray(z, dtype=complex)))
    if np.ndim(z) == 0:
        return (float(t[0]), int(flag[0])) if return_flag else float(t[0])
    return (t, flag) if return_flag else t
