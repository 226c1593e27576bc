"""Synthetic flows developing boundary tangency at prescribed points or arcs.

The family is built as the sublevel sets of an explicit exit-time function
``E``: the standard-flow exit time far from the pinches, modified inside a
window around each pinch by a "slot" whose two walls close onto each other at
unit speed.  In the local frame at a pinch (x along the slot axis, y
transverse) the walls at time t are exactly

    y = +(x^2 + (T - t))   and   y = -(x^2 + (T - t)),

so the gap closes linearly (width 2(T-t)), the terminal curve touches itself
tangentially, and the one-sided transverse derivatives of the exit time at
the pinch are -1 and +1.  For an arc pinch the x^2 term is replaced by a
smooth function vanishing identically on the contact segment.

All modifications are merged with a smooth max that is exact outside a thin
blend band, so the family consists of exact standard-flow circles for small t
and the time labels there agree with the spherical area law.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _fourier as fourier
from .._bumps import plateau, smooth_max, smooth_pos, step_between
from ..errors import DomainError, ScenarioError
from .curve import BoundaryCurve
from .family import TangencyFamily, chebyshev_grid

# window layout in the pinch frame (xi = radial offset, v = |transverse|);
# all transition bands are wide to keep the boundary spectra short
_CORE = 0.10          # half-extent where the wall profile is exactly xi^2
_FLARE_RISE = 0.45
_FLARE_A, _FLARE_B = 0.12, 0.70
_BULB_RISE = 0.06
_BULB_A, _BULB_B = 0.12, 0.26
_BLEND_A, _BLEND_B = 0.16, 0.30
_XI_B = 0.34          # bulb cap offset
_CAP_D = 0.25         # cap opening rate: v^2 = D * (xi - xi_end(t))
_WIN_X = (0.47, 0.32, 0.75, 0.92)
_WIN_V = (0.40, 0.60)
_MU = 0.035           # smooth-max blend width
_OFFSET = 0.07        # fringe depression: fringes lose the max exactly
_R_OUTER_MARGIN = 0.30


@dataclass(frozen=True)
class PinchSpec:
    """A requested tangency location.

    For kind 'arc' the contact set is a radial segment of length arc_len
    centered at `center` (measured along the local x-axis).
    """
    center: complex
    kind: str = "point"
    arc_len: float = 0.0

    @property
    def radius(self) -> float:
        return float(abs(self.center))

    @property
    def angle(self) -> float:
        return float(np.angle(self.center))

    @property
    def half_span(self) -> float:
        """Half extent of the flat/contact part along the local x-axis."""
        return 0.0 if self.kind == "point" else 0.5 * self.arc_len + 0.06


@dataclass
class PinchFrame:
    """Resolved frame data for detectors and reports."""
    center: complex
    axis: complex        # unit vector along the local x-axis (radial)
    transverse: complex  # unit vector along the local y-axis
    kind: str
    contact_points: list = field(default_factory=list)


class TangencyTemplate:
    """Exit-time level-set construction for a tangency family.

    Parameters
    ----------
    pinches : list of PinchSpec
    t_lo : float
        Lower end of the represented t-range.
    """

    def __init__(self, pinches, t_lo: float = 0.04):
        if not pinches:
            raise ScenarioError("at least one pinch required")
        self.pinches = list(pinches)
        self._validate_layout()
        r_top = max(p.radius + p.half_span for p in self.pinches) + _R_OUTER_MARGIN
        self.R_T = r_top
        self.T = r_top ** 2 / (1.0 + r_top ** 2)
        self.t_lo = float(t_lo)
        if not 0.0 < self.t_lo < 0.5 * self.T:
            raise ScenarioError("t_lo must be well below the tangency time")
        self.name = "tangency:" + ",".join(
            f"{p.kind}@{p.center:g}" for p in self.pinches)
        self._curve_cache: dict[float, BoundaryCurve] = {}
        self._frames = [self._make_frame(p) for p in self.pinches]
        self._validate_gradient()

    # -- validation -----------------------------------------------------------

    def _validate_layout(self) -> None:
        for p in self.pinches:
            if p.kind not in ("point", "arc"):
                raise ScenarioError(f"unknown pinch kind {p.kind!r}")
            if p.kind == "arc" and not 0.05 <= p.arc_len <= 0.5:
                raise ScenarioError("arc_len must lie in [0.05, 0.5]")
            if not 0.8 <= p.radius <= 1.2:
                raise ScenarioError(
                    "pinch points must sit at radius in [0.8, 1.2] "
                    "(too close to 0 or too far out)")
        angs = sorted(p.angle for p in self.pinches)
        if len(angs) > 1:
            gaps = np.diff(angs + [angs[0] + 2.0 * np.pi])
            if np.min(gaps) < 1.5:
                raise ScenarioError("pinch points too close to each other "
                                    "(angular separation < 1.5 rad)")

    def _validate_gradient(self, floor: float = 0.05) -> None:
        """No critical points of E on levels within the family range."""
        rng = np.random.default_rng(7)
        r = np.sqrt(rng.uniform(0.05, (self.R_T + 0.1) ** 2, 4000))
        th = rng.uniform(0.0, 2.0 * np.pi, 4000)
        z = r * np.exp(1j * th)
        e = self.exit_function(z)
        sel = (e > 0.5 * self.t_lo) & (e < self.T + 1e-9)
        g = self.grad_exit(z[sel])
        gmin = float(np.min(np.abs(g)))
        if gmin < floor:
            raise ScenarioError(
                f"template gradient degenerates (min |grad E| = {gmin:.3g}); "
                "pinch layout produces an invalid family")

    def _make_frame(self, p: PinchSpec) -> PinchFrame:
        axis = np.exp(1j * p.angle)
        frame = PinchFrame(center=p.center, axis=axis, transverse=1j * axis,
                           kind=p.kind)
        if p.kind == "point":
            frame.contact_points = [p.center]
        else:
            half = 0.5 * p.arc_len
            s = np.linspace(-half, half, 16)
            frame.contact_points = [p.center + axis * si for si in s]
        return frame

    @property
    def frames(self) -> list[PinchFrame]:
        return self._frames

    # -- the exit-time function ------------------------------------------------

    @staticmethod
    def _ambient(z):
        r2 = np.abs(z) ** 2
        return r2 / (1.0 + r2)

    def _pinch_branch(self, z, p: PinchSpec, e0, v_signed=None):
        """Exit-time branch of a single pinch window (vectorized)."""
        w = np.asarray(z, dtype=complex) * np.exp(-1j * p.angle)
        xi = np.real(w) - p.radius
        y = np.imag(w)
        if v_signed is None:
            v = np.abs(y)
        else:
            sign = np.asarray(v_signed, dtype=float)
            v = np.where(np.isfinite(sign), sign * y, np.abs(y))
        L = p.half_span
        if p.kind == "point":
            g_base = xi ** 2
        else:
            g_base = smooth_pos(np.abs(xi) - 0.5 * p.arc_len - 0.05, 0.05) ** 2
        g = (g_base
             + _FLARE_RISE * step_between(xi, L + _FLARE_A, L + _FLARE_B)
             + _BULB_RISE * step_between(xi, -L - _BULB_A, -L - _BULB_B))
        e_core = self.T + g - v
        xi_b = -L - _XI_B
        e_bulb = self.T + (xi - xi_b) - v ** 2 / _CAP_D
        blend = step_between(xi, -L - _BLEND_A, -L - _BLEND_B)
        e_sl = blend * e_bulb + (1.0 - blend) * e_core
        chi = (plateau(xi, -L - _WIN_X[0], -L - _WIN_X[1],
                       L + _WIN_X[2], L + _WIN_X[3])
               * step_between(v, _WIN_V[1], _WIN_V[0]))
        base = e0 - _OFFSET
        return base + chi * (e_sl - base)

    def exit_function(self, z, branch: dict | None = None):
        """E(z): the time at which z is absorbed (> T means never, <= T)."""
        z = np.asarray(z, dtype=complex)
        e = self._ambient(z)
        e0 = e
        for k, p in enumerate(self.pinches):
            vs = branch.get(k) if branch else None
            e = smooth_max(e, self._pinch_branch(z, p, e0, v_signed=vs), _MU)
        return e

    def grad_exit(self, z, h: float = 1e-6, branch: dict | None = None):
        """Complex gradient dE/dx + i dE/dy by central differences."""
        z = np.asarray(z, dtype=complex)
        ex = (self.exit_function(z + h, branch) - self.exit_function(z - h, branch)) / (2 * h)
        ey = (self.exit_function(z + 1j * h, branch) - self.exit_function(z - 1j * h, branch)) / (2 * h)
        return ex + 1j * ey

    # -- scenario interface ------------------------------------------------------

    def inside(self, z, t: float):
        return np.atleast_1d(self.exit_function(z) < t)

    def inside_many(self, z, t_arr):
        return np.atleast_1d(self.exit_function(z)) < np.asarray(t_arr)

    def exit_time_exact(self, z):
        return self.exit_function(z)

    def boundary_velocity(self, t: float, theta):
        """Outward normal velocity at curve parameter theta: 1/|grad E|."""
        pts = self.curve(t).gamma(np.asarray(theta, dtype=float))
        return 1.0 / np.abs(self.grad_exit(pts))

    def kappa_exact(self, z):
        return None

    def is_star(self, t: float) -> bool:
        return self.curve(t).is_star_shaped()

    # -- level-set tracing ---------------------------------------------------------

    def _far_angle(self) -> float:
        """Start-ray direction far from every pinch window."""
        angs = sorted(p.angle for p in self.pinches)
        if len(angs) == 1:
            return angs[0] + np.pi
        ext = angs + [angs[0] + 2.0 * np.pi]
        gaps = np.diff(ext)
        j = int(np.argmax(gaps))
        return ext[j] + 0.5 * gaps[j]

    def curve(self, t: float) -> BoundaryCurve:
        t = float(t)
        key = round(t, 14)
        if key not in self._curve_cache:
            self._curve_cache[key] = self._trace_level(t)
        return self._curve_cache[key]

    def _value_and_grad(self, z, lock, h: float = 1e-6):
        """E and its gradient from one batched five-point stencil call."""
        z = complex(z)
        vals = self.exit_function(
            np.array([z, z + h, z - h, z + 1j * h, z - 1j * h]), branch=lock)
        g = (vals[1] - vals[2]) / (2 * h) + 1j * (vals[3] - vals[4]) / (2 * h)
        return float(vals[0]), complex(g)

    def _corrector(self, z, t, lock, iters: int = 5, tol: float = 1e-12):
        e, g = self._value_and_grad(z, lock)
        for _ in range(iters):
            z = z - (e - t) * g / abs(g) ** 2
            e, g = self._value_and_grad(z, lock)
            if abs(e - t) < tol:
                break
        return z, g

    def _trace_level(self, t: float, turn_target: float = 0.14,
                     h_min: float = 2e-4, h_max: float = 0.03) -> BoundaryCurve:
        if not (0.0 < t <= self.T + 1e-12):
            raise DomainError("level outside (0, T]")
        ang0 = self._far_angle()
        # along the far ray E equals the ambient exit time exactly
        r0 = np.sqrt(t / (1.0 - t))
        z0 = r0 * np.exp(1j * ang0)
        assert abs(self.exit_function(z0) - t) < 1e-10
        pts = [z0]
        z = z0
        _, g = self._value_and_grad(z, None)
        tau = 1j * g / abs(g)
        h = h_min * 4.0
        total_turn = 0.0
        max_steps = 300000
        lock: dict | None = None
        near_T = (self.T - t) < 0.02
        for _ in range(max_steps):
            # manage branch locking close to a pinch at terminal times
            if near_T:
                in_zone = None
                for k, p in enumerate(self.pinches):
                    w = z * np.exp(-1j * p.angle)
                    xi = np.real(w) - p.radius
                    yv = np.imag(w)
                    # the cap region (near xi_b) has an even transverse
                    # profile and is excluded so the trace may cross the axis
                    if (-p.half_span - _BLEND_B < xi < p.half_span + _FLARE_B
                            and abs(yv) < 0.06):
                        in_zone = (k, yv)
                        break
                if in_zone is None:
                    lock = None
                else:
                    k, yv = in_zone
                    if lock is None or k not in lock:
                        # sticky branch lock: the sign is frozen on entry so
                        # roundoff at the contact cannot flip the gradient
                        lock = {k: 1.0 if yv >= 0 else -1.0}
                    h = min(h, max((self.T - t) / 3.0, h_min / 2))
            z_new, g = self._corrector(z + h * tau, t, lock)
            tau_new = 1j * g / abs(g)
            turn = abs(np.angle(tau_new / tau))
            if turn > 3.0 * turn_target and h > h_min:
                h = max(h_min, 0.5 * h)
                continue
            pts.append(z_new)
            total_turn += np.angle(tau_new / tau)
            z, tau = z_new, tau_new
            h = float(np.clip(h * np.clip(turn_target / (turn + 1e-9), 0.5, 1.5),
                              h_min, h_max))
            if total_turn > 1.5 * np.pi and abs(z - z0) < 1.5 * h:
                break
        else:
            raise ScenarioError(f"level-set tracing did not close at t={t}")
        pts = np.asarray(pts)
        m = self._fit_size(t)
        return self._spectral_resample(pts, m, t, ang0)

    def _fit_size(self, t: float) -> int:
        return 2048 if t > 0.38 * self.T else 1024

    def _spectral_resample(self, pts: np.ndarray, m: int, t: float,
                           ang0: float, passes: int = 3) -> BoundaryCurve:
        """Uniform-arclength Fourier fit of a traced level polyline."""
        # initial resample by chordal arclength
        seg = np.abs(np.diff(np.concatenate([pts, pts[:1]])))
        s = np.concatenate([[0.0], np.cumsum(seg)])
        target = np.linspace(0.0, s[-1], m, endpoint=False)
        idx = np.searchsorted(s, target, side="right") - 1
        idx = np.clip(idx, 0, len(pts) - 1)
        frac = (target - s[idx]) / np.maximum(seg[idx], 1e-300)
        ring = np.concatenate([pts, pts[:1]])
        samples = ring[idx] + frac * (ring[idx + 1] - ring[idx])
        samples = self._project(samples, t)
        cutoff = m // 3
        for _ in range(passes):
            coeffs = fourier.truncate(fourier.fit(samples), cutoff)
            curve = BoundaryCurve(coeffs, cutoff)
            theta = _arclength_parameter(curve, m)
            samples = self._project(curve.gamma(theta), t)
        coeffs = fourier.truncate(fourier.fit(samples), cutoff)
        curve = BoundaryCurve(coeffs, cutoff)
        # anchor theta = 0 on the far ray so the correspondence is smooth in t
        th0 = _ray_crossing(curve, ang0)
        k = fourier.wavenumbers(len(coeffs))
        coeffs = coeffs * np.exp(1j * k * th0)
        return BoundaryCurve(coeffs, cutoff)

    def _branch_map(self, z):
        """Per-point transverse branch signs near each pinch (nan = unlocked)."""
        z = np.asarray(z, dtype=complex)
        branch = {}
        for k, p in enumerate(self.pinches):
            w = z * np.exp(-1j * p.angle)
            xi = np.real(w) - p.radius
            yv = np.imag(w)
            zone = ((xi > -p.half_span - _BLEND_B) & (xi < p.half_span + _FLARE_B)
                    & (np.abs(yv) < 0.06))
            if np.any(zone):
                branch[k] = np.where(zone, np.where(yv >= 0, 1.0, -1.0), np.nan)
        return branch or None

    def _project(self, z, t, lock=None):
        if lock is None and (self.T - t) < 0.02:
            lock = self._branch_map(z)
        for _ in range(4):
            e = self.exit_function(z, branch=lock) - t
            g = self.grad_exit(z, branch=lock)
            z = z - e * g / np.abs(g) ** 2
        return z


def _arclength_parameter(curve: BoundaryCurve, m: int) -> np.ndarray:
    """theta_j with equal arclength spacing, by Newton on the spectral length.

    The cumulative length comes from FFT integration of |gamma'| on a fine
    uniform grid plus a periodic spline, so the parameterization stays smooth
    to near machine precision.
    """
    from scipy.interpolate import CubicSpline

    mm = 4 * len(curve.coeffs)
    th = 2.0 * np.pi * np.arange(mm) / mm
    speed = np.abs(fourier.resample(fourier.derivative(curve.coeffs), mm))
    sk = np.fft.fft(speed) / mm
    k = fourier.wavenumbers(mm)
    mean = float(np.real(sk[0]))
    ik = np.where(k == 0, 1.0, 1j * k)
    osc_k = np.where(k == 0, 0.0, sk / ik)
    if mm % 2 == 0:
        osc_k[mm // 2] = 0.0
    osc = np.real(np.fft.ifft(osc_k * mm))
    osc = osc - osc[0]
    spline = CubicSpline(np.append(th, 2.0 * np.pi), np.append(osc, osc[0]),
                         bc_type="periodic")
    total = mean * 2.0 * np.pi
    target = np.arange(m) * total / m
    theta = np.interp(target, mean * th + osc, th)
    for _ in range(3):
        f = mean * theta + spline(theta % (2.0 * np.pi)) - target
        theta = theta - f / np.abs(curve.dgamma(theta))
    return theta


def _ray_crossing(curve: BoundaryCurve, angle: float) -> float:
    """Parameter of the boundary point on the given ray from the origin."""
    m = 4 * len(curve.coeffs)
    th = 2.0 * np.pi * np.arange(m) / m
    w = curve.samples(m) * np.exp(-1j * angle)
    a = np.angle(w)
    sgn = np.sign(a)
    cross = np.nonzero((sgn <= 0) & (np.roll(sgn, -1) > 0) & (np.real(w) > 0))[0]
    if len(cross) == 0:
        cross = [int(np.argmin(np.abs(a)))]
    j = int(cross[0])
    th0 = th[j]
    for _ in range(30):
        w0 = curve.gamma(th0) * np.exp(-1j * angle)
        dw = curve.dgamma(th0) * np.exp(-1j * angle)
        f = np.angle(w0)
        df = np.imag(dw / w0)
        step = f / df
        th0 = th0 - step
        if abs(step) < 1e-14:
            break
    return float(th0 % (2.0 * np.pi))


def build_tangency_family(pinches, n_t: int = 120, t_lo: float = 0.04,
                          template: TangencyTemplate | None = None) -> TangencyFamily:
    """Construct the discrete family for a pinch configuration."""
    tpl = template or TangencyTemplate(pinches, t_lo=t_lo)
    t_grid = chebyshev_grid(tpl.t_lo, tpl.T, n_t)
    # keep grid times strictly inside (0, 1) and hit T exactly at the top
    curves = [tpl.curve(float(t)) for t in t_grid]
    return TangencyFamily(t_grid, curves, tpl, tpl.frames, tpl.T)
