"""Smooth closed boundary curves stored as truncated Fourier series."""

from __future__ import annotations

import numpy as np

from .. import _fourier as fourier
from ..errors import DomainError, ScenarioError

DEFAULT_MODES = 256


class BoundaryCurve:
    """A smooth simple closed curve in C enclosing the origin.

    The parameterization ``gamma(theta)`` for ``theta in [0, 2*pi)`` is stored
    as complex Fourier coefficients (FFT layout) with modes beyond the cutoff
    zeroed.  Curves are immutable after construction; all evaluation methods
    are pure.

    Parameters
    ----------
    coeffs : array
        Complex Fourier coefficients in FFT layout.
    cutoff : int, optional
        Mode cutoff N; defaults to the dealiasing limit len(coeffs)//3.
    validate : bool
        Run the invariant checks (simplicity, winding, non-vanishing tangent).
    """

    __slots__ = ("coeffs", "cutoff", "_samples_cache")

    def __init__(self, coeffs, cutoff: int | None = None, validate: bool = False):
        coeffs = np.asarray(coeffs, dtype=complex)
        if cutoff is None:
            cutoff = len(coeffs) // 3
        self.coeffs = fourier.truncate(coeffs, cutoff)
        self.cutoff = int(cutoff)
        self._samples_cache: dict[int, np.ndarray] = {}
        if validate:
            self.validate()

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_samples(cls, points, cutoff: int | None = None, validate: bool = False,
                     orient_ccw: bool = True) -> "BoundaryCurve":
        """Fit a curve through uniformly spaced samples of a closed loop."""
        pts = np.asarray(points, dtype=complex)
        if orient_ccw and _polygon_winding(pts) < 0:
            pts = pts[::-1]
        return cls(fourier.fit(pts), cutoff=cutoff, validate=validate)

    @classmethod
    def circle(cls, radius: float, center: complex = 0.0, n_modes: int = DEFAULT_MODES
               ) -> "BoundaryCurve":
        c = np.zeros(4 * n_modes, dtype=complex)
        c[0] = center
        c[1] = radius
        return cls(c, cutoff=n_modes)

    # -- evaluation -------------------------------------------------------

    def gamma(self, theta):
        return fourier.evaluate(self.coeffs, theta)

    def dgamma(self, theta, order: int = 1):
        return fourier.evaluate(fourier.derivative(self.coeffs, order), theta)

    def samples(self, m: int | None = None) -> np.ndarray:
        """m uniform-parameter samples (cached)."""
        if m is None:
            m = len(self.coeffs)
        if m not in self._samples_cache:
            self._samples_cache[m] = fourier.resample(self.coeffs, m)
        return self._samples_cache[m]

    def tangent(self, theta):
        d = self.dgamma(theta)
        return d / np.abs(d)

    def outward_normal(self, theta):
        """Unit outward normal for a counterclockwise curve."""
        return -1j * self.tangent(theta)

    def curvature(self, theta):
        d1 = self.dgamma(theta, 1)
        d2 = self.dgamma(theta, 2)
        return np.imag(np.conj(d1) * d2) / np.abs(d1) ** 3

    # -- geometry ---------------------------------------------------------

    def outradius(self) -> float:
        return float(np.abs(self.samples(4 * self.cutoff)).max())

    def inradius(self) -> float:
        return float(np.abs(self.samples(4 * self.cutoff)).min())

    def arclength(self) -> float:
        m = 4 * self.cutoff
        th = 2.0 * np.pi * np.arange(m) / m
        return float(np.abs(self.dgamma(th)).mean() * 2.0 * np.pi)

    def winding_number(self, z=0.0) -> int:
        w = winding_numbers(self.samples(4 * self.cutoff), np.atleast_1d(np.asarray(z, complex)))
        return int(w[0])

    def contains(self, z, m: int | None = None) -> np.ndarray:
        """Interior test by discretized Cauchy index on boundary samples."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = winding_numbers(self.samples(m or 4 * self.cutoff), z)
        return w != 0

    def min_tangent_speed(self) -> float:
        m = 4 * self.cutoff
        th = 2.0 * np.pi * np.arange(m) / m
        return float(np.abs(self.dgamma(th)).min())

    def is_star_shaped(self, center: complex = 0.0) -> bool:
        """True if the polar angle is strictly monotone along the curve."""
        pts = self.samples(4 * self.cutoff) - center
        ang = np.unwrap(np.angle(pts))
        d = np.diff(ang)
        return bool(np.all(d > 0) or np.all(d < 0))

    def radial_function(self, n: int, center: complex = 0.0, newton_steps: int = 6):
        """Radius rho(phi) at n uniform polar angles (star-shaped curves only).

        Solves arg(gamma(theta) - center) = phi by vectorized Newton seeded
        from dense samples; machine-accurate for resolved curves.
        """
        if not self.is_star_shaped(center):
            raise DomainError("curve is not star-shaped about the given center")
        m = 8 * self.cutoff
        th = 2.0 * np.pi * np.arange(m) / m
        ang = np.unwrap(np.angle(self.gamma(th) - center))
        # normalize to start in [0, 2*pi)
        ang -= 2.0 * np.pi * np.floor(ang[0] / (2.0 * np.pi))
        phi = 2.0 * np.pi * np.arange(n) / n
        # monotone interpolation seed over one full turn
        grid_ang = np.concatenate([ang, [ang[0] + 2.0 * np.pi]])
        grid_th = np.concatenate([th, [2.0 * np.pi]])
        tgt = np.where(phi < grid_ang[0], phi + 2.0 * np.pi, phi)
        theta = np.interp(tgt, grid_ang, grid_th)
        for _ in range(newton_steps):
            g = self.gamma(theta) - center
            dg = self.dgamma(theta)
            f = _angdiff(np.angle(g), tgt)
            dfdth = np.imag(dg / g)
            theta = theta - f / dfdth
        rho = np.abs(self.gamma(theta) - center)
        return phi, rho, theta

    # -- invariants ---------------------------------------------------------

    def validate(self) -> None:
        """Raise ScenarioError on violation of the curve invariants."""
        if self.winding_number(0.0) != 1:
            raise ScenarioError("curve must wind once counterclockwise around 0")
        if self.min_tangent_speed() <= 1e-12:
            raise ScenarioError("tangent vector vanishes at sample resolution")
        crossings, _ = self_intersections(self.samples(4 * self.cutoff))
        if crossings:
            raise ScenarioError(
                f"curve self-intersects at sample resolution ({len(crossings)} crossings)")

    def self_touches(self, eps: float):
        """Classify near-contacts of the boundary with itself.

        Returns (n_tangential, n_transversal, touch_points).  Used to confirm
        a family's terminal curve touches itself tangentially.
        """
        pts = self.samples(4 * self.cutoff)
        crossings, touches = self_intersections(pts, touch_eps=eps)
        return len(touches), len(crossings), [p for (p, _) in touches]


def _angdiff(a, b):
    """Signed angular difference a - b wrapped to (-pi, pi]."""
    d = (np.asarray(a) - np.asarray(b)) % (2.0 * np.pi)
    return np.where(d > np.pi, d - 2.0 * np.pi, d)


def _polygon_winding(pts) -> int:
    ang = np.angle(np.roll(pts, -1) / np.where(pts == 0, 1e-300, pts))
    return int(np.rint(np.sum(ang) / (2.0 * np.pi)))


def winding_numbers(samples: np.ndarray, z: np.ndarray, chunk: int = 1 << 21) -> np.ndarray:
    """Winding number of the sampled closed polygon about each point z.

    Points within ~1e-12 of the polygon are resolved to winding 0 or 1 by the
    rounded angle sum; callers needing a boundary classification should also
    check distance_to_polygon.
    """
    samples = np.asarray(samples, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    m = len(samples)
    nxt = np.roll(samples, -1)
    out = np.empty(len(z))
    block = max(1, chunk // m)
    for i in range(0, len(z), block):
        sl = slice(i, min(i + block, len(z)))
        a = samples[None, :] - z[sl, None]
        b = nxt[None, :] - z[sl, None]
        out[sl] = np.sum(np.angle(b * np.conj(a)), axis=1)
    return np.rint(out / (2.0 * np.pi)).astype(int)


def distance_to_polygon(samples: np.ndarray, z: np.ndarray, chunk: int = 1 << 20) -> np.ndarray:
    """Distance from each z to the closed polygon through the samples."""
    samples = np.asarray(samples, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    a = samples
    b = np.roll(samples, -1)
    ab = b - a
    denom = np.abs(ab) ** 2
    out = np.empty(len(z))
    block = max(1, chunk // len(samples))
    for i in range(0, len(z), block):
        sl = slice(i, min(i + block, len(z)))
        az = z[sl, None] - a[None, :]
        s = np.clip(np.real(az * np.conj(ab[None, :])) / denom[None, :], 0.0, 1.0)
        proj = a[None, :] + s * ab[None, :]
        out[sl] = np.abs(z[sl, None] - proj).min(axis=1)
    return out


def self_intersections(pts: np.ndarray, touch_eps: float = 0.0):
    """Find proper crossings (and optional near-touches) among polygon segments.

    Returns (crossings, touches): lists of ((point, (i, j))) for non-adjacent
    segment pairs.  A *crossing* is a transversal intersection; a *touch* is a
    pair of non-adjacent segments within touch_eps that do not properly cross.
    Touches are pruned so that clusters of adjacent segment pairs report once.
    """
    pts = np.asarray(pts, dtype=complex)
    m = len(pts)
    a = pts
    b = np.roll(pts, -1)
    seg_min_x = np.minimum(a.real, b.real)
    seg_max_x = np.maximum(a.real, b.real)
    seg_min_y = np.minimum(a.imag, b.imag)
    seg_max_y = np.maximum(a.imag, b.imag)
    pad = touch_eps
    crossings = []
    touch_candidates = []
    # vectorized sweep over i with bbox prefilter against j > i+1
    for i in range(m - 2):
        j0 = i + 2
        j_idx = np.arange(j0, m if i > 0 else m - 1)
        if len(j_idx) == 0:
            continue
        box = ~((seg_min_x[j_idx] > seg_max_x[i] + pad) |
                (seg_max_x[j_idx] < seg_min_x[i] - pad) |
                (seg_min_y[j_idx] > seg_max_y[i] + pad) |
                (seg_max_y[j_idx] < seg_min_y[i] - pad))
        j_idx = j_idx[box]
        if len(j_idx) == 0:
            continue
        p, r = a[i], b[i] - a[i]
        q, s = a[j_idx], b[j_idx] - a[j_idx]
        rxs = np.imag(np.conj(r) * s)
        qp = q - p
        t_num = np.imag(np.conj(qp) * s)
        u_num = np.imag(np.conj(qp) * r)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = t_num / rxs
            u = u_num / rxs
        hit = (np.abs(rxs) > 1e-14) & (t > 1e-10) & (t < 1 - 1e-10) & \
              (u > 1e-10) & (u < 1 - 1e-10)
        # with touch classification on, a crossing at near-zero angle is
        # tangential contact rather than transversal
        sin_angle = np.abs(rxs) / (np.abs(r) * np.abs(s) + 1e-300)
        proper = hit & ((sin_angle > 0.05) | (touch_eps <= 0))
        for jj, tt in zip(j_idx[proper], t[proper]):
            crossings.append((p + tt * r, (i, int(jj))))
        if touch_eps > 0:
            grazing = hit & ~proper
            for jj in j_idx[grazing]:
                touch_candidates.append((i, int(jj), 0.0))
            near = ~hit
            for jj in j_idx[near]:
                d = _segseg_distance(a[i], b[i], a[jj], b[jj])
                if d < touch_eps:
                    touch_candidates.append((i, int(jj), d))
    touches = []
    if touch_candidates:
        # cluster spatially: a tangential contact zone spans many segments
        touch_candidates.sort(key=lambda t: t[2])
        cluster_radius = max(12.0 * np.sqrt(touch_eps), 4.0 * touch_eps)
        accepted: list[complex] = []
        for i, j, d in touch_candidates:
            p = 0.5 * (a[i] + a[j])
            if any(abs(p - q) < cluster_radius for q in accepted):
                continue
            accepted.append(p)
            touches.append((p, (i, j)))
    return crossings, touches


def _segseg_distance(a1, b1, a2, b2, n: int = 8):
    """Approximate distance between two segments by mutual point sampling."""
    t = np.linspace(0.0, 1.0, n)
    p1 = a1 + t * (b1 - a1)
    p2 = a2 + t * (b2 - a2)
    return float(np.abs(p1[:, None] - p2[None, :]).min())


def hausdorff_distance(pts_a: np.ndarray, pts_b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two sampled curves."""
    pts_a = np.asarray(pts_a, dtype=complex)
    pts_b = np.asarray(pts_b, dtype=complex)
    d1 = distance_to_polygon(pts_b, pts_a).max()
    d2 = distance_to_polygon(pts_a, pts_b).max()
    return float(max(d1, d2))
