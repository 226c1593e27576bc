"""Riemann maps of curve interiors and the associated Green's functions.

The map f from the unit disc onto the interior of a smooth Jordan curve with
f(0) = 0 and f'(0) > 0 is computed through its boundary correspondence: the
curve parameter theta(phi) at which the boundary point f(e^{i phi}) sits.
The correspondence solves the conjugation condition that gamma(theta(phi)),
as a function of phi, has no negative-frequency Fourier content, vanishing
mean, and real first mode.  A damped Newton iteration drives all constrained
modes below tolerance; the linearized steps are solved densely for small
systems and by LSMR with FFT-applied operators for large ones.
"""

from __future__ import annotations

import numpy as np

from . import _fourier as fourier
from .errors import DomainError, NumericError
from .flow_geometry.area import gauss_legendre_01
from .flow_geometry.curve import BoundaryCurve

TWO_PI = 2.0 * np.pi


class ConformalMap:
    """Riemann map of a curve interior, normalized by f(0)=0, f'(0)>0.

    Attributes
    ----------
    curve : BoundaryCurve
    theta : array
        Correspondence samples theta(phi_j) at m uniform circle angles.
    coeffs : array
        Taylor coefficients a_k (k = 0..m-1, a_0 ~ 0) of f on the disc.
    residual : float
        Sup norm of the constrained Fourier modes at the solution.
    """

    def __init__(self, curve: BoundaryCurve, theta: np.ndarray, residual: float):
        self.curve = curve
        self.theta = np.asarray(theta, dtype=float)
        self.m = len(self.theta)
        self.residual = float(residual)
        boundary = curve.gamma(self.theta)
        c = np.fft.fft(boundary) / self.m
        c[self.m // 2:] = 0.0     # analytic part only
        c[0] = 0.0
        self.coeffs = c
        sig = np.nonzero(np.abs(c) > 1e-16 * max(1.0, np.abs(c).max()))[0]
        self._kmax = int(sig.max()) if len(sig) else 1
        self._phi = TWO_PI * np.arange(self.m) / self.m
        self._boundary = boundary
        self._fp_boundary = None
        self._seed_grid = None
        # correspondence as a periodic deviation for interpolation both ways
        self._dev_coeffs = np.fft.fft(self.theta - self._phi -
                                      _unwrap_offset(self.theta, self._phi)) / self.m

    # -- basic data -------------------------------------------------------

    @property
    def conformal_radius(self) -> float:
        return float(np.real(self.coeffs[1]))

    def boundary_values(self) -> np.ndarray:
        return self._boundary

    def boundary_fprime(self) -> np.ndarray:
        """f'(e^{i phi_j}) at the correspondence samples."""
        if self._fp_boundary is None:
            self._fp_boundary = self.fprime(np.exp(1j * self._phi))
        return self._fp_boundary

    def correspondence(self, phi):
        """theta(phi) by spectral interpolation of the periodic deviation."""
        phi = np.asarray(phi, dtype=float)
        dev = np.real(fourier.evaluate(self._dev_coeffs, phi))
        off = _unwrap_offset(self.theta, self._phi)
        return phi + off + dev

    def correspondence_inverse(self, theta, newton_steps: int = 30):
        """phi(theta): invert the monotone correspondence circle map."""
        theta = np.asarray(theta, dtype=float)
        phi = np.array(theta, copy=True)
        for _ in range(newton_steps):
            f = _angdiff(self.correspondence(phi), theta)
            h = 1e-6
            df = _angdiff(self.correspondence(phi + h), self.correspondence(phi - h)) / (2 * h)
            step = f / np.maximum(df, 0.05)
            phi = phi - step
            if np.max(np.abs(step)) < 1e-13:
                break
        return phi

    # -- evaluation on the closed disc -----------------------------------------

    def f(self, w):
        """Map points of the closed unit disc into the curve interior."""
        w = np.asarray(w, dtype=complex)
        a = self.coeffs
        out = np.zeros_like(w)
        for k in range(self._kmax, 0, -1):
            out = (out + a[k]) * w
        return out

    def fprime(self, w):
        w = np.asarray(w, dtype=complex)
        a = self.coeffs
        out = np.zeros_like(w)
        for k in range(self._kmax, 1, -1):
            out = (out + k * a[k]) * w
        return out + a[1]

    # -- inversion -----------------------------------------------------------

    def _seeds(self):
        if self._seed_grid is None:
            r = np.concatenate([[1e-3], np.linspace(0.15, 0.95, 9), [0.999]])
            phi = TWO_PI * np.arange(48) / 48
            w = (r[:, None] * np.exp(1j * phi)[None, :]).ravel()
            self._seed_grid = (w, self.f(w))
        return self._seed_grid

    def inverse(self, z, tol: float = 1e-13, max_iter: int = 60):
        """g(z) = f^{-1}(z) by damped Newton, seeded from a coarse disc grid."""
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        zf = np.atleast_1d(z).ravel()
        ws, fs = self._seeds()
        idx = np.argmin(np.abs(fs[None, :] - zf[:, None]), axis=1)
        w = ws[idx].astype(complex)
        res = np.abs(self.f(w) - zf)
        for _ in range(max_iter):
            active = res > tol
            if not np.any(active):
                break
            wa = w[active]
            fa = self.f(wa) - zf[active]
            da = self.fprime(wa)
            step = fa / da
            # damped update keeping iterates in the closed disc
            for damp in (1.0, 0.5, 0.25, 0.125):
                cand = wa - damp * step
                r_new = np.abs(cand)
                cand = np.where(r_new > 1.0, cand / r_new, cand)
                f_new = np.abs(self.f(cand) - zf[active])
                better = f_new < res[active]
                if np.all(better) or damp == 0.125:
                    wa = np.where(better, cand, wa - 0.05 * step)
                    break
            w[active] = wa
            res[active] = np.abs(self.f(w[active]) - zf[active])
        if np.any(res > 1e-8):
            worst = float(res.max())
            raise NumericError("interior inversion did not converge "
                               f"(worst |f(w)-z| = {worst:.2e}); "
                               "point may lie outside the curve", residual=worst)
        return complex(w[0]) if scalar else w.reshape(np.shape(z))

    # -- Green's function -------------------------------------------------------

    def green(self, z):
        """p(z) = -(1/4 pi) log |g(z)|^2; positive inside, 0 on the boundary."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) == 0.0):
            raise DomainError("the Green's function has its pole at 0")
        try:
            w = self.inverse(z)
        except NumericError as exc:
            if not np.all(self.curve.contains(z)):
                raise DomainError("point outside or on the boundary") from exc
            raise
        mod = np.abs(w)
        if np.any(mod > 1.0 + 1e-9):
            raise DomainError("point outside the domain")
        return -np.log(np.minimum(mod, 1.0)) / TWO_PI

    def boundary_normal_derivative(self, phi):
        """|dp/dn| at the boundary point with circle preimage angle phi."""
        phi = np.asarray(phi, dtype=float)
        fp = self.fprime(np.exp(1j * phi))
        mod = np.abs(fp)
        if np.any(mod < 1e-12):
            raise NumericError("boundary derivative degenerates (near-cusp)",
                               residual=float(mod.min()))
        return 1.0 / (TWO_PI * mod)

    # -- quadrature over the interior ----------------------------------------------

    def integrate(self, density, tol: float = 1e-9, n_theta: int = 128,
                  n_r: int = 48, max_doublings: int = 4) -> float:
        """Integral of density over the interior via the disc parameterization."""
        prev = self._disc_value(density, n_theta, n_r)
        val = prev
        for _ in range(max_doublings):
            n_theta *= 2
            n_r = int(1.5 * n_r)
            val = self._disc_value(density, n_theta, n_r)
            if abs(val - prev) <= tol * max(1.0, abs(val)):
                return val
            prev = val
        raise NumericError("conformal quadrature did not converge",
                           residual=abs(val - prev))

    def _disc_value(self, density, n_theta: int, n_r: int) -> float:
        x, wts = gauss_legendre_01(n_r)
        phi = TWO_PI * np.arange(n_theta) / n_theta
        w = x[:, None] * np.exp(1j * phi)[None, :]
        fw = self.f(w.ravel())
        jac = np.abs(self.fprime(w.ravel())) ** 2
        vals = np.asarray(density(fw), dtype=float)
        integrand = (vals * jac).reshape(n_r, n_theta) * x[:, None]
        return float(integrand.sum(axis=1).dot(wts) * TWO_PI / n_theta)


class GreenData:
    """Green's function access for a mapped domain (lazy inverse map)."""

    def __init__(self, conformal_map: ConformalMap):
        self.map = conformal_map

    def __call__(self, z):
        return self.map.green(z)

    def normal_derivative(self, phi):
        return self.map.boundary_normal_derivative(phi)


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _angdiff(a, b):
    d = (np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.where(d > np.pi, d - TWO_PI, d)


def _unwrap_offset(theta, phi):
    """Mean winding offset so theta - phi - offset is a small periodic deviation."""
    return float(np.round(np.mean(theta - phi) / TWO_PI) * TWO_PI)


def _unwrap_increasing(theta):
    """Continuous increasing representative with theta[0] in [0, 2*pi)."""
    th = np.unwrap(np.asarray(theta, dtype=float))
    return th - TWO_PI * np.floor(th[0] / TWO_PI)


def _residual_vector(curve: BoundaryCurve, theta: np.ndarray):
    m = len(theta)
    c = np.fft.fft(curve.gamma(theta)) / m
    neg = c[m // 2:]
    parts = [neg.real, neg.imag, [c[0].real, c[0].imag, c[1].imag]]
    return np.concatenate([np.ravel(p) for p in parts]), c


def riemann_map(curve: BoundaryCurve, m: int | None = None, tol: float = 1e-10,
                theta0: np.ndarray | None = None, max_newton: int = 60,
                validate: bool = True, stall_floor: float = 1e-6) -> ConformalMap:
    """Solve for the boundary correspondence of the interior Riemann map.

    Parameters
    ----------
    curve : BoundaryCurve
    m : int, optional
        Number of correspondence samples; defaults to twice the mode cutoff,
        at least 256.
    theta0 : array, optional
        Warm-start correspondence (e.g. from a neighbouring family slice).
    stall_floor : float
        Residual level below which a stalled iteration is accepted: the
        discrete system's least-squares floor equals the curve's spectral
        tail, which is zero only for analytic curves.  The achieved residual
        is recorded on the returned map.

    Raises
    ------
    NumericError
        If the damped Newton iteration stalls above stall_floor (shapes
        outside the solver's basin); the residual is attached.
    """
    if m is None:
        m = max(256, 2 * curve.cutoff)
    phi = TWO_PI * np.arange(m) / m
    if theta0 is None:
        theta = phi.copy()
    else:
        theta = np.asarray(theta0, dtype=float)
        if len(theta) != m:
            dev = theta - TWO_PI * np.arange(len(theta)) / len(theta)
            dev_i = np.real(fourier.resample(fourier.fit(dev), m))
            theta = phi + dev_i
    res_vec, _ = _residual_vector(curve, theta)
    res = np.abs(res_vec).max()
    res_l2 = float(np.linalg.norm(res_vec))
    for _ in range(max_newton):
        if res < tol:
            break
        step = _newton_step(curve, theta, res_vec, m)
        stalled = np.abs(step).max() < 1e-13
        if not stalled:
            scale = 1.0
            for _ in range(25):
                cand = theta + scale * step
                cand_vec, _ = _residual_vector(curve, cand)
                cand_l2 = float(np.linalg.norm(cand_vec))
                if cand_l2 < res_l2 * (1.0 - 1e-3 * scale):
                    theta, res_vec, res_l2 = cand, cand_vec, cand_l2
                    res = np.abs(res_vec).max()
                    break
                scale *= 0.5
            else:
                stalled = True
        if stalled:
            # the least-squares floor of the discretized system: the curve's
            # own spectral tail; acceptable when below stall_floor
            if res < stall_floor:
                break
            raise NumericError("conformal correspondence iteration stalled",
                               residual=res)
    else:
        raise NumericError("conformal correspondence did not converge",
                           residual=res)
    theta = _unwrap_increasing(theta)
    dtheta = np.diff(np.concatenate([theta, [theta[0] + TWO_PI]]))
    if np.any(dtheta <= 0):
        raise NumericError("correspondence is not monotone "
                           "(curve outside the solver's basin)", residual=res)
    # Im c_1 = 0 leaves a sign ambiguity; rotate the circle by pi if the
    # solve settled on the negative branch (curves anchored away from angle 0)
    c1 = np.fft.fft(curve.gamma(theta))[1] / m
    if np.real(c1) < 0:
        theta = _unwrap_increasing(np.roll(theta, -(m // 2)))
    cmap = ConformalMap(curve, theta, res)
    if cmap.conformal_radius <= 0:
        raise NumericError("normalization failed: nonpositive conformal radius",
                           residual=res)
    if validate:
        bdry = cmap.f(np.exp(1j * phi))
        err = np.abs(bdry - cmap.boundary_values()).max()
        if err > max(1e-6, 1e4 * tol):
            raise NumericError("boundary image mismatch after solve", residual=err)
    return cmap


def _newton_step(curve: BoundaryCurve, theta: np.ndarray, res_vec: np.ndarray,
                 m: int) -> np.ndarray:
    dgam = curve.dgamma(theta)
    if m <= 512:
        # dense least squares on the explicit Jacobian
        k_idx = np.arange(m)
        F = np.exp(-2j * np.pi * np.outer(k_idx, k_idx) / m) / m
        Jc = F * dgam[None, :]
        neg = Jc[m // 2:]
        rows = [neg.real, neg.imag, Jc[0].real[None, :], Jc[0].imag[None, :],
                Jc[1].imag[None, :]]
        J = np.vstack(rows)
        step, *_ = np.linalg.lstsq(J, -res_vec, rcond=None)
        return step
    from scipy.sparse.linalg import LinearOperator, lsmr

    n_cond = len(res_vec)
    # right-precondition by |gamma'|: the operator becomes an FFT composed
    # with a unimodular multiplier, which LSMR resolves in few iterations
    mod = np.abs(dgam)
    phase = dgam / mod

    def matvec(u):
        c = np.fft.fft(phase * u) / m
        neg = c[m // 2:]
        return np.concatenate([neg.real, neg.imag,
                               [c[0].real, c[0].imag, c[1].imag]])

    def rmatvec(v):
        c = np.zeros(m, dtype=complex)
        nneg = m - m // 2
        c[m // 2:] = v[:nneg] + 1j * v[nneg:2 * nneg]
        c[0] = v[-3] + 1j * v[-2]
        c[1] += 1j * v[-1]
        back = np.fft.ifft(c)
        return np.real(np.conj(phase) * back)

    op = LinearOperator((n_cond, m), matvec=matvec, rmatvec=rmatvec)
    sol = lsmr(op, -res_vec, atol=1e-11, btol=1e-11, maxiter=400)
    return sol[0] / mod


# ---------------------------------------------------------------------------
# independent oracle: charge simulation for the conformal radius
# ---------------------------------------------------------------------------

def charge_simulation_radius(curve: BoundaryCurve, n_charges: int = 96,
                             offset: float = 0.35) -> float:
    """|f'(0)| by the charge simulation method (independent of riemann_map).

    Point charges are placed outside the curve along outward normals; the
    harmonic part of the Green's function is matched to -(1/2 pi) log|z| on
    collocation points, and the conformal radius read off at the origin.
    """
    m_col = 4 * n_charges
    th_c = TWO_PI * np.arange(n_charges) / n_charges
    th_m = TWO_PI * np.arange(m_col) / m_col
    base = curve.gamma(th_c)
    normals = curve.outward_normal(th_c)
    spacing = curve.arclength() / n_charges
    charges = base + offset * max(spacing, 0.05) * normals * n_charges / 32
    colloc = curve.gamma(th_m)
    A = np.log(np.abs(colloc[:, None] - charges[None, :]))
    A = np.hstack([A, np.ones((m_col, 1))])
    rhs = np.log(np.abs(colloc)) / 1.0
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    h0 = sol[:-1].dot(np.log(np.abs(charges))) + sol[-1]
    # p = -(1/2pi) log|z| + (1/2pi) * h with h(boundary) = log|z|; crad = e^{h(0)}
    return float(np.exp(h0))
