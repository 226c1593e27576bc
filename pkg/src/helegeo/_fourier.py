"""Spectral utilities for 2*pi-periodic sampled data.

Conventions: a series is stored as complex coefficients ``c`` in numpy FFT
layout (wavenumbers ``k = 0, 1, ..., M/2-1, -M/2, ..., -1``), normalized so
that ``f(theta) = sum_k c[k] exp(i k theta)``.  Fitting M uniform samples is
``fft(samples) / M``.
"""

from __future__ import annotations

import numpy as np


def wavenumbers(m: int) -> np.ndarray:
    return np.fft.fftfreq(m, d=1.0 / m)


def fit(samples: np.ndarray) -> np.ndarray:
    """Coefficients (FFT layout) interpolating uniform samples on [0, 2*pi)."""
    samples = np.asarray(samples)
    return np.fft.fft(samples) / samples.shape[-1]


def truncate(coeffs: np.ndarray, cutoff: int) -> np.ndarray:
    """Zero all modes with |k| > cutoff (returns a copy, same length)."""
    c = np.array(coeffs, copy=True)
    k = wavenumbers(len(c))
    c[np.abs(k) > cutoff] = 0.0
    return c


def derivative(coeffs: np.ndarray, order: int = 1) -> np.ndarray:
    """Coefficients of the order-th derivative.

    The unmatched Nyquist mode is zeroed for odd orders (standard practice
    for real-valued spectral differentiation).
    """
    c = np.asarray(coeffs)
    m = len(c)
    k = wavenumbers(m)
    fac = (1j * k) ** order
    if order % 2 == 1 and m % 2 == 0:
        fac = fac.copy()
        fac[m // 2] = 0.0
    return c * fac


def resample(coeffs: np.ndarray, m_out: int) -> np.ndarray:
    """Values at m_out uniform points via mode transfer and inverse FFT.

    Downsampling folds (aliases) out-of-range modes, which is exact whenever
    the series was already truncated below the target Nyquist.
    """
    c = np.asarray(coeffs)
    m = len(c)
    if m_out == m:
        return np.fft.ifft(c * m)
    ks = wavenumbers(m).astype(int)
    out = np.zeros(m_out, dtype=complex)
    np.add.at(out, ks % m_out, c)
    return np.fft.ifft(out * m_out)


def evaluate(coeffs: np.ndarray, theta, chunk: int = 1 << 22) -> np.ndarray:
    """Evaluate the series at arbitrary angles (vectorized, chunked).

    Only nonzero modes participate, so truncated series stay cheap.
    """
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    th = np.atleast_1d(theta).ravel()
    c = np.asarray(coeffs)
    k = wavenumbers(len(c))
    nz = c != 0.0
    if not np.any(nz):
        vals = np.zeros(th.shape, dtype=complex)
    else:
        kn, cn = k[nz], c[nz]
        block = max(1, chunk // max(1, len(kn)))
        vals = np.empty(th.shape, dtype=complex)
        for i in range(0, len(th), block):
            sl = slice(i, min(i + block, len(th)))
            vals[sl] = np.exp(1j * np.outer(th[sl], kn)) @ cn
    vals = vals.reshape(np.atleast_1d(theta).shape)
    return vals[()] if scalar else vals


def tail_fraction(coeffs: np.ndarray, frac: float = 0.25) -> float:
    """Relative l2 weight of the top-|k| quarter of the spectrum.

    A cheap resolution diagnostic: well-resolved smooth curves have a tiny
    tail fraction.
    """
    c = np.asarray(coeffs)
    k = np.abs(wavenumbers(len(c)))
    kmax = k.max()
    total = np.sum(np.abs(c[1:]) ** 2)  # ignore the mean
    if total == 0.0:
        return 0.0
    tail = np.sum(np.abs(c[k >= (1.0 - frac) * kmax]) ** 2)
    return float(np.sqrt(tail / total))


def conjugate_samples(u: np.ndarray) -> np.ndarray:
    """Harmonic conjugate of real periodic samples (zero-mean convention).

    In Fourier space v_k = -i*sign(k) u_k, which is the boundary relation
    between the real and imaginary parts of a function holomorphic in the
    unit disc with Im = 0 at the origin.
    """
    u = np.asarray(u, dtype=float)
    m = len(u)
    uk = np.fft.fft(u)
    k = wavenumbers(m)
    vk = -1j * np.sign(k) * uk
    if m % 2 == 0:
        vk[m // 2] = 0.0
    return np.real(np.fft.ifft(vk))
