"""Quadrature kernels: Filon-type rules for e^{i w t} against sampled data, Gauss panels.

The Filon rules integrate the local cubic Lagrange interpolant of uniformly
sampled data exactly against the oscillatory factor, so their error is
O(dt^4) uniformly in the frequency ``w``.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

_SERIES_CUTOFF = 2.0
_SERIES_TERMS = 40
_CHUNK_ENTRIES = 2**22


def filon_moments(theta, m_max: int = 3) -> np.ndarray:
    """Return ``mu[m] = int_0^1 s^m exp(i theta s) ds`` for ``m = 0..m_max``.

    Small ``|theta|`` uses the power series, large ``|theta|`` the upward
    recurrence (stable once ``|theta| > m_max``/2).
    """
    theta = np.asarray(theta, dtype=float)
    mu = np.empty((m_max + 1,) + theta.shape, dtype=complex)
    small = np.abs(theta) < _SERIES_CUTOFF
    if np.any(small):
        z = 1j * theta[small]
        k = np.arange(_SERIES_TERMS)
        powers = z[..., None] ** k / np.array([factorial(int(i)) for i in k], dtype=float)
        for m in range(m_max + 1):
            mu[m][small] = (powers / (m + k + 1)).sum(axis=-1)
    big = ~small
    if np.any(big):
        z = 1j * theta[big]
        e = np.exp(z)
        prev = (e - 1.0) / z
        mu[0][big] = prev
        for m in range(1, m_max + 1):
            prev = (e - m * prev) / z
            mu[m][big] = prev
    return mu


@lru_cache(maxsize=None)
def _lagrange_coeffs(offsets: tuple) -> np.ndarray:
    """Monomial coefficients ``C[k, m]`` of the Lagrange basis on integer ``offsets``."""
    nodes = np.asarray(offsets, dtype=float)
    vander = np.vander(nodes, increasing=True)
    # column k of inv(V) holds the monomial coefficients of basis polynomial k
    return np.linalg.inv(vander).T.copy()


def interval_weights(theta, offsets: tuple) -> np.ndarray:
    """``W[k](theta) = int_0^1 exp(i theta s) l_k(s) ds`` for the basis on ``offsets``."""
    coeffs = _lagrange_coeffs(tuple(offsets))
    mu = filon_moments(theta, len(offsets) - 1)
    return np.tensordot(coeffs, mu, axes=(1, 0))


def _stencil(j: int, n_intervals: int) -> tuple:
    if n_intervals >= 3:
        if j == 0:
            return (0, 1, 2, 3)
        if j == n_intervals - 1:
            return (-2, -1, 0, 1)
        return (-1, 0, 1, 2)
    if n_intervals == 2:
        return (0, 1, 2) if j == 0 else (-1, 0, 1)
    return (0, 1)


def _sample_weights(theta, i: int, n_intervals: int) -> np.ndarray:
    """Combined weight multiplying sample ``i`` (phase relative to ``exp(i theta i)``)."""
    total = np.zeros(np.shape(theta), dtype=complex)
    for j in range(max(0, i - 3), min(n_intervals - 1, i + 2) + 1):
        offs = _stencil(j, n_intervals)
        k = i - j
        if k in offs:
            w = interval_weights(theta, offs)[offs.index(k)]
            total += np.exp(1j * theta * (j - i)) * w
    return total


def fourier_integral(values, dt: float, omega, t0: float = 0.0) -> np.ndarray:
    """``int q(t) exp(i omega t) dt`` over ``[t0, t0 + N dt]`` for the local cubic interpolant ``q``.

    ``values`` has shape ``(N + 1,)`` or ``(N + 1, B)`` (B traces at once); the
    result has shape ``omega.shape`` or ``omega.shape + (B,)``.
    """
    v = np.asarray(values, dtype=complex)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[:, None]
    omega = np.asarray(omega, dtype=float)
    flat = omega.ravel()
    n_int = v.shape[0] - 1
    if n_int < 1:
        raise ValueError("need at least two samples")
    theta = flat * dt
    idx = np.arange(n_int + 1)

    dtft = np.empty((flat.size, v.shape[1]), dtype=complex)
    rows = max(1, _CHUNK_ENTRIES // (n_int + 1))
    for a in range(0, flat.size, rows):
        phase = np.exp(1j * np.outer(theta[a : a + rows], idx))
        dtft[a : a + rows] = phase @ v

    if n_int >= 3:
        interior = _sample_weights(theta, min(4, n_int // 2), max(n_int, 9))
    else:
        interior = np.zeros_like(theta, dtype=complex)
    out = interior[:, None] * dtft
    edges = sorted(set(range(0, min(n_int, 4) + 1)) | set(range(max(0, n_int - 4), n_int + 1)))
    for i in edges:
        ci = _sample_weights(theta, i, n_int)
        out += ((ci - interior) * np.exp(1j * theta * i))[:, None] * v[i][None, :]
    out *= dt * np.exp(1j * flat * t0)[:, None]
    out = out.reshape(omega.shape + (v.shape[1],))
    return out[..., 0] if squeeze else out


def cumulative_oscillatory(G, dt: float, omega) -> np.ndarray:
    """Running integrals ``C[:, m] = int_0^{m dt} exp(i omega tau) G(omega, tau) dtau``.

    ``G`` has shape ``(n_omega, M + 1)`` with samples at ``tau = m dt``.
    """
    G = np.asarray(G, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    n_int = G.shape[1] - 1
    theta = omega * dt
    pieces = np.zeros((G.shape[0], n_int), dtype=complex)
    for j in {0, n_int - 1} if n_int >= 3 else range(n_int):
        offs = _stencil(j, n_int)
        w = interval_weights(theta, offs)
        acc = sum(w[a] * G[:, j + k] for a, k in enumerate(offs))
        pieces[:, j] = acc
    if n_int >= 3:
        offs = (-1, 0, 1, 2)
        w = interval_weights(theta, offs)
        js = np.arange(1, n_int - 1)
        acc = np.zeros((G.shape[0], js.size), dtype=complex)
        for a, k in enumerate(offs):
            acc += w[a][:, None] * G[:, js + k]
        pieces[:, 1 : n_int - 1] = acc
    pieces *= dt * np.exp(1j * np.outer(theta, np.arange(n_int)))
    out = np.zeros_like(G)
    np.cumsum(pieces, axis=1, out=out[:, 1:])
    return out


def cumulative_integral(values, dt: float) -> np.ndarray:
    """Running integral of uniformly sampled data with the local cubic rule (zero frequency)."""
    v = np.asarray(values, dtype=complex)
    return cumulative_oscillatory(v[None, :], dt, np.zeros(1))[0]


def gauss_panels(edges, order: int = 10):
    """Gauss-Legendre nodes and weights on consecutive panels ``[edges[i], edges[i+1]]``."""
    edges = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()
