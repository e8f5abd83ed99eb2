"""Boundary evolution operator ``W_b = W_b1 + W_b2`` for Neumann data.

For mean-free, compactly supported boundary data ``h_e`` let
``F(w) = int h_e(t) exp(i w t) dt``.  With ``b >= 0``

    nu1(b) = F(b^2) / (i pi),        W_b1 h_e(x, t) = int_0^inf exp(-i b^2 t + i b x) nu1(b) db,
    nu2(b) = -F(-b^2) / pi,          W_b2 h_e(x, t) = int_0^inf exp(i b^2 t - b x) nu2(b) db.

Substituting ``w = b^2`` shows ``d/dx (W_b1 + W_b2)|_{x=0} = h_e``.  Spectra
are stored in the unitary convention, ``phi_hat = sqrt(2 pi) nu1`` and
``psi_hat = sqrt(2 pi) nu2``.  The b-integrals are evaluated with
Gauss-Legendre panels sized to the local oscillation of the integrand.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate

from .exceptions import InvalidInputError, QuadratureError
from .grids import UNITARY, Grid1D, GridFunction, SpectralFunction, TimeSlab, TimeTrace
from .quadrature import fourier_integral, gauss_panels
from .sobolev import BoundaryExtension, extend_boundary_data

SQRT_2PI = np.sqrt(2.0 * np.pi)
PANEL_ORDER = 20
PANEL_PHASE = 14.0
GRADED_DECADES = 3
SPECTRUM_FLOOR = 1e-8
_CHUNK_BYTES = 64 * 2**20


def beta_panels(beta_max: float, x_span: float, time_span: float, phase: float = PANEL_PHASE):
    """Panel edges on ``[0, beta_max]``.

    A panel starting at ``b`` has width ``phase / (x_span + 2 b time_span)``,
    so each carries at most ``phase`` radians of oscillation of
    ``exp(i (b x - b^2 t))``.  The first panel is refined geometrically over
    three decades.
    """
    if beta_max <= 0:
        raise InvalidInputError("beta_max must be positive")
    X = max(float(x_span), 1e-12)
    theta = max(float(time_span), 1e-12)
    total = (X * beta_max + theta * beta_max**2) / phase
    count = max(1, int(np.ceil(total)))
    k = np.arange(count + 1) * (total / count)
    edges = (-X + np.sqrt(X**2 + 4.0 * theta * phase * k)) / (2.0 * theta)
    edges[-1] = beta_max
    first = edges[1]
    graded = first * np.logspace(-GRADED_DECADES, 0, GRADED_DECADES + 1)
    return np.concatenate([[0.0], graded, edges[2:]])


def beta_nodes(beta_max, x_span, time_span, order: int = PANEL_ORDER):
    return gauss_panels(beta_panels(beta_max, x_span, time_span), order)


def extension_transform(h_e: TimeTrace, omega) -> np.ndarray:
    """``F(w) = int h_e(t) exp(i w t) dt`` by Filon quadrature over the support.

    For a :class:`BoundaryExtension` the profile is integrated once and the
    shifted copy contributes the exact factor ``exp(i w shift)``.
    """
    omega = np.asarray(omega, dtype=float)
    if isinstance(h_e, BoundaryExtension):
        base = fourier_integral(h_e.piece, h_e.dt, omega, h_e.t_min)
        return (1.0 - np.exp(1j * omega * h_e.shift)) * base
    v = h_e.values
    if abs(v[-1]) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
        raise InvalidInputError("boundary trace is not compactly supported in its sample range")
    return fourier_integral(v, h_e.dt, omega, h_e.t_min)


def boundary_spectra(h_e: TimeTrace, beta=None, weights=None, beta_max: float | None = None):
    """Unitary spectra ``(phi_hat, psi_hat)`` of the two boundary components on ``b >= 0``.

    ``beta``/``weights`` are quadrature nodes; by default a panel mesh up to
    ``beta_max`` (or ``pi / dt``) sized for the support of ``h_e``.
    """
    if beta is None:
        bmax = beta_max if beta_max is not None else np.pi / h_e.dt
        beta, weights = beta_nodes(bmax, 1.0, h_e.t_max)
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0):
        raise InvalidInputError("boundary spectra are defined on b >= 0 only")
    w2 = beta**2
    both = extension_transform(h_e, np.concatenate([w2, -w2]))
    plus, minus = both[: beta.size], both[beta.size :]
    phi = SQRT_2PI * plus / (1j * np.pi)
    psi = -SQRT_2PI * minus / np.pi
    return (
        SpectralFunction(beta, phi, UNITARY, weights=weights),
        SpectralFunction(beta, psi, UNITARY, weights=weights),
    )


def _weights(spec: SpectralFunction) -> np.ndarray:
    if spec.weights is None:
        raise InvalidInputError("spectrum carries no quadrature weights")
    return spec.weights


def eval_Wb1(phi_hat: SpectralFunction, grid: Grid1D, t: float) -> GridFunction:
    """``(2 pi)^(-1/2) int exp(-i b^2 t + i b x) phi_hat(b) db`` on ``grid``."""
    b = phi_hat.freqs
    coef = _weights(phi_hat) * phi_hat.values * np.exp(-1j * b**2 * t) / SQRT_2PI
    return GridFunction(grid, _sum_modes(np.exp, 1j * b, grid.points, coef))


def eval_Wb2(
    psi_hat: SpectralFunction,
    grid: Grid1D,
    t: float,
    diagnostic: bool = False,
    tol: float | None = None,
) -> GridFunction:
    """``(2 pi)^(-1/2) int exp(i b^2 t - b x) psi_hat(b) db`` for ``x >= 0``.

    With ``diagnostic`` the even continuation ``x -> |x|`` is returned on
    grids reaching ``x < 0``.  With ``tol`` the truncation estimate
    ``int_{b_max/2}^{b_max} |psi_hat| exp(-b x) db`` (relative to the value
    scale) must stay below ``tol``.
    """
    x = grid.points
    if np.any(x < 0) and not diagnostic:
        raise InvalidInputError("W_b2 is evaluated on x >= 0 (use diagnostic=True for |x|)")
    b = psi_hat.freqs
    w = _weights(psi_hat)
    coef = w * psi_hat.values * np.exp(1j * b**2 * t) / SQRT_2PI
    values = _sum_modes(np.exp, -b, np.abs(x), coef)
    if tol is not None:
        upper = b > 0.5 * b[-1]
        tail = np.exp(-np.outer(np.abs(x), b[upper])) @ (w[upper] * np.abs(psi_hat.values[upper]))
        scale = max(float(np.max(np.abs(values))), np.sum(w * np.abs(psi_hat.values)) * 1e-3)
        worst = float(np.max(tail)) / scale if scale > 0 else 0.0
        if worst > tol:
            raise QuadratureError(f"W_b2 truncation estimate {worst:.2e} exceeds {tol:g}")
    return GridFunction(grid, values)


def _sum_modes(fn, rate, x, coef) -> np.ndarray:
    out = np.zeros(x.size, dtype=complex)
    rows = max(1, _CHUNK_BYTES // (16 * max(1, rate.size)))
    for a in range(0, x.size, rows):
        out[a : a + rows] = fn(np.outer(x[a : a + rows], rate)) @ coef
    return out


def kernel_Kt(x: float, y: float, t: float, epsabs: float = 1e-12, epsrel: float = 1e-10) -> complex:
    """``K_t(x, y) = int_0^inf exp(i b^2 t - b |x| - i y b) db`` by adaptive quadrature.

    For ``t > 0`` the path is rotated to ``b = exp(i theta) r``, where the
    integrand is a decaying Gaussian; ``theta`` is chosen so the linear term
    does not grow against it.  ``t < 0`` follows from conjugation symmetry,
    and ``t = 0`` uses the Fourier-weighted rule for semi-infinite ranges.
    """
    if t < 0.0:
        return complex(np.conj(kernel_Kt(x, -y, -t, epsabs, epsrel)))
    z = abs(x) + 1j * y
    if t == 0.0:
        if x == 0.0:
            raise QuadratureError("K_0(0, y) is not absolutely integrable")
        re = _quad(lambda b: np.exp(-b * abs(x)), 0, np.inf, weight="cos", wvar=y, epsabs=epsabs)
        im = _quad(lambda b: np.exp(-b * abs(x)), 0, np.inf, weight="sin", wvar=y, epsabs=epsabs)
        return complex(re, -im)
    theta = np.pi / 4
    if y > abs(x):
        # keep Re(z e^{i theta}) >= 0, or the growth below exp(1) when x = 0
        theta = max(np.arctan(abs(x) / y), min(np.pi / 4, 8.0 * t / y**2))
    rot = np.exp(1j * theta)

    def f(r):
        return np.exp(1j * (rot * r) ** 2 * t - z * rot * r)

    re = _quad(lambda r: (rot * f(r)).real, 0, np.inf, epsabs=epsabs, epsrel=epsrel)
    im = _quad(lambda r: (rot * f(r)).imag, 0, np.inf, epsabs=epsabs, epsrel=epsrel)
    return complex(re, im)


def _quad(func, a, b, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(func, a, b, limit=400, **kw)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"adaptive quadrature did not converge: {exc}") from exc
    return val


class BoundaryOperator:
    """Cached evaluation of ``W_b h_e`` on a fixed half-line grid and time grid.

    The b-nodes and the separable factors ``exp(i b x)``, ``exp(-b x)``,
    ``exp(-+ i b^2 t)`` depend only on the grids, so repeated applications
    (one per Picard iterate) cost two matrix products.
    """

    def __init__(self, grid: Grid1D, times, support: float, beta_max: float | None = None):
        self.grid = grid
        self.times = np.asarray(times, dtype=float)
        x = grid.points
        self.beta_max = float(beta_max) if beta_max is not None else np.pi / grid.dx
        span = max(support, float(self.times[-1]))
        self.beta, self.weights = beta_nodes(self.beta_max, float(np.max(np.abs(x))), span)
        b = self.beta
        self._osc_x = np.exp(1j * np.outer(x, b))
        self._damp_x = np.exp(-np.outer(np.abs(x), b)).astype(complex)
        self._phase_t = np.exp(-1j * np.outer(b**2, self.times))

    @property
    def n_nodes(self) -> int:
        return self.beta.size

    def spectra(self, h_e: TimeTrace):
        return boundary_spectra(h_e, self.beta, self.weights)

    def field(self, h_e: TimeTrace) -> np.ndarray:
        """``values[m, j] = W_b h_e(x_j, t_m)``."""
        phi, psi = self.spectra(h_e)
        return self.field_from_spectra(phi.values, psi.values)

    def field_from_spectra(self, phi, psi) -> np.ndarray:
        c1 = (self.weights * phi / SQRT_2PI)[:, None] * self._phase_t
        c2 = (self.weights * psi / SQRT_2PI)[:, None] * self._phase_t.conj()
        return (self._osc_x @ c1 + self._damp_x @ c2).T

    def neumann_trace(self, h_e: TimeTrace) -> np.ndarray:
        """``d/dx W_b h_e(0, t_m)`` from the b-representation."""
        phi, psi = self.spectra(h_e)
        return self.neumann_from_spectra(phi.values, psi.values)

    def neumann_from_spectra(self, phi, psi) -> np.ndarray:
        b, w = self.beta, self.weights
        d1 = (w * 1j * b * phi / SQRT_2PI) @ self._phase_t
        d2 = (w * -b * psi / SQRT_2PI) @ self._phase_t.conj()
        return d1 + d2

    def field_and_trace(self, h_e: TimeTrace):
        """Field values and the Neumann trace at ``x = 0`` from one spectral evaluation."""
        phi, psi = self.spectra(h_e)
        return (
            self.field_from_spectra(phi.values, psi.values),
            self.neumann_from_spectra(phi.values, psi.values),
        )


def boundary_propagate(
    h: TimeTrace,
    s: float,
    grid: Grid1D,
    times=None,
    beta_max: float | None = None,
) -> TimeSlab:
    """Space-time field of ``W_b h_e`` on the half-line ``grid`` for ``t`` in ``times``.

    ``h`` is boundary data on ``[0, T]``; it is extended with
    :func:`extend_boundary_data` for regularity ``s``.  ``times`` defaults to
    the sample times of ``h``.
    """
    if grid.x_min != 0.0:
        raise InvalidInputError("boundary_propagate needs a half-line grid [0, L]")
    h_e = extend_boundary_data(h, s)
    times = h.times if times is None else np.asarray(times, dtype=float)
    if beta_max is None:
        beta_max = adaptive_beta_max(h_e, np.pi / grid.dx)
    op = BoundaryOperator(grid, times, h_e.t_max, beta_max)
    return TimeSlab(grid, times, op.field(h_e), meta={"beta_max": beta_max, "n_beta": op.n_nodes})


def adaptive_beta_max(h_e: TimeTrace, cap: float, floor: float = SPECTRUM_FLOOR) -> float:
    """Smallest ``b`` beyond which ``|F(+-b^2)|`` stays below ``floor * max``, capped at ``cap``."""
    b = np.linspace(0.0, cap, 2048)
    mag = np.abs(extension_transform(h_e, np.concatenate([b**2, -(b**2)])))
    mag = np.maximum(mag[: b.size], mag[b.size :])
    peak = mag.max()
    if peak == 0:
        return cap
    above = np.nonzero(mag >= floor * peak)[0]
    return float(min(cap, b[min(above[-1] + 1, b.size - 1)] * 1.05))


def eval_Wb_points(phi_hat: SpectralFunction, psi_hat: SpectralFunction, x, t) -> np.ndarray:
    """``W_b h_e`` at scattered points ``(x_i, t_i)`` with ``x_i >= 0`` (broadcast shapes)."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if np.any(x < 0):
        raise InvalidInputError("points must satisfy x >= 0")
    b = phi_hat.freqs
    c1 = _weights(phi_hat) * phi_hat.values / SQRT_2PI
    c2 = _weights(psi_hat) * psi_hat.values / SQRT_2PI
    xf, tf = x.ravel(), t.ravel()
    out = np.empty(xf.size, dtype=complex)
    rows = max(1, _CHUNK_BYTES // (16 * max(1, b.size)))
    for a in range(0, xf.size, rows):
        xs, ts = xf[a : a + rows, None], tf[a : a + rows, None]
        q = b**2 * ts
        out[a : a + rows] = np.exp(1j * (b * xs - q)) @ c1 + (np.exp(-b * xs + 1j * q)) @ c2
    return out.reshape(x.shape)


def eval_Wb_grid(phi_hat: SpectralFunction, psi_hat: SpectralFunction, x, t,
                 parts: tuple = (1, 2)) -> np.ndarray:
    """``values[m, j]`` of ``W_b h_e`` (or only the listed components) at ``x_j >= 0``, ``t_m``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(x < 0):
        raise InvalidInputError("x must be nonnegative")
    b = phi_hat.freqs
    out = np.zeros((t.size, x.size), dtype=complex)
    rows = max(1, _CHUNK_BYTES // (16 * max(1, b.size)))
    if 1 in parts:
        c1 = (_weights(phi_hat) * phi_hat.values / SQRT_2PI)[:, None] * np.exp(-1j * np.outer(b**2, t))
        for a in range(0, x.size, rows):
            out[:, a : a + rows] += (np.exp(1j * np.outer(x[a : a + rows], b)) @ c1).T
    if 2 in parts:
        c2 = (_weights(psi_hat) * psi_hat.values / SQRT_2PI)[:, None] * np.exp(1j * np.outer(b**2, t))
        for a in range(0, x.size, rows):
            out[:, a : a + rows] += (np.exp(-np.outer(x[a : a + rows], b)) @ c2).T
    return out
