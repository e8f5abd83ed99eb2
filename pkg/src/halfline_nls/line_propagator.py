"""Free Schrodinger group on the line, Duhamel integrals and their Neumann traces at x = 0.

``W(t)`` multiplies the unitary spectrum by ``exp(-i b^2 t)`` so that
``i u_t + u_xx = 0``.  Grids are treated as one period of a periodic
function; data must decay well inside the grid.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DomainError, InvalidInputError
from .grids import Grid1D, GridFunction, TimeSlab, TimeTrace
from .quadrature import cumulative_oscillatory
from .sobolev import line_norms


def _freqs(grid: Grid1D) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, grid.dx)


def _check_resolved(values, dx, s=0.0):
    line_norms(np.atleast_2d(values), dx, s, check=True)


def free_propagate(phi: GridFunction, t: float, check: bool = True) -> GridFunction:
    """``W(t) phi``; an isometry of every H^s norm."""
    if check:
        _check_resolved(phi.values, phi.grid.dx)
    b = _freqs(phi.grid)
    return GridFunction(phi.grid, np.fft.ifft(np.fft.fft(phi.values) * np.exp(-1j * b**2 * t)))


def free_evolution(values, grid: Grid1D, times) -> np.ndarray:
    """``W(t_m) phi`` for all ``t_m`` at once; shape ``(len(times), n)``."""
    b = _freqs(grid)
    spec = np.fft.fft(np.asarray(values, dtype=complex))
    return np.fft.ifft(spec[None, :] * np.exp(-1j * np.outer(times, b**2)), axis=1)


def duhamel_spectra(f_values, grid: Grid1D, dt: float) -> np.ndarray:
    """FFT coefficients of ``int_0^{t_m} W(t_m - tau) f(tau) dtau`` for every time level.

    The tau-integral of ``exp(i b^2 tau) fhat(b, tau)`` is taken with the
    cubic Filon rule, exact in the oscillatory factor, so stiff high modes
    cost no extra time resolution.  Returns shape ``(M + 1, n)``.
    """
    f_values = np.asarray(f_values, dtype=complex)
    b2 = _freqs(grid) ** 2
    fhat = np.fft.fft(f_values, axis=1)
    running = cumulative_oscillatory(fhat.T, dt, b2)
    times = dt * np.arange(f_values.shape[0])
    return (running * np.exp(-1j * np.outer(b2, times))).T


def duhamel_field(f_slab: TimeSlab) -> np.ndarray:
    """``int_0^{t_m} W(t_m - tau) f(tau) dtau`` on the slab grid for all ``t_m``."""
    return np.fft.ifft(duhamel_spectra(f_slab.values, f_slab.grid, f_slab.dt), axis=1)


def duhamel(f_slab: TimeSlab, t: float) -> GridFunction:
    """Duhamel integral ``int_0^t W(t - tau) f(tau) dtau`` at a time level ``t`` of the slab."""
    if t < -1e-14 or t > f_slab.horizon * (1 + 1e-12) + 1e-14:
        raise DomainError(f"t = {t} outside the slab [0, {f_slab.horizon}]")
    m = f_slab.time_index(t)
    sub = f_slab.values[: max(m + 1, 2)]
    spec = duhamel_spectra(sub, f_slab.grid, f_slab.dt)[m]
    return GridFunction(f_slab.grid, np.fft.ifft(spec))


def _zero_index(grid: Grid1D) -> float:
    j = -grid.x_min / grid.dx
    if grid.x_min > 0 or grid.x_max < 0:
        raise InvalidInputError("grid does not contain x = 0")
    return j


def neumann_from_spectra(spec, grid: Grid1D) -> np.ndarray:
    """``d/dx`` at ``x = 0`` of fields given by FFT coefficients along the last axis."""
    b = _freqs(grid)
    if grid.n % 2 == 0:
        b = b.copy()
        b[grid.n // 2] = 0.0
    j0 = _zero_index(grid)
    phase = np.exp(2j * np.pi * np.fft.fftfreq(grid.n) * j0)
    return (np.asarray(spec) * (1j * b * phase)).sum(axis=-1) / grid.n


def value_from_spectra(spec, grid: Grid1D) -> np.ndarray:
    """Value at ``x = 0`` of fields given by FFT coefficients along the last axis."""
    j0 = _zero_index(grid)
    phase = np.exp(2j * np.pi * np.fft.fftfreq(grid.n) * j0)
    return (np.asarray(spec) * phase).sum(axis=-1) / grid.n


def neumann_trace_free(u0_star: GridFunction, times) -> TimeTrace:
    """``g(t) = d/dx W(t) u0*`` at ``x = 0`` by spectral differentiation."""
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise InvalidInputError("need at least two times")
    _check_resolved(u0_star.values, u0_star.grid.dx, 1.0)
    b2 = _freqs(u0_star.grid) ** 2
    spec = np.fft.fft(u0_star.values)[None, :] * np.exp(-1j * np.outer(times, b2))
    return TimeTrace(times[0], times[1] - times[0], neumann_from_spectra(spec, u0_star.grid))


def neumann_trace_duhamel(f_slab: TimeSlab) -> TimeTrace:
    """``p(t) = -i d/dx int_0^t W(t - tau) f(tau) dtau`` at ``x = 0`` on the slab times."""
    spec = duhamel_spectra(f_slab.values, f_slab.grid, f_slab.dt)
    return TimeTrace(0.0, f_slab.dt, -1j * neumann_from_spectra(spec, f_slab.grid))
