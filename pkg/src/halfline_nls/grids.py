"""Sampled-function containers: spatial grids, time traces, spectra, slabs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError

UNITARY = "unitary-angular: ghat(b) = (2 pi)^(-1/2) int g(x) exp(-i b x) dx"


def _as_finite_complex(values, name="values"):
    arr = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_min, x_min + dx, ..., x_max`` with ``n`` points (endpoints included)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise InvalidInputError(f"grid needs n >= 8 points, got {self.n}")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise InvalidInputError(f"degenerate grid [{self.x_min}, {self.x_max}]")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @classmethod
    def half_line(cls, L: float, n: int) -> "Grid1D":
        return cls(0.0, float(L), n)

    def mirrored(self) -> "Grid1D":
        """The symmetric line grid ``[-x_max, x_max]`` sharing this half-line grid's spacing."""
        if self.x_min != 0.0:
            raise InvalidInputError("mirroring needs a half-line grid starting at x = 0")
        return Grid1D(-self.x_max, self.x_max, 2 * self.n - 1)

    def index_of(self, x: float) -> int:
        j = (x - self.x_min) / self.dx
        k = int(round(j))
        if abs(j - k) > 1e-9 or not 0 <= k < self.n:
            raise InvalidInputError(f"x = {x} is not a grid point")
        return k


@dataclass(frozen=True)
class GridFunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        vals = _as_finite_complex(self.values)
        if vals.shape != (self.grid.n,):
            raise InvalidInputError(
                f"values of length {vals.shape} do not match grid with n = {self.grid.n}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid1D, func) -> "GridFunction":
        return cls(grid, func(grid.points))

    def __add__(self, other):
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class TimeTrace:
    """Samples ``values[j]`` of a function of time at ``t_min + j * dt``."""

    t_min: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidInputError(f"time step must be positive, got {self.dt}")
        vals = _as_finite_complex(self.values)
        if vals.ndim != 1 or vals.size < 2:
            raise InvalidInputError("a time trace needs at least two samples")
        object.__setattr__(self, "values", vals)

    @property
    def t_max(self) -> float:
        return self.t_min + self.dt * (self.values.size - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t_min + self.dt * np.arange(self.values.size)

    @property
    def n_intervals(self) -> int:
        return self.values.size - 1

    @classmethod
    def from_callable(cls, func, T: float, n_intervals: int, t_min: float = 0.0) -> "TimeTrace":
        dt = (T - t_min) / n_intervals
        t = t_min + dt * np.arange(n_intervals + 1)
        return cls(t_min, dt, func(t))

    def __mul__(self, c):
        return TimeTrace(self.t_min, self.dt, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralFunction:
    """Spectrum sampled at ``freqs`` (angular frequency).

    ``weights`` are the quadrature weights used when the spectrum is integrated
    back to physical space; ``origin`` is the left end of the physical grid for
    spectra produced by :func:`fourier_transform`.
    """

    freqs: np.ndarray
    values: np.ndarray
    convention: str = UNITARY
    weights: np.ndarray | None = None
    origin: float = 0.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        vals = _as_finite_complex(self.values)
        if freqs.shape != vals.shape:
            raise InvalidInputError("freqs and values must have the same length")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise InvalidInputError("freqs must be strictly increasing")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", vals)
        if self.weights is not None:
            object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))


@dataclass
class TimeSlab:
    """Space-time samples ``values[m, j] = u(x_j, times[m])`` on a common grid."""

    grid: Grid1D
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = _as_finite_complex(self.values, "slab values")
        if self.times.ndim != 1 or self.times.size < 2:
            raise InvalidInputError("a slab needs at least two time levels")
        if abs(self.times[0]) > 1e-14:
            raise InvalidInputError("slab times must start at 0")
        steps = np.diff(self.times)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
            raise InvalidInputError("slab times must be uniform and increasing")
        if self.values.shape != (self.times.size, self.grid.n):
            raise InvalidInputError(
                f"slab values {self.values.shape} do not match "
                f"({self.times.size}, {self.grid.n})"
            )

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def slice(self, m: int) -> GridFunction:
        return GridFunction(self.grid, self.values[m])

    @property
    def slices(self) -> list[GridFunction]:
        return [self.slice(m) for m in range(self.times.size)]

    def time_index(self, t: float) -> int:
        m = t / self.dt
        k = int(round(m))
        if abs(m - k) > 1e-8 or not 0 <= k < self.times.size:
            from .exceptions import DomainError

            raise DomainError(f"t = {t} is not a time level of the slab (horizon {self.horizon})")
        return k

    def trace_at(self, j: int) -> TimeTrace:
        return TimeTrace(0.0, self.dt, self.values[:, j])
