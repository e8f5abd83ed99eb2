"""Fixed-point solver for ``i u_t + u_xx + k |u|^p u = 0`` on ``x > 0``.

The boundary condition is either prescribed Neumann data ``u_x(0, t) = h(t)``
(open loop) or the nonlinear Robin law ``u_x(0, t) = -lam |u(0, t)|^r u(0, t)``
(closed loop).  A solution on ``[0, T0]`` is the fixed point of

    Psi(u) = W(t) u0* - i int_0^t W(t - tau) F(u*(tau)) dtau + W_b [b - g - p]_e,

with ``F(u) = -k |u|^p u``, ``u*`` the reflection extension of ``u``, ``b``
the Neumann data (``h`` or the Robin feedback of the trace of ``u``), and
``g``, ``p`` the Neumann traces of the first two terms.  Picard iteration
is monitored in the ``X_T^s`` norm; failures halve ``T0``; continuation
restarts from the end of each accepted segment.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .boundary import BoundaryOperator
from .exceptions import (
    AssumptionWarning,
    CompatibilityError,
    InvalidInputError,
    LifespanError,
    NoContractionError,
    TruncationWarning,
)
from .grids import Grid1D, GridFunction, TimeSlab, TimeTrace
from .line_propagator import duhamel_spectra, neumann_from_spectra
from .sobolev import (
    COMPAT_TOL,
    EXTENSION_METHODS,
    check_decay,
    extend_boundary_data,
    extend_initial_data,
    halfline_norms,
    interval_norms,
    reflect_extend,
    smooth_cutoff,
)

log = logging.getLogger(__name__)

OPEN_LOOP = "open-loop"
CLOSED_LOOP = "closed-loop"
EDGE_MONITOR = 1e-6
RESTART_TAPER = 0.05


# -- problem description ---------------------------------------------------


def _floor(v: float) -> int:
    return math.floor(v + 1e-12)


def _is_int(v: float) -> bool:
    return abs(v - round(v)) < 1e-12


def assumption_violations(s: float, p: float, r: float) -> list[str]:
    """Which of the sufficient conditions on ``(s, p)`` and ``(s, r)`` fail."""
    out = []
    odd_p = _is_int(p) and int(round(p)) % 2 == 1
    if _is_int(s):
        if odd_p and p < s:
            out.append(f"(A1) integer s = {s:g} with odd p = {p:g} needs p >= s")
        if not _is_int(p) and _floor(p) < s - 1:
            out.append(f"(A1) integer s = {s:g} with non-integer p = {p:g} needs [p] >= s - 1")
    else:
        if odd_p and p <= s:
            out.append(f"(A2) fractional s = {s:g} with odd p = {p:g} needs p > s")
        if not _is_int(p) and _floor(p) < _floor(s):
            out.append(f"(A2) fractional s = {s:g} with non-integer p = {p:g} needs [p] >= [s]")
    sigma = (2 * s - 1) / 4
    odd_r = _is_int(r) and int(round(r)) % 2 == 1
    if odd_r and r <= sigma:
        out.append(f"(A3) odd r = {r:g} needs r > (2s-1)/4 = {sigma:g}")
    if not _is_int(r) and _floor(r) < _floor(sigma):
        out.append(f"(A3) non-integer r = {r:g} needs [r] >= [(2s-1)/4]")
    return out


def check_assumptions(s: float, p: float, r: float, strict: bool = False) -> list[str]:
    """Warn (or raise with ``strict``) when the smoothness assumptions on ``p``, ``r`` fail."""
    issues = assumption_violations(s, p, r)
    for msg in issues:
        if strict:
            raise InvalidInputError(msg)
        warnings.warn(msg, AssumptionWarning, stacklevel=3)
    return issues


def epsilon_rule(s: float, small: float = 0.05) -> float:
    """``eps = 1/2`` when ``(2s-1)/4 < 1/2``, otherwise a small ``eps``."""
    return 0.5 if (2 * s - 1) / 4 < 0.5 else small


def trace_exponent(s: float, eps: float | None = None) -> float:
    """Power of ``T`` in the boundary nonlinearity bound, ``4 eps / (2s + 3 + 4 eps)``."""
    eps = epsilon_rule(s) if eps is None else eps
    return 4 * eps / (2 * s + 3 + 4 * eps)


@dataclass
class NlsProblem:
    """``i u_t + u_xx + k |u|^p u = 0`` on ``[0, T]`` with data ``u0`` and a Neumann law.

    ``h`` (open loop) is a callable of absolute time or a :class:`TimeTrace`;
    ``t_offset`` shifts its clock when the problem is restarted mid-way.
    """

    s: float
    p: float
    r: float
    k: float
    lam: float
    T: float
    u0: GridFunction
    mode: str = CLOSED_LOOP
    h: object = None
    t_offset: float = 0.0
    strict: bool = False
    check: bool = True

    def __post_init__(self):
        if not 0.5 < self.s < 3.5 or abs(self.s - 1.5) < 1e-12:
            raise InvalidInputError(f"s = {self.s} must lie in (1/2, 7/2) without 3/2")
        if not (self.p > 0 and self.r > 0):
            raise InvalidInputError("p and r must be positive")
        if not (np.isfinite(self.T) and self.T > 0):
            raise InvalidInputError(f"horizon T must be positive, got {self.T}")
        if self.mode not in (OPEN_LOOP, CLOSED_LOOP):
            raise InvalidInputError(f"mode must be '{OPEN_LOOP}' or '{CLOSED_LOOP}'")
        if self.mode == OPEN_LOOP and self.h is None:
            raise InvalidInputError("open-loop problems need boundary data h")
        if self.u0.grid.x_min != 0.0:
            raise InvalidInputError("u0 must live on a half-line grid [0, L]")
        if self.check:
            check_assumptions(self.s, self.p, self.r, self.strict)

    @property
    def grid(self):
        return self.u0.grid

    @property
    def is_linear(self) -> bool:
        return self.k == 0 and (self.mode == OPEN_LOOP or self.lam == 0)

    def boundary_data(self, times) -> np.ndarray:
        """Open-loop data at ``t_offset + times``."""
        t = self.t_offset + np.asarray(times, dtype=float)
        h = self.h
        if isinstance(h, TimeTrace):
            pos = (t - h.t_min) / h.dt
            idx = np.rint(pos).astype(int)
            if np.all(np.abs(pos - idx) < 1e-8) and idx.min() >= 0 and idx.max() < h.values.size:
                return h.values[idx]
            from scipy.interpolate import CubicSpline

            if t.max() > h.t_max + 1e-12 or t.min() < h.t_min - 1e-12:
                raise InvalidInputError("boundary data do not cover the requested times")
            return CubicSpline(h.times, h.values)(t)
        return np.asarray(h(t), dtype=complex) * np.ones_like(t)

    def restarted(self, u0_values, t_offset: float) -> "NlsProblem":
        """Same law, new initial data at absolute time ``t_offset``."""
        return replace(
            self,
            u0=GridFunction(self.grid, u0_values),
            t_offset=t_offset,
            T=self.T,
            check=False,
        )


def nonlinearity(u: GridFunction, p: float, k: float) -> GridFunction:
    """``k |u|^p u`` pointwise (zero where ``u`` vanishes)."""
    if p <= 0:
        raise InvalidInputError("p must be positive")
    v = u.values
    return GridFunction(u.grid, k * np.abs(v) ** p * v)


def boundary_feedback(trace: TimeTrace, r: float, lam: float) -> TimeTrace:
    """Robin feedback ``-lam |v|^r v`` applied to a boundary trace."""
    if r <= 0:
        raise InvalidInputError("r must be positive")
    v = trace.values
    return TimeTrace(trace.t_min, trace.dt, -lam * np.abs(v) ** r * v)


def one_sided_derivative(values, dx: float) -> complex:
    """Fourth-order one-sided first derivative at the left end."""
    u = np.asarray(values)
    return (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * dx)


def check_compatibility(problem: NlsProblem) -> float:
    """Zeroth-order corner residual ``|u0'(0) - h(0)|``; zero when ``s < 3/2``."""
    if problem.s < 1.5:
        return 0.0
    u = problem.u0.values
    du = one_sided_derivative(u, problem.grid.dx)
    if problem.mode == OPEN_LOOP:
        target = problem.boundary_data(np.zeros(1))[0]
    else:
        target = -problem.lam * abs(u[0]) ** problem.r * u[0]
    return float(abs(du - target))


# -- numerics --------------------------------------------------------------


@dataclass
class SolverSettings:
    """Numerical controls of the fixed-point solver.

    ``subtract_traces`` defaults to ``s > 3/2``: the Neumann traces of the
    free and Duhamel terms are removed from the boundary data only where
    they are defined for general data.  ``beta_max`` defaults to the grid
    Nyquist frequency ``pi / dx``.  ``line_padding`` widens the periodic
    line box by that multiple of ``L`` on each side, delaying the return of
    fast waves shed by the reflected half of the extended data.
    """

    dt: float = 1e-3
    tol: float = 1e-10
    max_iter: int = 50
    ctol: float = COMPAT_TOL
    beta_max: float | None = None
    blowup_factor: float = 1e6
    blowup_cap: float | None = None
    t0_min: float | None = None
    subtract_traces: bool | None = None
    decay_tol: float = 1e-8
    min_steps: int = 4
    divergence_streak: int = 3
    line_padding: float = 1.0
    extension: str = "parity"

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise InvalidInputError(f"dt must be positive, got {self.dt}")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be at least 1")
        if not self.line_padding >= 0:
            raise InvalidInputError("line_padding must be non-negative")
        if self.extension not in EXTENSION_METHODS:
            raise InvalidInputError(f"unknown extension method {self.extension!r}")


def mass(values, dx: float) -> np.ndarray:
    """Trapezoid ``int_0^L |u|^2 dx`` of half-line rows."""
    w = np.abs(np.asarray(values)) ** 2
    return dx * (w.sum(axis=-1) - 0.5 * (w[..., 0] + w[..., -1]))


def time_grid(T0: float, dt: float, min_steps: int = 4) -> np.ndarray:
    steps = max(min_steps, int(round(T0 / dt)))
    return np.linspace(0.0, T0, steps + 1)


class SolutionMap:
    """The map ``Psi`` for one problem on ``[0, T0]``, with all fixed pieces cached."""

    def __init__(self, problem: NlsProblem, T0: float, settings: SolverSettings | None = None):
        self.problem = problem
        self.settings = settings or SolverSettings()
        st = self.settings
        self.grid = problem.grid
        self.n = self.grid.n
        self.pad = int(np.ceil(st.line_padding * (self.n - 1)))
        half = (self.n - 1 + self.pad) * self.grid.dx
        self.line_grid = Grid1D(-half, half, 2 * (self.n + self.pad) - 1)
        self.origin = self.n - 1 + self.pad
        self.times = time_grid(T0, st.dt, st.min_steps)
        self.dt = self.times[1] - self.times[0]
        self.T0 = float(self.times[-1])
        self.s = problem.s
        self.subtract = self.s > 1.5 if st.subtract_traces is None else bool(st.subtract_traces)

        u0_star = self._padded(extend_initial_data(problem.u0, problem.s, st.decay_tol, st.extension).values)
        free_spec = np.fft.fft(u0_star)[None, :] * np.exp(
            -1j * np.outer(self.times, (2 * np.pi * np.fft.fftfreq(self.line_grid.n, self.grid.dx)) ** 2)
        )
        self.free = self._restrict(np.fft.ifft(free_spec, axis=1))
        self.g = neumann_from_spectra(free_spec, self.line_grid)
        if problem.mode == OPEN_LOOP:
            self.h = problem.boundary_data(self.times)
        else:
            self.h = None

        probe = extend_boundary_data(TimeTrace(0.0, self.dt, np.zeros(self.times.size)), self.s)
        self.boundary = BoundaryOperator(self.grid, self.times, probe.t_max, st.beta_max)
        self.last_neumann = None
        self.last_data = None

    def _padded(self, line_values):
        widths = [(0, 0)] * (np.ndim(line_values) - 1) + [(self.pad, self.pad)]
        return np.pad(line_values, widths)

    def _restrict(self, line_values):
        return line_values[..., self.origin : self.origin + self.n]

    # composition ----------------------------------------------------------

    def forcing_terms(self, values):
        """Duhamel term ``-i int W F(u*)`` on x >= 0 and its Neumann trace ``p``."""
        if self.problem.k == 0:
            zero = np.zeros((self.times.size, self.n), dtype=complex)
            return zero, np.zeros(self.times.size, dtype=complex)
        star = self._padded(reflect_extend(values))
        F = -self.problem.k * np.abs(star) ** self.problem.p * star
        spec = duhamel_spectra(F, self.line_grid, self.dt)
        field = -1j * self._restrict(np.fft.ifft(spec, axis=1))
        p = -1j * neumann_from_spectra(spec, self.line_grid)
        return field, p

    def neumann_data(self, values) -> np.ndarray:
        if self.problem.mode == OPEN_LOOP:
            return self.h
        v = values[:, 0]
        return -self.problem.lam * np.abs(v) ** self.problem.r * v

    def __call__(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        duh, p = self.forcing_terms(values)
        data = self.neumann_data(values)
        b = data - self.g - p if self.subtract else data
        # the corner condition is enforced once on the data; here b(0) only
        # carries the discretization error of the spectral trace g(0)
        h_e = extend_boundary_data(TimeTrace(0.0, self.dt, b), self.s, ctol=np.inf)
        wb, wb_trace = self.boundary.field_and_trace(h_e)
        self.last_neumann = self.g + p + wb_trace
        self.last_data = data
        return self.free + duh + wb

    # norms ----------------------------------------------------------------

    def xts(self, values) -> float:
        return xts_norm_values(values, self.grid.dx, self.dt, self.s)

    def force_free(self) -> np.ndarray:
        """``Psi`` with the nonlinear terms switched off: its fixed point when ``k = lam = 0``."""
        data = self.h if self.problem.mode == OPEN_LOOP else np.zeros(self.times.size, dtype=complex)
        b = data - self.g if self.subtract else data
        h_e = extend_boundary_data(TimeTrace(0.0, self.dt, b), self.s, ctol=np.inf)
        return self.free + self.boundary.field(h_e)

    def zero_iterate(self) -> np.ndarray:
        out = np.zeros((self.times.size, self.n), dtype=complex)
        out[0] = self.problem.u0.values
        return out


def xts_norm_values(values, dx: float, dt: float, s: float, check: bool = False) -> float:
    """``sup_t ||u(t)||_{H^s(R+)} + sup_x ||u(x, .)||_{H^{(2s+1)/4}(0, T)}`` over the samples."""
    values = np.asarray(values, dtype=complex)
    if not np.any(values):
        return 0.0
    space = halfline_norms(values, dx, s, check)
    time = interval_norms(values, dt, (2 * s + 1) / 4, check)
    return float(space.max() + time.max())


@dataclass
class SolutionField:
    """Solution samples on ``[t_offset, t_offset + T0]`` with solver diagnostics."""

    slab: TimeSlab
    boundary_trace: TimeTrace
    diagnostics: dict = field(default_factory=dict)

    @property
    def t_offset(self) -> float:
        return float(self.slab.meta.get("t_offset", 0.0))

    @property
    def T0(self) -> float:
        return self.slab.horizon

    @property
    def times(self) -> np.ndarray:
        return self.t_offset + self.slab.times

    def at(self, t: float) -> GridFunction:
        return self.slab.slice(self.slab.time_index(t - self.t_offset))


def xts_norm(field: SolutionField, s: float | None = None) -> float:
    """``X_T^s`` norm of a stored solution (sup over sampled times and grid points)."""
    s = field.diagnostics.get("s") if s is None else s
    return xts_norm_values(field.slab.values, field.slab.grid.dx, field.slab.dt, s)


def apply_Psi(candidate: TimeSlab, problem: NlsProblem, T0: float | None = None,
              settings: SolverSettings | None = None) -> TimeSlab:
    """One application of ``Psi`` to a candidate slab on ``[0, T0]``."""
    T0 = candidate.horizon if T0 is None else T0
    st = replace(settings or SolverSettings(), dt=candidate.dt)
    engine = SolutionMap(problem, T0, st)
    if engine.times.size != candidate.times.size:
        raise InvalidInputError("candidate time levels do not match T0 and dt")
    return TimeSlab(candidate.grid, candidate.times, engine(candidate.values))


def picard_solve(
    problem: NlsProblem,
    T0: float,
    settings: SolverSettings | None = None,
    initial: str = "free",
    engine: SolutionMap | None = None,
) -> SolutionField:
    """Iterate ``u <- Psi(u)`` on ``[0, T0]`` until the relative ``X_T^s`` change is below ``tol``.

    ``initial`` is ``"free"`` (the force-free part of ``Psi``: free evolution
    of the extended data corrected by the boundary operator) or ``"zero"``
    (zero field with the initial row set to ``u0``).  Raises
    :class:`NoContractionError` after ``divergence_streak`` consecutive
    increment ratios ``>= 1``.
    """
    st = settings or SolverSettings()
    if check_compatibility(problem) > st.ctol * max(1.0, _data_scale(problem)):
        raise CompatibilityError(
            f"corner residual {check_compatibility(problem):.3e} exceeds ctol = {st.ctol:g}"
        )
    engine = engine or SolutionMap(problem, T0, st)
    if initial == "free":
        u = engine.force_free()
    elif initial == "zero":
        u = engine.zero_iterate()
    else:
        raise InvalidInputError(f"unknown initial iterate '{initial}'")

    increments, ratios = [], []
    streak = 0
    converged = False
    for it in range(st.max_iter):
        new = engine(u)
        if not np.all(np.isfinite(new)):
            raise NoContractionError("Picard iterate became non-finite", ratios)
        inc = engine.xts(new - u)
        size = engine.xts(new)
        rel = inc / size if size > 0 else 0.0
        if increments and increments[-1] > 0:
            ratio = rel * size / (increments[-1] * prev_size)
            ratios.append(ratio)
            streak = streak + 1 if ratio >= 1 else 0
            if streak >= st.divergence_streak:
                raise NoContractionError(
                    f"Picard increments grew {streak} times in a row on T0 = {engine.T0:g}", ratios
                )
        increments.append(rel)
        prev_size = size
        u = new
        log.debug("picard it=%d rel_change=%.3e", it + 1, rel)
        if rel <= st.tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"Picard iteration stopped after {st.max_iter} iterations "
            f"(relative change {increments[-1]:.2e})",
            RuntimeWarning,
            stacklevel=2,
        )
    return _package(problem, engine, u, increments, ratios, converged)


def _data_scale(problem: NlsProblem) -> float:
    u = problem.u0.values
    return float(max(abs(one_sided_derivative(u, problem.grid.dx)), np.max(np.abs(u))))


def _package(problem, engine, u, increments, ratios, converged) -> SolutionField:
    dx, s = engine.grid.dx, problem.s
    slab = TimeSlab(engine.grid, engine.times, u, meta={"t_offset": problem.t_offset})
    hs = halfline_norms(u, dx, s, check=False)
    A = float(halfline_norms(problem.u0.values, dx, s, check=False))
    if problem.mode == OPEN_LOOP:
        A += float(interval_norms(engine.h, engine.dt, (2 * s - 1) / 4, check=False))
    neumann = engine.last_neumann
    if problem.mode == OPEN_LOOP:
        target = engine.h
    else:
        target = -problem.lam * np.abs(u[:, 0]) ** problem.r * u[:, 0]
    bres = np.abs(neumann - target) if neumann is not None else np.zeros(u.shape[0])
    edge = check_decay(u, EDGE_MONITOR)
    if edge > EDGE_MONITOR:
        warnings.warn(
            f"solution reaches the far edge (relative amplitude {edge:.1e})",
            TruncationWarning,
            stacklevel=3,
        )
    diag = {
        "s": s,
        "A": A,
        "R": 2 * A,
        "T0": engine.T0,
        "contraction_ratios": np.asarray(ratios),
        "increments": np.asarray(increments),
        "iterations": len(increments),
        "converged": converged,
        "fixed_point_residual": float(increments[-1]) if increments else 0.0,
        "hs_norm_history": hs,
        "mass_history": mass(u, dx),
        "boundary_residual": bres,
        "xts_norm": xts_norm_values(u, dx, engine.dt, s),
        "beta_nodes": engine.boundary.n_nodes,
    }
    return SolutionField(slab, TimeTrace(problem.t_offset, engine.dt, u[:, 0]), diag)


def _solve_halving(problem, settings, T_start, t0_min):
    T0 = T_start
    while True:
        if T0 < t0_min * (1 - 1e-12):
            raise LifespanError(f"no contracting step above t0_min = {t0_min:g}")
        try:
            field = picard_solve(problem, T0, settings)
            if field.diagnostics["converged"]:
                return T0, field
            log.info("T0 = %g did not converge; halving", T0)
        except NoContractionError as exc:
            log.info("T0 = %g: %s; halving", T0, exc)
        T0 /= 2.0


def select_T0(problem: NlsProblem, settings: SolverSettings | None = None,
              T_start: float | None = None) -> float:
    """Largest ``T / 2^j`` on which Picard iteration converges.

    Raises :class:`LifespanError` below ``t0_min`` (default ``T / 2^14``).
    """
    st = settings or SolverSettings()
    t0_min = st.t0_min if st.t0_min is not None else problem.T / 2**14
    T0, _ = _solve_halving(problem, st, problem.T if T_start is None else T_start, t0_min)
    return T0


@dataclass
class ContinuationResult:
    status: str
    t_reached: float
    fields: list
    final_norm: float
    reason: str = ""

    @property
    def times(self) -> np.ndarray:
        return np.concatenate([f.times if i == 0 else f.times[1:] for i, f in enumerate(self.fields)])

    @property
    def hs_norm_history(self) -> np.ndarray:
        parts = [f.diagnostics["hs_norm_history"] for f in self.fields]
        return np.concatenate([p if i == 0 else p[1:] for i, p in enumerate(parts)])

    def history(self, key: str) -> np.ndarray:
        parts = [np.asarray(f.diagnostics[key]) for f in self.fields]
        return np.concatenate([p if i == 0 else p[1:] for i, p in enumerate(parts)])


def continue_solution(problem: NlsProblem, settings: SolverSettings | None = None,
                      T0_first: float | None = None) -> ContinuationResult:
    """Solve on ``[0, T]`` segment by segment, restarting from each segment's end.

    Each segment tries twice the previous step (the full horizon first) and
    halves on failure.  The run stops with ``blowup_detected`` when the H^s
    norm passes the cap or no step above ``t0_min`` contracts.
    """
    st = settings or SolverSettings()
    t0_min = st.t0_min if st.t0_min is not None else problem.T / 2**14
    dx, s = problem.grid.dx, problem.s
    initial = float(halfline_norms(problem.u0.values, dx, s, check=False))
    cap = st.blowup_cap if st.blowup_cap is not None else st.blowup_factor * max(initial, 1e-300)
    fields = []
    t, current = 0.0, problem
    trial = problem.T if T0_first is None else T0_first
    while t < problem.T - 1e-12:
        trial = min(trial, problem.T - t)
        try:
            T0, fld = _solve_halving(current, st, trial, t0_min)
        except LifespanError as exc:
            norm = fields[-1].diagnostics["hs_norm_history"][-1] if fields else initial
            return ContinuationResult("blowup_detected", t, fields, float(norm), str(exc))
        fields.append(fld)
        hs = fld.diagnostics["hs_norm_history"]
        over = np.nonzero(hs > cap)[0]
        if over.size:
            t_hit = t + fld.slab.times[over[0]]
            return ContinuationResult(
                "blowup_detected", float(t_hit), fields, float(hs[over[0]]), "H^s norm passed the cap"
            )
        t += T0
        current = problem.restarted(taper_edge(fld.slab.values[-1]), problem.t_offset + t)
        # restart data obey the boundary law only to discretization accuracy;
        # their algebraic tail is tapered instead of rejected
        st = replace(st, ctol=np.inf, decay_tol=np.inf)
        trial = 2 * T0
    final = float(fields[-1].diagnostics["hs_norm_history"][-1]) if fields else initial
    return ContinuationResult("completed", float(problem.T), fields, final)


def taper_edge(values, fraction: float = RESTART_TAPER) -> np.ndarray:
    """Bring the last ``fraction`` of the grid smoothly to zero."""
    values = np.asarray(values)
    n = values.shape[-1]
    y = (np.arange(n) - (1 - fraction) * (n - 1)) / (fraction * (n - 1))
    return values * smooth_cutoff(y)


def smooth_bump(x) -> np.ndarray:
    """Perturbation direction with vanishing value and slope at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    return x**2 * np.exp(-((x - 1.5) ** 2))


def lipschitz_probe(problem: NlsProblem, deltas, settings: SolverSettings | None = None,
                    T0: float | None = None, direction=None) -> np.ndarray:
    """``||u - v||_{X_T0^s} / ||u0 - v0||_{H^s}`` for ``v0 = u0 + delta * direction``."""
    st = settings or SolverSettings()
    T0 = select_T0(problem, st) if T0 is None else T0
    grid = problem.grid
    d = smooth_bump(grid.points) if direction is None else np.asarray(direction, dtype=complex)
    base = picard_solve(problem, T0, st)
    out = []
    for delta in deltas:
        if delta == 0:
            out.append(0.0)
            continue
        pert = problem.restarted(problem.u0.values + delta * d, problem.t_offset)
        other = picard_solve(pert, T0, st)
        diff = xts_norm_values(base.slab.values - other.slab.values, grid.dx, base.slab.dt, problem.s)
        den = float(halfline_norms(delta * d, grid.dx, problem.s, check=False))
        out.append(diff / den)
    return np.asarray(out)
