"""Estimator-style front end: ``HalfLineNLS().fit(u0).predict(t)``."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import InvalidInputError
from .grids import Grid1D, GridFunction
from .solver import (
    CLOSED_LOOP,
    OPEN_LOOP,
    NlsProblem,
    SolverSettings,
    continue_solution,
    picard_solve,
    select_T0,
)
from .validation import check_grid_size, check_mode, check_positive, check_profile, check_sobolev_index, check_times


class HalfLineNLS(BaseEstimator):
    """Fixed-point solver for ``i u_t + u_xx + k|u|^p u = 0`` on ``x > 0``.

    ``fit(u0, h=None)`` takes samples of the initial data on ``[0, L]`` (the
    grid size is ``len(u0)``) or a callable of ``x``, evaluated on ``n``
    points.  Passing ``h`` switches to the open-loop law ``u_x(0, t) = h(t)``.

    With ``T0=None`` the largest dyadic fraction of ``T`` on which the
    iteration contracts is selected; ``continuation=True`` instead marches
    segment by segment up to ``T``.

    Fitted attributes: ``solution_`` (a ``SolutionField`` or a
    ``ContinuationResult``), ``T0_`` and ``diagnostics_``.
    """

    def __init__(
        self,
        s=2.0,
        p=2.0,
        r=2.0,
        k=1.0,
        lam=1.0,
        T=0.1,
        L=20.0,
        n=512,
        dt=1e-3,
        T0=None,
        tol=1e-10,
        max_iter=50,
        continuation=False,
        strict=False,
    ):
        self.s = s
        self.p = p
        self.r = r
        self.k = k
        self.lam = lam
        self.T = T
        self.L = L
        self.n = n
        self.dt = dt
        self.T0 = T0
        self.tol = tol
        self.max_iter = max_iter
        self.continuation = continuation
        self.strict = strict

    def _problem(self, u0, h):
        s = check_sobolev_index(self.s)
        T = check_positive(self.T, "T")
        L = check_positive(self.L, "L")
        if callable(u0):
            n = check_grid_size(self.n)
            grid = Grid1D.half_line(L, n)
            values = check_profile(u0(grid.points), n)
        else:
            values = check_profile(u0)
            grid = Grid1D.half_line(L, check_grid_size(values.size))
        mode = check_mode(OPEN_LOOP if h is not None else CLOSED_LOOP)
        return NlsProblem(
            s=s, p=self.p, r=self.r, k=self.k, lam=self.lam, T=T,
            u0=GridFunction(grid, values), mode=mode, h=h, strict=self.strict,
        )

    def fit(self, u0, h=None):
        problem = self._problem(u0, h)
        settings = SolverSettings(
            dt=check_positive(self.dt, "dt"), tol=check_positive(self.tol, "tol"), max_iter=self.max_iter
        )
        if self.continuation:
            result = continue_solution(problem, settings)
            self.solution_ = result
            self.T0_ = result.fields[0].T0 if result.fields else 0.0
            self.diagnostics_ = {
                "status": result.status,
                "t_reached": result.t_reached,
                "final_norm": result.final_norm,
                "segments": len(result.fields),
                "reason": result.reason,
            }
        else:
            T0 = select_T0(problem, settings) if self.T0 is None else check_positive(self.T0, "T0")
            if T0 > problem.T + 1e-12:
                raise InvalidInputError(f"T0 = {T0} exceeds T = {problem.T}")
            field = picard_solve(problem, T0, settings)
            self.solution_ = field
            self.T0_ = float(T0)
            self.diagnostics_ = field.diagnostics
        self.grid_ = problem.grid
        return self

    def _check_fitted(self):
        if not hasattr(self, "solution_"):
            raise NotFittedError("call fit before predict")

    @property
    def times_(self) -> np.ndarray:
        self._check_fitted()
        return self.solution_.times

    def _values(self) -> np.ndarray:
        sol = self.solution_
        if hasattr(sol, "slab"):
            return sol.slab.values
        return np.concatenate([f.slab.values if i == 0 else f.slab.values[1:] for i, f in enumerate(sol.fields)])

    def predict(self, t):
        """Solution on the grid at time(s) ``t``; shape ``(n,)`` for a scalar, ``(len(t), n)`` otherwise.

        Times must be stored time levels of the fitted solution up to ``1e-9``.
        """
        self._check_fitted()
        scalar = np.ndim(t) == 0
        times = self.times_
        t = check_times(t, times[-1])
        idx = np.searchsorted(times, t - 1e-9)
        idx = np.minimum(idx, times.size - 1)
        if np.any(np.abs(times[idx] - t) > 1e-9):
            raise InvalidInputError("requested times are not stored time levels of the solution")
        out = self._values()[idx]
        return out[0] if scalar else out
