import numpy as np
import pytest

from halfline_nls import (
    OPEN_LOOP,
    Grid1D,
    GridFunction,
    InvalidInputError,
    NlsProblem,
    StabilityError,
    StepError,
    TruncationWarning,
    crank_nicolson_solve,
)
from halfline_nls import fd_oracle


def _gaussian_exact(x, t):
    q = 1 + 4j * t
    return q**-0.5 * np.exp(-(x**2) / q)


def _problem(n, u0, L=20.0, **kw):
    g = Grid1D.half_line(L, n)
    args = dict(s=2.0, p=2, r=2, k=0, lam=0, T=0.1)
    args.update(kw)
    return NlsProblem(u0=GridFunction(g, u0(g.points) + 0j), **args)


def test_second_order_against_free_evolution():
    errs = []
    for n in (129, 257, 513):
        pr = _problem(n, lambda x: np.exp(-(x**2)), T=0.2)
        dx = pr.grid.dx
        out = crank_nicolson_solve(pr, dx=dx, dt=dx / 8)
        errs.append(np.max(np.abs(out.values[-1] - _gaussian_exact(pr.grid.points, 0.2))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_zero_data_stay_zero():
    pr = _problem(65, lambda x: 0 * x, mode=OPEN_LOOP, h=lambda t: 0 * t)
    out = crank_nicolson_solve(pr, dt=0.01)
    assert not np.any(out.values)


def test_robin_mass_conserved():
    pr = _problem(256, lambda x: np.exp(-x), k=1, lam=1, T=0.1)
    out = crank_nicolson_solve(pr, dt=1e-3)
    # drift per unit time
    assert out.meta["mass_drift"] / 0.1 < 1e-6
    assert out.meta["inner_iterations"] >= 2


def test_open_loop_flux_changes_mass():
    # d/dt int |u|^2 = 2 Im(conj(u) u_x) at x = 0
    pr = _problem(256, lambda x: np.exp(-(x**2)), mode=OPEN_LOOP, h=lambda t: 0.5j + 0 * t)
    out = crank_nicolson_solve(pr, dt=1e-3, T=0.02)
    m = out.meta["mass_history"]
    u0 = out.values[:, 0]
    rate = 2 * np.imag(np.conj(u0) * 0.5j)
    predicted = m[0] + np.trapezoid(rate, out.times)
    assert m[-1] == pytest.approx(predicted, rel=1e-4)


def test_store_every_keeps_every_other_level():
    pr = _problem(65, lambda x: np.exp(-(x**2)))
    full = crank_nicolson_solve(pr, dt=0.01, T=0.1)
    thin = crank_nicolson_solve(pr, dt=0.01, T=0.1, store_every=2)
    assert np.allclose(thin.times, full.times[::2])
    assert np.array_equal(thin.values, full.values[::2])


@pytest.mark.parametrize(
    "kw",
    [{"dt": 1.0}, {"dx": 0.123, "dt": 0.01}, {"dt": 0.01, "T": 0.1, "store_every": 3}],
)
def test_argument_checks(kw):
    pr = _problem(65, lambda x: np.exp(-(x**2)))
    with pytest.raises(InvalidInputError):
        crank_nicolson_solve(pr, **kw)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_inner_iteration_failure_is_a_step_error():
    pr = _problem(129, lambda x: 30 * np.exp(-(x**2)), k=1)
    with pytest.raises(StepError):
        crank_nicolson_solve(pr, dt=0.1)


def test_mass_drift_guard(monkeypatch):
    monkeypatch.setattr(fd_oracle, "MASS_DRIFT_MAX", -1.0)
    pr = _problem(65, lambda x: np.exp(-(x**2)))
    with pytest.raises(StabilityError):
        crank_nicolson_solve(pr, dt=0.01)


def test_far_edge_warning():
    pr = _problem(129, lambda x: np.exp(-x / 8), L=10.0, check=False)
    with pytest.warns(TruncationWarning):
        crank_nicolson_solve(pr, dt=0.01, T=0.05)
