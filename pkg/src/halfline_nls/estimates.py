"""Ratio statistics for the linear, trace, nonlinear and interpolation inequalities.

Each check evaluates ``left side / right side`` over a deterministic family
of inputs and reports the maximum, the median, the log-log growth against
``T`` and the relative change of the maximum when the resolution doubles.
A bound is treated as numerically certified when that change stays within
10 percent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import adaptive_beta_max, beta_nodes, boundary_spectra, eval_Wb_grid
from .exceptions import InvalidInputError
from .grids import TimeTrace
from .sobolev import extend_boundary_data, halfline_norms, interval_norms, line_norms

STABILITY_TOL = 0.10


@dataclass
class RatioReport:
    name: str
    ratios: np.ndarray
    labels: list
    T_list: tuple = ()
    max_ratio: float = 0.0
    median_ratio: float = 0.0
    slope: float = float("nan")
    stability: float = float("nan")
    argmax_x: float = float("nan")
    extra: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return bool(self.stability <= STABILITY_TOL)

    def rows(self):
        """``(name, label, T, ratio)`` tuples in a fixed order."""
        out = []
        T_list = self.T_list or (float("nan"),)
        r = np.atleast_2d(self.ratios)
        for i, lab in enumerate(self.labels):
            for j, T in enumerate(T_list):
                out.append((self.name, lab, T, float(r[i, j])))
        return out

    def summary(self) -> dict:
        return {
            "name": self.name,
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "slope": self.slope,
            "stability": self.stability,
            "argmax_x": self.argmax_x,
        }


def _finish(name, ratios, labels, T_list, fine_ratios=None, argmax_x=float("nan"), extra=None):
    ratios = np.asarray(ratios, dtype=float)
    rep = RatioReport(name, ratios, list(labels), tuple(T_list))
    rep.max_ratio = float(np.max(ratios))
    rep.median_ratio = float(np.median(ratios))
    if len(T_list) > 1:
        top = np.atleast_2d(ratios).max(axis=0)
        rep.slope = float(np.polyfit(np.log(T_list), np.log(top), 1)[0])
    if fine_ratios is not None:
        rep.stability = float(abs(np.max(fine_ratios) / rep.max_ratio - 1.0))
    rep.argmax_x = float(argmax_x)
    rep.extra = extra or {}
    return rep


# -- test families -----------------------------------------------------------


def boundary_family(seed: int = 0, n_random: int = 3):
    """Boundary data ``(label, h(t, T))`` vanishing at ``t = 0``.

    Smooth bumps ``t^a (T - t)^a``, band-limited random signals tapered by
    ``t^2`` near the corner, and bumps concentrated near ``t = 0``.
    """
    members = []
    for a in (2, 3, 4):
        members.append((f"bump-a{a}", lambda t, T, a=a: (t * (T - t) / (T * T / 4)) ** a + 0j))
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        freq = rng.uniform(0.5, 4.0, size=4)
        coef = rng.normal(size=4) + 1j * rng.normal(size=4)
        phase = rng.uniform(0, 2 * np.pi, size=4)

        def rand(t, T, freq=freq, coef=coef, phase=phase):
            tau = np.asarray(t) / T
            waves = (coef[None, :] * np.cos(2 * np.pi * freq[None, :] * tau[:, None] + phase)).sum(1)
            return (tau**2) * waves

        members.append((f"random-{i}", rand))
    for c in (0.1, 0.2):
        members.append(
            (f"edge-{c:g}", lambda t, T, c=c: (np.asarray(t) / (c * T)) ** 2 * np.exp(-np.asarray(t) / (c * T)) + 0j)
        )
    return members


def random_bandlimited(grid_points, rng, band: float = 3.0, modes: int = 8, width: float = 2.0):
    """Smooth random function: a few Fourier modes below ``band`` under a Gaussian envelope."""
    x = np.asarray(grid_points)
    k = rng.uniform(-band, band, size=modes)
    c = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    center = rng.uniform(-1.0, 1.0)
    env = np.exp(-(((x - center) / width) ** 2))
    return env * (c[None, :] * np.exp(1j * np.outer(x, k))).sum(axis=1)


# -- linear boundary operator --------------------------------------------------


def _x_samples(L: float, count: int = 24) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(0.01, 0.25 * L, count - 1)])


def _boundary_ratios(s, T, h_fun, L, n, steps_per_unit, parts, t_samples, x_samples):
    N = max(16, int(round(steps_per_unit * T)))
    t = np.linspace(0.0, T, N + 1)
    h = TimeTrace(0.0, T / N, h_fun(t, T))
    h_e = extend_boundary_data(h, s)
    dx = L / (n - 1)
    bmax = adaptive_beta_max(h_e, np.pi / dx)
    nodes, weights = beta_nodes(bmax, L, max(h_e.t_max, T))
    phi, psi = boundary_spectra(h_e, nodes, weights)
    x = dx * np.arange(n)
    ts = np.linspace(0.0, T, t_samples)
    space = halfline_norms(eval_Wb_grid(phi, psi, x, ts, parts), dx, s, check=False)
    field_t = eval_Wb_grid(phi, psi, x_samples, t, parts)
    time = interval_norms(field_t, h.dt, (2 * s + 1) / 4, check=False)
    data = float(interval_norms(h.values, h.dt, (2 * s - 1) / 4, check=False))
    edge = float(np.max(np.abs(eval_Wb_grid(phi, psi, x[-1:], ts, parts))))
    return float(space.max()), float(time.max()), float(x_samples[np.argmax(time)]), data, edge


def verify_linear_bound(
    s: float,
    T_list=(0.5, 1.0, 2.0),
    family=None,
    L: float = 40.0,
    n: int = 257,
    steps_per_unit: int = 128,
    t_samples: int = 33,
    refine: bool = True,
) -> RatioReport:
    """``(sup_t ||W_b h_e||_{H^s} + sup_x ||W_b h_e||_{H^{(2s+1)/4}(0,T)}) / ((1+T) ||h||_{H^{(2s-1)/4}(0,T)})``."""
    family = boundary_family() if family is None else family
    xs = _x_samples(L)

    def sweep(n_, spu):
        r = np.zeros((len(family), len(T_list)))
        arg = np.zeros_like(r)
        for i, (_, fun) in enumerate(family):
            for j, T in enumerate(T_list):
                sp, tm, xarg, data, edge = _boundary_ratios(s, T, fun, L, n_, spu, (1, 2), t_samples, xs)
                if data == 0:
                    raise InvalidInputError("zero boundary data have no ratio")
                r[i, j] = (sp + tm) / ((1 + T) * data)
                arg[i, j] = xarg
                edges.append(edge / data)
        return r, arg

    edges = []
    coarse, arg = sweep(n, steps_per_unit)
    fine = sweep(2 * n - 1, 2 * steps_per_unit)[0] if refine else None
    i, j = np.unravel_index(np.argmax(coarse), coarse.shape)
    return _finish(
        "linear_bound", coarse, [m[0] for m in family], T_list, fine, arg[i, j],
        {"fine_ratios": fine, "s": s, "edge": max(edges)},
    )


def verify_time_trace_bound(
    s: float,
    family=None,
    T_list=(1.0,),
    L: float = 40.0,
    n: int = 257,
    steps_per_unit: int = 128,
    refine: bool = True,
) -> RatioReport:
    """``sup_x ||W_b2 h_e(x, .)||_{H^{(2s+1)/4}(0,T)} / ((1+T) ||h||_{H^{(2s-1)/4}(0,T)})``; reports the arg-max ``x``."""
    family = boundary_family() if family is None else family
    xs = _x_samples(L)

    def sweep(n_, spu):
        r = np.zeros((len(family), len(T_list)))
        arg = np.zeros_like(r)
        for i, (_, fun) in enumerate(family):
            for j, T in enumerate(T_list):
                _, tm, xarg, data, _ = _boundary_ratios(s, T, fun, L, n_, spu, (2,), 2, xs)
                r[i, j] = tm / ((1 + T) * data)
                arg[i, j] = xarg
        return r, arg

    coarse, arg = sweep(n, steps_per_unit)
    fine = sweep(2 * n - 1, 2 * steps_per_unit)[0] if refine else None
    i, j = np.unravel_index(np.argmax(coarse), coarse.shape)
    return _finish(
        "time_trace_bound", coarse, [m[0] for m in family], T_list, fine, arg[i, j],
        {"argmax_x_all": arg, "fine_ratios": fine, "s": s},
    )


# -- nonlinearity --------------------------------------------------------------


def _power(u, p, k=1.0):
    return k * np.abs(u) ** p * u


def verify_nonlinearity_bound(
    s: float,
    p: float,
    n_pairs: int = 50,
    seed: int = 0,
    L: float = 20.0,
    n: int = 512,
    amplitude: float = 1.0,
    refine: bool = True,
) -> RatioReport:
    """Single ratio ``||f(u)||/||u||^{p+1}`` and difference ratio over random band-limited pairs.

    ``ratios`` has two columns: single and difference ratio.
    """

    def sweep(n_):
        rng = np.random.default_rng(seed)
        x = np.linspace(-L, L, n_)
        dx = x[1] - x[0]
        out = np.zeros((n_pairs, 2))
        for i in range(n_pairs):
            u = amplitude * random_bandlimited(x, rng)
            v = amplitude * random_bandlimited(x, rng)
            nu, nv = line_norms(np.stack([u, v]), dx, s, check=False)
            fu, fv = _power(u, p), _power(v, p)
            out[i, 0] = line_norms(fu, dx, s, check=False) / nu ** (p + 1)
            diff = line_norms(u - v, dx, s, check=False)
            out[i, 1] = line_norms(fu - fv, dx, s, check=False) / ((nu**p + nv**p) * diff)
        return out

    coarse = sweep(n)
    fine = sweep(2 * n) if refine else None
    rep = _finish("nonlinearity_bound", coarse, [f"pair-{i}" for i in range(n_pairs)], (), fine)
    rep.extra = {
        "max_single": float(coarse[:, 0].max()),
        "max_difference": float(coarse[:, 1].max()),
        "fine_ratios": fine,
    }
    return rep


# -- interpolation -----------------------------------------------------------


def shape_family():
    """Fixed shapes on ``[0, 1]``; ``h_T(t) = h(t / T)``."""
    return [(f"bump-a{a}", lambda tau, a=a: (4 * tau * (1 - tau)) ** a + 0j) for a in (2, 3, 4)]


def verify_interpolation(
    sigma: float,
    eps: float,
    T_list=(1.0, 2.0, 4.0, 8.0),
    family=None,
    N: int = 256,
    refine: bool = True,
) -> RatioReport:
    """``||h_T||_{H^sigma(0,T)} / ||h_T||_{H^{sigma+eps}(0,T)}`` on the scaling family.

    ``slope`` is the log-log slope of the family maximum against ``T``; the
    reference exponent ``eps / (1 + sigma + eps)`` is in ``extra``.
    """
    if sigma <= 0 or eps <= 0:
        raise InvalidInputError("sigma and eps must be positive")
    family = shape_family() if family is None else family

    def sweep(N_):
        r = np.zeros((len(family), len(T_list)))
        for i, (_, shape) in enumerate(family):
            for j, T in enumerate(T_list):
                tau = np.linspace(0.0, 1.0, N_ + 1)
                vals = shape(tau)
                dt = T / N_
                lo = interval_norms(vals, dt, sigma, check=False)
                hi = interval_norms(vals, dt, sigma + eps, check=False)
                r[i, j] = float(lo / hi)
        return r

    coarse = sweep(N)
    fine = sweep(2 * N) if refine else None
    theta = eps / (1 + sigma + eps)
    rep = _finish("interpolation", coarse, [m[0] for m in family], T_list, fine)
    local = np.diff(np.log(coarse.max(axis=0))) / np.diff(np.log(T_list)) if len(T_list) > 1 else []
    rep.extra = {"theta": theta, "local_slopes": np.asarray(local), "fine_ratios": fine}
    return rep


def verify_trace_nonlinearity(
    s: float,
    r: float,
    lam: float = 1.0,
    T_list=(0.125, 0.25, 0.5, 1.0),
    eps: float | None = None,
    N: int = 256,
) -> RatioReport:
    """``||lam |v|^r v||_{H^{(2s-1)/4}(0,T)} / ||v||_{H^{(2s+1)/4}(0,T)}^{r+1}`` on ``v_T(t) = v(t / T)``.

    The fitted slope is compared with ``4 eps / (2s + 3 + 4 eps)`` in ``extra``.
    """
    from .solver import epsilon_rule, trace_exponent

    eps = epsilon_rule(s) if eps is None else eps
    lo_order, hi_order = (2 * s - 1) / 4, (2 * s + 1) / 4
    shapes = [(f"trace-a{a}", lambda tau, a=a: (4 * tau * (1 - tau)) ** a + 0.5 + 0j) for a in (1, 2, 3)]
    out = np.zeros((len(shapes), len(T_list)))
    for i, (_, shape) in enumerate(shapes):
        for j, T in enumerate(T_list):
            tau = np.linspace(0.0, 1.0, N + 1)
            v = shape(tau)
            hv = -lam * np.abs(v) ** r * v
            num = interval_norms(hv, T / N, lo_order, check=False)
            den = interval_norms(v, T / N, hi_order, check=False) ** (r + 1)
            out[i, j] = float(num / den)
    rep = _finish("trace_nonlinearity", out, [m[0] for m in shapes], T_list)
    rep.extra = {"exponent": trace_exponent(s, eps), "eps": eps}
    return rep
