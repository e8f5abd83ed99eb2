"""TOML run configuration with a fixed schema.

Example::

    [problem]
    s = 2.0
    p = 2.0
    r = 2.0
    k = 1.0
    lambda = 1.0
    T = 0.1
    mode = "closed-loop"            # or "open-loop" with an [problem.h] table
    u0 = { family = "exponential", amplitude = 1.0, width = 1.0 }

    [numerics]
    L = 20.0
    n = 512
    dt = 1e-3

Every schema violation raises :class:`ConfigError` carrying the line of
the offending key (or of its table header when the key is missing).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import tomli

from .exceptions import HalflineError
from .grids import Grid1D, GridFunction
from .solver import CLOSED_LOOP, OPEN_LOOP, NlsProblem, SolverSettings

U0_FAMILIES = ("exponential", "gaussian", "sech", "bump", "robin-wave")
H_FAMILIES = ("zero", "bump", "sine")


class ConfigError(HalflineError, ValueError):
    """Schema violation; ``str(err)`` reads ``<file>:<line>: <message>``."""

    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


_Num = (int, float)
PROBLEM_KEYS = {
    "s": (_Num, True),
    "p": (_Num, True),
    "r": (_Num, True),
    "k": (_Num, True),
    "lambda": (_Num, True),
    "T": (_Num, True),
    "mode": (str, False),
    "u0": (dict, True),
    "h": (dict, False),
}
NUMERICS_KEYS = {
    "L": (_Num, True),
    "n": (int, True),
    "dt": (_Num, True),
    "tol": (_Num, False),
    "max_iter": (int, False),
    "T0": (_Num, False),
    "seed": (int, False),
    "beta_max": (_Num, False),
    "blowup_factor": (_Num, False),
    "blowup_cap": (_Num, False),
    "t0_min": (_Num, False),
    "fd_dt": (_Num, False),
}
SWEEP_KEYS = {
    "r": (list, False),
    "lambda": (list, False),
    "amplitude": (list, False),
}
ESTIMATE_KEYS = {
    "s": (_Num, False),
    "T_list": (list, False),
    "sigma": (_Num, False),
    "eps": (_Num, False),
    "n_pairs": (int, False),
    "refine": (bool, False),
}
BLOCKS = {"problem": PROBLEM_KEYS, "numerics": NUMERICS_KEYS, "sweep": SWEEP_KEYS, "estimates": ESTIMATE_KEYS}
REQUIRED_BLOCKS = ("problem", "numerics")

_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")


def _locate(text: str):
    """Line numbers of table headers and of ``key =`` lines, keyed by ``(table, key)``."""
    tables, keys = {}, {}
    current = ""
    for i, line in enumerate(text.splitlines(), start=1):
        m = _HEADER.match(line)
        if m:
            current = m.group(1)
            tables.setdefault(current, i)
            continue
        m = _KEY.match(line)
        if m:
            keys.setdefault((current, m.group(1)), i)
    return tables, keys


@dataclass
class RunConfig:
    problem: dict
    numerics: dict
    sweep: dict = field(default_factory=dict)
    estimates: dict = field(default_factory=dict)
    source: str = "<config>"

    def with_overrides(self, **flags) -> "RunConfig":
        """One-for-one overrides; ``None`` values are ignored."""
        prob, num = dict(self.problem), dict(self.numerics)
        for key, val in flags.items():
            if val is None:
                continue
            if key in PROBLEM_KEYS:
                prob[key] = val
            elif key in NUMERICS_KEYS:
                num[key] = val
            else:
                raise ConfigError(f"unknown override {key!r}", source=self.source)
        out = replace(self, problem=prob, numerics=num)
        try:
            _check_values({"problem": prob, "numerics": num}, {}, {}, self.source)
        except ConfigError as exc:
            raise ConfigError(f"after command-line overrides: {exc.args[0].split(': ', 1)[-1]}",
                              source=self.source) from None
        return out

    @property
    def grid(self) -> Grid1D:
        return Grid1D.half_line(float(self.numerics["L"]), int(self.numerics["n"]))

    @property
    def seed(self) -> int:
        return int(self.numerics.get("seed", 0))

    def build_problem(self, amplitude_scale: float = 1.0, **changes) -> NlsProblem:
        prob = {**self.problem, **changes}
        grid = self.grid
        lam, r = float(prob["lambda"]), float(prob["r"])
        desc = prob["u0"]
        if desc.get("family") == "robin-wave":
            # the profile depends nonlinearly on its amplitude, so scale inside it
            desc = {**desc, "amplitude": amplitude_scale * float(desc.get("amplitude", 1.0))}
            u0 = initial_profile(desc, grid.points, self.source, lam=lam, r=r)
        else:
            u0 = amplitude_scale * initial_profile(desc, grid.points, self.source, lam=lam, r=r)
        mode = prob.get("mode", CLOSED_LOOP)
        h = None
        if mode == OPEN_LOOP:
            h = boundary_profile(prob.get("h", {"family": "zero"}), self.source)
        return NlsProblem(
            s=float(prob["s"]), p=float(prob["p"]), r=float(prob["r"]), k=float(prob["k"]),
            lam=lam, T=float(prob["T"]), u0=GridFunction(grid, u0), mode=mode, h=h,
        )

    def build_settings(self) -> SolverSettings:
        num = self.numerics
        kw = {"dt": float(num["dt"])}
        for key in ("tol", "beta_max", "blowup_factor", "blowup_cap", "t0_min"):
            if key in num:
                kw[key] = float(num[key])
        if "max_iter" in num:
            kw["max_iter"] = int(num["max_iter"])
        return SolverSettings(**kw)


def initial_profile(desc: dict, x, source: str = "<config>", lam: float = 0.0, r: float = 2.0) -> np.ndarray:
    """Analytic initial data ``amplitude * shape((x - center) / width)``.

    ``robin-wave`` ignores ``width`` and ``center``: it is
    ``a exp(-lam a^r x) (1 + lift x^2 exp(-x))``, which obeys the closed-loop
    law ``u'(0) = -lam |u(0)|^r u(0)`` for every amplitude ``a`` and ``lift``.
    """
    fam = desc.get("family")
    a = float(desc.get("amplitude", 1.0))
    w = float(desc.get("width", 1.0))
    c = float(desc.get("center", 0.0))
    y = (np.asarray(x) - c) / w
    if fam == "exponential":
        return a * np.exp(-y) + 0j
    if fam == "gaussian":
        return a * np.exp(-(y**2)) + 0j
    if fam == "sech":
        return a / np.cosh(y) + 0j
    if fam == "bump":
        # vanishing value and slope at x = 0: compatible with any boundary law
        return a * (np.asarray(x) / w) ** 2 * np.exp(-(y**2)) + 0j
    if fam == "robin-wave":
        lift = float(desc.get("lift", 1.0))
        x = np.asarray(x)
        return a * np.exp(-lam * abs(a) ** r * x) * (1 + lift * x**2 * np.exp(-x)) + 0j
    raise ConfigError(f"u0 family must be one of {U0_FAMILIES}, got {fam!r}", source=source)


def boundary_profile(desc: dict, source: str = "<config>"):
    """Open-loop data as a callable of absolute time."""
    fam = desc.get("family", "zero")
    a = float(desc.get("amplitude", 1.0))
    dur = float(desc.get("duration", 1.0))
    power = float(desc.get("power", 2.0))
    omega = float(desc.get("omega", 2 * np.pi))
    if fam == "zero":
        return lambda t: np.zeros_like(np.asarray(t, dtype=float)) + 0j
    if fam == "bump":
        def bump(t):
            tau = np.clip(np.asarray(t, dtype=float) / dur, 0.0, 1.0)
            return a * (4 * tau * (1 - tau)) ** power + 0j
        return bump
    if fam == "sine":
        return lambda t: a * np.asarray(t, dtype=float) ** 2 * np.sin(omega * np.asarray(t, dtype=float)) + 0j
    raise ConfigError(f"h family must be one of {H_FAMILIES}, got {fam!r}", source=source)


def _check_block(name, block, schema, tables, keys, source):
    header = tables.get(name)
    for key in block:
        if key not in schema:
            raise ConfigError(f"unknown key '{name}.{key}'", keys.get((name, key), header), source)
    for key, (kind, required) in schema.items():
        if key not in block:
            if required:
                raise ConfigError(f"missing required key '{name}.{key}'", header, source)
            continue
        val = block[key]
        line = keys.get((name, key), header)
        ok = isinstance(val, kind) and not (isinstance(val, bool) and kind is not bool)
        if not ok:
            want = kind.__name__ if isinstance(kind, type) else "number"
            raise ConfigError(f"key '{name}.{key}' must be a {want}, got {type(val).__name__}", line, source)
        if kind is _Num and not np.isfinite(val):
            raise ConfigError(f"key '{name}.{key}' must be finite", line, source)


def _check_values(cfg: dict, keys, tables, source):
    prob, num = cfg["problem"], cfg["numerics"]

    def fail(block, key, msg):
        raise ConfigError(f"key '{block}.{key}' {msg}", keys.get((block, key), tables.get(block)), source)

    s = prob["s"]
    if not 0.5 < s < 3.5 or abs(s - 1.5) < 1e-12:
        fail("problem", "s", f"= {s} must lie in (1/2, 7/2) without 3/2")
    for key in ("p", "r", "T"):
        if prob[key] <= 0:
            fail("problem", key, "must be positive")
    mode = prob.get("mode", CLOSED_LOOP)
    if mode not in (OPEN_LOOP, CLOSED_LOOP):
        fail("problem", "mode", f"must be '{CLOSED_LOOP}' or '{OPEN_LOOP}'")
    if prob["u0"].get("family") not in U0_FAMILIES:
        fail("problem", "u0", f"needs family in {U0_FAMILIES}")
    if "h" in prob and prob["h"].get("family", "zero") not in H_FAMILIES:
        fail("problem", "h", f"needs family in {H_FAMILIES}")
    for key in ("L", "dt"):
        if num[key] <= 0:
            fail("numerics", key, "must be positive")
    if num["n"] < 8:
        fail("numerics", "n", "must be at least 8")
    if "T0" in num and not 0 < num["T0"] <= prob["T"]:
        fail("numerics", "T0", "must lie in (0, T]")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}", getattr(exc, "lineno", None), source) from None
    tables, keys = _locate(text)
    # inline tables such as u0 = {...} count as keys of their parent block
    for name in data:
        if name not in BLOCKS:
            raise ConfigError(f"unknown block [{name}]", tables.get(name, keys.get(("", name))), source)
        if not isinstance(data[name], dict):
            raise ConfigError(f"'{name}' must be a table", keys.get(("", name)), source)
    for name in REQUIRED_BLOCKS:
        if name not in data:
            raise ConfigError(f"missing required block [{name}]", None, source)
    for name, schema in BLOCKS.items():
        block = data.get(name, {})
        # sub-tables written as [problem.u0] have their own header line
        for sub in ("u0", "h"):
            if f"{name}.{sub}" in tables:
                keys.setdefault((name, sub), tables[f"{name}.{sub}"])
        _check_block(name, block, schema, tables, keys, source)
    _check_values(data, keys, tables, source)
    return RunConfig(
        problem=data["problem"],
        numerics=data["numerics"],
        sweep=data.get("sweep", {}),
        estimates=data.get("estimates", {}),
        source=source,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))


def bundled_config(name: str) -> Path:
    """Path of a configuration shipped with the package (``linear``, ``nonlinear`` or ``blowup``)."""
    path = Path(__file__).resolve().parents[2] / "configs" / f"{name}.toml"
    if not path.exists():
        raise ConfigError(f"no bundled config named {name!r}", None, str(path))
    return path
