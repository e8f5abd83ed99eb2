import numpy as np
import pytest

from halfline_nls import InvalidInputError
from halfline_nls.config import (
    ConfigError,
    bundled_config,
    initial_profile,
    load_config,
    parse_config,
)
from halfline_nls.io import csv_body, read_csv, read_snapshot, write_csv, write_snapshot
from halfline_nls.solver import check_compatibility

GOOD = """\
[problem]
s = 2.0
p = 2.0
r = 2.0
k = 1.0
lambda = 1.0
T = 0.1
u0 = { family = "exponential", amplitude = 1.0 }

[numerics]
L = 20.0
n = 64
dt = 1e-3
"""


# -- csv ---------------------------------------------------------------------


def test_csv_round_trip(tmp_path):
    path = write_csv(tmp_path / "a" / "x.csv", ("t", "v"), [(0.0, 1), (0.5, 2.25)], {"seed": 3})
    cols, rows = read_csv(path)
    assert cols == ["t", "v"]
    assert rows == [["0.0", "1"], ["0.5", "2.25"]]
    assert "# seed = 3" in path.read_text()


def test_csv_body_ignores_the_timestamp(tmp_path):
    a = write_csv(tmp_path / "a.csv", ("x",), [(0.1,)], {"k": "v"})
    b = write_csv(tmp_path / "b.csv", ("x",), [(0.1,)], {"k": "v"})
    assert csv_body(a) == csv_body(b) == "x\n0.1\n"


def test_csv_floats_round_trip_exactly(tmp_path):
    vals = [1 / 3, np.float64(2e-17), np.pi]
    path = write_csv(tmp_path / "f.csv", ("v",), [(v,) for v in vals], timestamp=False)
    assert [float(r[0]) for r in read_csv(path)[1]] == [float(v) for v in vals]


# -- snapshots -----------------------------------------------------------------


def test_snapshot_round_trip(tmp_path, rng):
    vals = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    path = write_snapshot(tmp_path / "f.hlns", vals, 0.0, 0.25, 1.0, 0.5)
    back, meta = read_snapshot(path)
    assert back.dtype == np.complex64
    assert np.array_equal(back, vals.astype(np.complex64))
    assert meta == {"x_min": 0.0, "dx": 0.25, "t0": 1.0, "dt": 0.5, "version": 1}
    assert path.stat().st_size == 4 + 3 * 4 + 4 * 8 + 15 * 8


def test_snapshot_rejects_bad_files(tmp_path):
    with pytest.raises(InvalidInputError):
        write_snapshot(tmp_path / "x", np.zeros(4), 0.0, 1.0, 0.0, 1.0)
    good = write_snapshot(tmp_path / "g", np.zeros((2, 2)), 0.0, 1.0, 0.0, 1.0)
    raw = good.read_bytes()
    for name, blob in [("short", raw[:10]), ("magic", b"XXXX" + raw[4:]), ("body", raw[:-8])]:
        p = tmp_path / name
        p.write_bytes(blob)
        with pytest.raises(InvalidInputError):
            read_snapshot(p)


# -- config --------------------------------------------------------------------


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.grid.n == 64
    pr = cfg.build_problem()
    assert pr.lam == 1.0 and pr.k == 1.0
    assert cfg.build_settings().dt == 1e-3
    assert cfg.seed == 0


def test_missing_key_names_key_and_line():
    text = GOOD.replace("s = 2.0\n", "")
    with pytest.raises(ConfigError) as err:
        parse_config(text, "run.toml")
    msg = str(err.value)
    assert "problem.s" in msg
    assert msg.startswith("run.toml:1:")


@pytest.mark.parametrize(
    "old, new, fragment, line",
    [
        ("n = 64", "n = 4", "numerics.n", 12),
        ("n = 64", "n = 64.5", "numerics.n", 12),
        ("s = 2.0", "s = 1.5", "problem.s", 2),
        ('family = "exponential"', 'family = "square"', "problem.u0", 8),
        ("T = 0.1", "T = -1", "problem.T", 7),
        ("dt = 1e-3", "dt = nan", "numerics.dt", 13),
    ],
)
def test_schema_violations_are_line_precise(old, new, fragment, line):
    with pytest.raises(ConfigError) as err:
        parse_config(GOOD.replace(old, new), "c.toml")
    assert fragment in str(err.value)
    assert err.value.line == line


def test_unknown_block_and_bad_toml():
    with pytest.raises(ConfigError) as err:
        parse_config(GOOD + "\n[extras]\nx = 1\n")
    assert "extras" in str(err.value)
    with pytest.raises(ConfigError):
        parse_config("[problem\n")


def test_overrides_are_validated():
    cfg = parse_config(GOOD)
    assert cfg.with_overrides(n=128, s=None).numerics["n"] == 128
    with pytest.raises(ConfigError):
        cfg.with_overrides(s=1.5)
    with pytest.raises(ConfigError):
        cfg.with_overrides(colour=1)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.toml")
    with pytest.raises(ConfigError):
        bundled_config("absent")


@pytest.mark.parametrize("name", ["linear", "nonlinear", "blowup"])
def test_bundled_configs_load(name):
    cfg = load_config(bundled_config(name))
    assert cfg.build_problem().u0.values.size == cfg.numerics["n"]


def test_profiles():
    x = np.linspace(0, 5, 11)
    assert np.allclose(initial_profile({"family": "gaussian", "width": 2.0}, x), np.exp(-(x**2) / 4))
    assert np.allclose(initial_profile({"family": "sech", "amplitude": 3.0}, x), 3 / np.cosh(x))
    bump = initial_profile({"family": "bump"}, x)
    assert bump[0] == 0
    with pytest.raises(ConfigError):
        initial_profile({"family": "box"}, x)


@pytest.mark.parametrize("amp", [1.0, 1.5, 2.0])
def test_robin_wave_meets_the_boundary_law(amp):
    cfg = load_config(bundled_config("blowup"))
    pr = cfg.with_overrides(n=4097).build_problem(amplitude_scale=amp)
    assert abs(pr.u0.values[0]) == pytest.approx(amp)
    assert check_compatibility(pr) < 1e-6 * amp**5
