"""Argument checks shared by the estimator and the command line."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_scalar

from .exceptions import InvalidInputError
from .solver import CLOSED_LOOP, OPEN_LOOP


def check_positive(value, name: str, include_zero: bool = False) -> float:
    try:
        return float(
            check_scalar(
                value, name, numbers.Real, min_val=0.0,
                include_boundaries="both" if include_zero else "neither",
            )
        )
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(str(exc)) from None


def check_sobolev_index(s) -> float:
    s = check_positive(s, "s")
    if not 0.5 < s < 3.5 or abs(s - 1.5) < 1e-12:
        raise InvalidInputError(f"s = {s} must lie in (1/2, 7/2) without 3/2")
    return s


def check_mode(mode) -> str:
    if mode not in (OPEN_LOOP, CLOSED_LOOP):
        raise InvalidInputError(f"mode must be '{OPEN_LOOP}' or '{CLOSED_LOOP}', got {mode!r}")
    return mode


def check_grid_size(n) -> int:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 8:
        raise InvalidInputError(f"n must be an integer >= 8, got {n!r}")
    return int(n)


def check_profile(u0, n: int | None = None) -> np.ndarray:
    """1-D finite complex samples, optionally of length ``n``."""
    arr = np.asarray(u0)
    if arr.ndim != 1:
        raise InvalidInputError(f"initial data must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.size != n:
        raise InvalidInputError(f"initial data have {arr.size} samples, expected {n}")
    arr = arr.astype(complex)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("initial data contain non-finite values")
    return arr


def check_times(t, horizon: float) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(t)):
        raise InvalidInputError("times must be finite")
    if t.min() < -1e-12 or t.max() > horizon + 1e-12:
        raise InvalidInputError(f"times must lie in [0, {horizon:g}]")
    return t
