"""Global numeric tolerance for expenditure comparisons."""

from __future__ import annotations

import os

DEFAULT_TOL = 1e-9
ENV_VAR = "PUMPKIT_TOL"


def tol_num() -> float:
    """Absolute tolerance applied to every >=, > or = test on currency amounts.

    Reads ``PUMPKIT_TOL`` on each call so the CLI and tests can override it.
    """
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    value = float(raw)
    if not value >= 0.0:
        raise ValueError(f"{ENV_VAR} must be a non-negative number, got {raw!r}")
    return value


def resolve(tol: float | None) -> float:
    return tol_num() if tol is None else float(tol)
