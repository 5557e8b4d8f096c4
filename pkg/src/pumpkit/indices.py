"""All rationality measures for one dataset, with their independent cross-checks.

The additive cost inefficiency ``A`` and the quasilinear utility inefficiency
``Q`` (and their constrained versions) are infima over utility functions and
are not computed directly: they equal the corresponding money pump, which is
computed by assignment and confirmed by the slack LP and by the utility that
attains the infimum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _tol
from .dataset import Dataset
from .errors import TruncationWarning, ZeroExpenditure
from .graph import (
    DEFAULT_CYCLE_CAP,
    Cycle,
    build_graph,
    check_cyclical_monotonicity,
    check_garp,
    enumerate_garp_violations,
    garp_cycle,
)
from .lp import AfriatSolution, solve_afriat_lp
from .pump import PumpResult, els_average, scsd_max, tmp, tmp_constrained
from .utility import RationalizationCertificate, build_optimal_permutation_rationalizer, verify_quasilinear

CROSS_CHECK_TOL = 1e-7
CCEI_TOL = 1e-9


def _relaxed_passes(e: np.ndarray, waste: float, tol: float) -> bool:
    own = np.diag(e)[:, None] * (1.0 - waste)
    weak = own >= e - tol
    strict = own > e + tol
    np.fill_diagonal(weak, True)
    np.fill_diagonal(strict, False)
    return garp_cycle(weak, strict) is None


def ccei(d: Dataset, tol: float = CCEI_TOL, rel_tol: float | None = None) -> tuple[float, float]:
    """Afriat's critical cost efficiency index as ``(waste, efficiency)``.

    ``waste`` is the smallest ``e`` in ``[0, 1]`` for which the relations
    ``(1 - e) p^t . x^t >= p^t . x^s`` contain no cycle with a strict link,
    found by bisection to within ``tol``; ``efficiency = 1 - waste``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rel_tol = _tol.resolve(rel_tol)
    e = d.expenditure.values
    if _relaxed_passes(e, 0.0, rel_tol):
        return 0.0, 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _relaxed_passes(e, mid, rel_tol):
            hi = mid
        else:
            lo = mid
    return hi, 1.0 - hi


def ccei_passes(d: Dataset, waste: float, rel_tol: float | None = None) -> bool:
    """Whether budgets shrunk by the fraction ``waste`` leave no revealed-preference violation."""
    return _relaxed_passes(d.expenditure.values, waste, _tol.resolve(rel_tol))


def a_tilde(d: Dataset, tmp_value: float) -> float:
    """Money pump as a share of total expenditure."""
    total = d.total_expenditure
    if not total > 0.0:
        raise ZeroExpenditure("total expenditure is zero; the normalized index is undefined")
    return tmp_value / total


@dataclass(frozen=True)
class CrossCheck:
    name: str
    delta: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "delta": self.delta, "pass": self.passed}


@dataclass(frozen=True, eq=False)
class RationalityReport:
    T: int
    L: int
    tmp: float
    tmp_c: float
    epsilon_bar: float
    epsilon_bar_c: float
    A: float
    Q: float
    A_c: float
    Q_c: float
    els_mean: float
    els_median: float
    scsd_max: float
    cycles_truncated: bool
    no_violations: bool
    ccei_waste: float
    ccei_efficiency: float
    a_tilde: float | None
    garp: bool
    cm: bool
    garp_witness: Cycle | None
    cm_witness: Cycle | None
    pump: PumpResult
    pump_c: PumpResult
    lp: AfriatSolution
    lp_c: AfriatSolution
    cycles: tuple[Cycle, ...]
    cross_checks: tuple[CrossCheck, ...]
    certificates: dict[str, RationalizationCertificate]

    @property
    def consistent(self) -> bool:
        """All cross-checks agree and every attaining utility certifies."""
        return all(c.passed for c in self.cross_checks) and all(c.passed for c in self.certificates.values())

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "L": self.L,
            "tmp": self.tmp,
            "tmp_c": self.tmp_c,
            "epsilon_bar": self.epsilon_bar,
            "epsilon_bar_c": self.epsilon_bar_c,
            "A": self.A,
            "Q": self.Q,
            "A_c": self.A_c,
            "Q_c": self.Q_c,
            "els_mean": self.els_mean,
            "els_median": self.els_median,
            "scsd_max": self.scsd_max,
            "cycles_truncated": self.cycles_truncated,
            "no_violations": self.no_violations,
            "ccei_waste": self.ccei_waste,
            "ccei_efficiency": self.ccei_efficiency,
            "a_tilde": self.a_tilde,
            "garp": self.garp,
            "cm": self.cm,
            "garp_witness": None if self.garp_witness is None else self.garp_witness.to_dict(),
            "cm_witness": None if self.cm_witness is None else self.cm_witness.to_dict(),
            "pump": self.pump.to_dict(),
            "pump_c": self.pump_c.to_dict(),
            "lp": self.lp.to_dict(),
            "lp_c": self.lp_c.to_dict(),
            "cycles": [c.to_dict() for c in self.cycles],
            "cross_checks": [c.to_dict() for c in self.cross_checks],
            "certificates": {k: v.to_dict() for k, v in self.certificates.items()},
        }


def full_report(
    d: Dataset,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
    samples: int = 1000,
    seed: int | None = 0,
    tol: float | None = None,
) -> RationalityReport:
    tol = _tol.resolve(tol)
    g = build_graph(d, tol)
    garp = check_garp(g)
    cm = check_cyclical_monotonicity(g)
    pump = tmp(d)
    pump_c = tmp_constrained(d, tol)
    lp = solve_afriat_lp(d, False, tol)
    lp_c = solve_afriat_lp(d, True, tol)

    cycles = enumerate_garp_violations(g, cycle_cap)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        mean = els_average(cycles, "mean")
        median = els_average(cycles, "median")
        biggest = scsd_max(cycles)

    opt = build_optimal_permutation_rationalizer(d, False, tol)
    opt_c = build_optimal_permutation_rationalizer(d, True, tol)
    certificates = {
        "quasilinear": verify_quasilinear(opt.utility, opt.permuted, False, samples, seed),
        "constrained": verify_quasilinear(opt_c.utility, opt_c.permuted, True, samples, seed),
    }

    def cross(name: str, lhs: float, rhs: float) -> CrossCheck:
        delta = abs(lhs - rhs)
        return CrossCheck(name, delta, delta <= CROSS_CHECK_TOL)

    checks = (
        cross("tmp vs epsilon_bar", pump.value, lp.epsilon_bar),
        cross("tmp_c vs epsilon_bar_c", pump_c.value, lp_c.epsilon_bar),
        cross("tmp vs attaining utility gap", pump.value, opt.gap),
        cross("tmp_c vs attaining utility gap", pump_c.value, opt_c.gap),
    )
    waste, efficiency = ccei(d, rel_tol=tol)
    total = d.total_expenditure
    return RationalityReport(
        T=d.T,
        L=d.num_goods,
        tmp=pump.value,
        tmp_c=pump_c.value,
        epsilon_bar=lp.epsilon_bar,
        epsilon_bar_c=lp_c.epsilon_bar,
        A=pump.value,
        Q=pump.value,
        A_c=pump_c.value,
        Q_c=pump_c.value,
        els_mean=mean,
        els_median=median,
        scsd_max=biggest,
        cycles_truncated=cycles.truncated,
        no_violations=len(cycles) == 0,
        ccei_waste=waste,
        ccei_efficiency=efficiency,
        a_tilde=a_tilde(d, pump.value) if total > 0 else None,
        garp=garp.satisfied,
        cm=cm.satisfied,
        garp_witness=garp.witness,
        cm_witness=cm.witness,
        pump=pump,
        pump_c=pump_c,
        lp=lp,
        lp_c=lp_c,
        cycles=cycles.cycles,
        cross_checks=checks,
        certificates=certificates,
    )
