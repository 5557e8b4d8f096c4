"""Explicit rationalizing utilities and sampled verification certificates.

Every constructed utility is a minimum of pieces, one per observation::

    U(x) = min_t  phi_t + f_t(x)

with ``f_t(x) = p^t . x - p^t . x^t`` in the unconstrained case. In the
budget-constrained case ``f_t`` adds ``(beta - 1) * max(0, p^t . x - m^t)``, a
continuous increasing penalty that switches on outside the budget set. The
potentials ``phi`` are shortest-path distances in the graph whose edge
``a -> b`` weighs ``f_a(x^b)``, which makes ``U(x^t) = phi_t``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _tol
from .dataset import Dataset, ordered_dot
from .errors import BetaSearchFailed, DimensionMismatch, NotCyclicallyMonotone, PumpableUnderBudgets
from .graph import bellman_ford, build_graph, find_negative_cycle, make_cycle
from .pump import PumpResult, allowed_matrix, tmp, tmp_constrained, tmp_with_budgets

BETA_START = 2.0
BETA_MAX = 2.0**60
VERIFY_TOL = 1e-9

Kind = Literal["unconstrained", "budget_constrained"]


@dataclass(frozen=True, eq=False)
class PiecewiseLinearUtility:
    kind: Kind
    phi: NDArray[np.float64]
    prices: NDArray[np.float64]
    anchors: NDArray[np.float64]
    budgets: NDArray[np.float64] | None = None
    beta: float | None = None
    budget_tol: float = 0.0
    offsets: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        phi = np.asarray(self.phi, float).ravel()
        prices = np.atleast_2d(np.asarray(self.prices, float))
        anchors = np.atleast_2d(np.asarray(self.anchors, float))
        if prices.shape != anchors.shape or prices.shape[0] != phi.size:
            raise DimensionMismatch("phi, prices and anchors must describe the same pieces")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "anchors", anchors)
        # offsets[t] = p^t . x^t, computed exactly as in the expenditure matrix
        object.__setattr__(self, "offsets", np.diag(ordered_dot(prices, anchors)).copy())
        if self.kind == "budget_constrained":
            if self.budgets is None or self.beta is None:
                raise ValueError("budget-constrained utilities need budgets and beta")
            object.__setattr__(self, "budgets", np.asarray(self.budgets, float).ravel())
            if self.beta < 1.0:
                raise ValueError("beta must be at least 1")
        elif self.kind != "unconstrained":
            raise ValueError(f"unknown utility kind {self.kind!r}")

    @property
    def num_goods(self) -> int:
        return self.prices.shape[1]

    def piece_values(self, x: ArrayLike) -> NDArray[np.float64]:
        """``(N, T)`` matrix of ``phi_t + f_t(x_i)``."""
        X = np.atleast_2d(np.asarray(x, float))
        if X.shape[1] != self.num_goods:
            raise DimensionMismatch(f"bundle has {X.shape[1]} goods, utility expects {self.num_goods}")
        spend = ordered_dot(X, self.prices)
        f = spend - self.offsets[None, :]
        if self.kind == "budget_constrained":
            excess = np.maximum(spend - (self.budgets + self.budget_tol)[None, :], 0.0)
            f = f + (self.beta - 1.0) * excess
        return self.phi[None, :] + f

    def __call__(self, x: ArrayLike) -> NDArray[np.float64] | float:
        values = self.piece_values(x).min(axis=1)
        return float(values[0]) if np.ndim(x) == 1 else values

    def to_dict(self) -> dict:
        pieces = []
        for t in range(self.phi.size):
            piece = {
                "phi": float(self.phi[t]),
                "p": [float(v) for v in self.prices[t]],
                "x": [float(v) for v in self.anchors[t]],
            }
            if self.budgets is not None:
                piece["m"] = float(self.budgets[t])
            pieces.append(piece)
        return {"kind": self.kind, "pieces": pieces, "beta": self.beta, "budget_tol": self.budget_tol}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "PiecewiseLinearUtility":
        pieces = doc["pieces"]
        budgets = [pc["m"] for pc in pieces] if pieces and "m" in pieces[0] else None
        return cls(
            kind=doc["kind"],
            phi=np.array([pc["phi"] for pc in pieces], float),
            prices=np.array([pc["p"] for pc in pieces], float),
            anchors=np.array([pc["x"] for pc in pieces], float),
            budgets=None if budgets is None else np.array(budgets, float),
            beta=doc.get("beta"),
            budget_tol=float(doc.get("budget_tol", 0.0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseLinearUtility":
        return cls.from_dict(json.loads(text))


def evaluate_utility(u: PiecewiseLinearUtility, x: ArrayLike) -> float:
    """``U(x)`` for a single bundle."""
    x = np.asarray(x, float)
    if x.ndim != 1:
        raise DimensionMismatch("evaluate_utility takes one bundle; call the utility directly for a batch")
    return u(x)


def additive_utility(u: PiecewiseLinearUtility, bundles: ArrayLike) -> float:
    """``sum_t U(x~^t)`` over a sequence of bundles."""
    return float(np.sum(u(np.atleast_2d(np.asarray(bundles, float)))))


# ---------------------------------------------------------------------------
# constructions


def _potentials(weights: NDArray[np.float64]) -> NDArray[np.float64]:
    dist, _, _ = bellman_ford(weights)
    return dist


def build_quasilinear_rationalizer(d: Dataset, tol: float | None = None) -> PiecewiseLinearUtility:
    """Concave, increasing ``U`` with ``x^t`` maximizing ``U(x) - p^t . x`` over all bundles.

    Raises :class:`NotCyclicallyMonotone` (carrying a money-pump cycle) when the
    data admit a money pump, since then no such ``U`` exists.
    """
    tol = _tol.resolve(tol)
    g = build_graph(d, tol)
    weights = np.asarray(g.weights)
    cycle = find_negative_cycle(weights, tol)
    if cycle is not None:
        witness = make_cycle(g, cycle)
        raise NotCyclicallyMonotone(
            f"data admit a money pump through observations {[n + 1 for n in witness.nodes]}"
            f" worth {witness.mp_value:g}",
            witness,
        )
    return PiecewiseLinearUtility("unconstrained", _potentials(weights), d.prices.copy(), d.bundles.copy())


def _budget_weights(e: NDArray[np.float64], budgets: NDArray[np.float64], beta: float, tol: float):
    own = np.diag(e)
    excess = np.maximum(e - (budgets + tol)[:, None], 0.0)
    return (e - own[:, None]) + (beta - 1.0) * excess


def _beta_conditions(e, budgets, beta, tol) -> tuple[bool, bool, NDArray[np.float64] | None]:
    """(no negative cycle, shortest paths avoid over-budget edges, potentials)."""
    weights = _budget_weights(e, budgets, beta, tol)
    if find_negative_cycle(weights, tol) is not None:
        return False, False, None
    phi = _potentials(weights)
    over = e > budgets[:, None] + tol
    np.fill_diagonal(over, False)
    slack = phi[:, None] + weights - phi[None, :]
    return True, bool(np.all(slack[over] > VERIFY_TOL)), phi


def build_constrained_rationalizer(
    d: Dataset, budgets: Sequence[float] | None = None, tol: float | None = None
) -> PiecewiseLinearUtility:
    """Increasing, continuous ``U`` with ``x^t`` maximizing ``U(x) - p^t . x`` on ``{p^t . x <= m^t}``.

    ``budgets`` default to ``m^t = p^t . x^t``. The hypothesis is that no
    permutation respecting the budgets pumps money out of the data; otherwise
    :class:`PumpableUnderBudgets` is raised with a witness cycle. The penalty
    slope ``beta`` is doubled from 2 until every shortest path to an
    observation runs through within-budget edges only.
    """
    tol = _tol.resolve(tol)
    e = d.expenditure.values
    own = np.diag(e)
    m = own.copy() if budgets is None else np.asarray(budgets, float).ravel()
    if m.size != d.T:
        raise DimensionMismatch(f"{m.size} budgets for {d.T} observations")
    if np.any(m < own - tol):
        t = int(np.argmax(own - m))
        raise ValueError(f"budget of observation {t + 1} is below its own expenditure")

    pump = tmp_with_budgets(d, m, tol)
    if pump.value > tol:
        g = build_graph(d, tol)
        witness = max((make_cycle(g, c) for c in pump.cycles()), key=lambda c: c.mp_value)
        raise PumpableUnderBudgets(
            f"a budget-respecting trade pumps {pump.value:g} through observations"
            f" {[n + 1 for n in witness.nodes]}",
            witness,
        )

    beta = BETA_START
    while beta <= BETA_MAX:
        acyclic, in_budget, phi = _beta_conditions(e, m, beta, tol)
        if acyclic and in_budget:
            return PiecewiseLinearUtility(
                "budget_constrained", phi, d.prices.copy(), d.bundles.copy(), m, beta, tol
            )
        beta *= 2.0
    raise BetaSearchFailed(f"no penalty slope up to {BETA_MAX:g} satisfies the construction")


def beta_conditions(u: PiecewiseLinearUtility, d: Dataset, beta: float) -> tuple[bool, bool]:
    """Check the two penalty-slope conditions of ``u``'s construction at another ``beta``."""
    acyclic, in_budget, _ = _beta_conditions(d.expenditure.values, u.budgets, beta, u.budget_tol)
    return acyclic, in_budget


class OptimalRationalizer(NamedTuple):
    utility: PiecewiseLinearUtility
    gap: float
    pump: PumpResult
    permuted: Dataset
    budgets: NDArray[np.float64] | None


def build_optimal_permutation_rationalizer(
    d: Dataset, constrained: bool = False, tol: float | None = None
) -> OptimalRationalizer:
    """Utility attaining the inefficiency infimum, built from the arbitrageur's best strategy.

    With ``sigma`` the optimal (constrained) pump permutation, the permuted data
    ``(p^t, x^{sigma(t)})`` admit a rationalizer (budget-constrained at the
    original budgets ``p^t . x^t`` when ``constrained``). The returned ``gap``
    is ``sum_t [U(x^{sigma(t)}) - p^t . x^{sigma(t)}] - [U(x^t) - p^t . x^t]``,
    the utility wasted by the consumer under that ``U``.
    """
    tol = _tol.resolve(tol)
    pump = tmp_constrained(d, tol) if constrained else tmp(d)
    permuted = d.permuted(pump.permutation)
    if constrained:
        budgets = d.own_expenditure
        utility = build_constrained_rationalizer(permuted, budgets, tol)
    else:
        budgets = None
        utility = build_quasilinear_rationalizer(permuted, tol)
    spend_sigma = np.diag(permuted.expenditure.values)
    spend_own = d.own_expenditure
    gap = float(np.sum((utility(permuted.bundles) - spend_sigma) - (utility(d.bundles) - spend_own)))
    return OptimalRationalizer(utility, gap, pump, permuted, budgets)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Check:
    description: str
    passed: bool
    worst: float

    def to_dict(self) -> dict:
        return {"check": self.description, "pass": self.passed, "worst_violation": self.worst}


@dataclass(frozen=True)
class RationalizationCertificate:
    dataset_hash: str
    checks: tuple[Check, ...]
    sample_count: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, prefix: str) -> Check:
        return next(c for c in self.checks if c.description.startswith(prefix))

    def to_dict(self) -> dict:
        return {
            "dataset_hash": self.dataset_hash,
            "pass": self.passed,
            "sample_count": self.sample_count,
            "checks": [c.to_dict() for c in self.checks],
        }

    def summary(self) -> str:
        lines = [f"certificate for dataset {self.dataset_hash}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.description} (worst violation {c.worst:.3g})")
        return "\n".join(lines)


def _budget_sample(rng: np.random.Generator, p: NDArray[np.float64], m: float, n: int) -> NDArray[np.float64]:
    # uniform on {x >= 0, p.x <= m}: Dirichlet weights over L goods plus slack
    w = rng.dirichlet(np.ones(p.size + 1), size=n)[:, :-1]
    return w * (m / p)[None, :]


def verify_quasilinear(
    u: PiecewiseLinearUtility,
    d: Dataset,
    constrained: bool = False,
    samples: int = 1000,
    seed: int | None = 0,
    tol: float = VERIFY_TOL,
) -> RationalizationCertificate:
    """Check that ``x^t`` maximizes ``U(x) - p^t . x`` (over budget sets when ``constrained``).

    Budgets come from ``u.budgets`` when present, else ``p^t . x^t``. Checks:
    observed bundles against each other (no tolerance), ``samples`` random
    bundles per observation, monotonicity on random ordered pairs and, for
    unconstrained utilities, midpoint concavity.
    """
    rng = np.random.default_rng(seed)
    e = d.expenditure.values
    own = np.diag(e)
    budgets = u.budgets if (constrained and u.budgets is not None) else own
    slack_tol = u.budget_tol if u.kind == "budget_constrained" else _tol.tol_num()
    at_data = u(d.bundles)

    # U(x^s) <= U(x^t) + p^t.(x^s - x^t) for every admissible s
    excess = at_data[None, :] - (at_data[:, None] + (e - own[:, None]))
    if constrained:
        excess = np.where(e <= budgets[:, None] + slack_tol, excess, -np.inf)
    worst_data = float(excess.max())
    checks = [Check("observed bundles", worst_data <= 0.0, worst_data)]

    scale = float(d.bundles.max())
    box = 2.0 * scale if scale > 0 else 1.0
    worst_sample = -np.inf
    for t in range(d.T):
        p = d.prices[t]
        if constrained:
            X = _budget_sample(rng, p, float(budgets[t]), samples)
        else:
            X = rng.uniform(0.0, box, size=(samples, d.num_goods))
        spend = ordered_dot(X, p[None, :])[:, 0]
        gap = u(X) - (at_data[t] + (spend - own[t]))
        worst_sample = max(worst_sample, float(gap.max()))
    region = "budget sets" if constrained else f"box [0, {box:g}]^L"
    checks.append(Check(f"sampled bundles on {region}", worst_sample <= tol, worst_sample))

    lo = rng.uniform(0.0, box, size=(samples, d.num_goods))
    hi = lo + rng.uniform(0.0, box / 2, size=lo.shape)
    worst_mono = float((u(lo) - u(hi)).max())
    checks.append(Check("monotonicity", worst_mono <= tol, worst_mono))

    if u.kind == "unconstrained":
        a = rng.uniform(0.0, box, size=(samples, d.num_goods))
        b = rng.uniform(0.0, box, size=(samples, d.num_goods))
        worst_conc = float(((u(a) + u(b)) / 2 - u((a + b) / 2)).max())
        checks.append(Check("midpoint concavity", worst_conc <= tol, worst_conc))

    return RationalizationCertificate(d.digest(), tuple(checks), samples * d.T)
