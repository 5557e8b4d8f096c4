"""Synthetic datasets from exact utility maximizers, plus a uniform random generator."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .dataset import Dataset


def _check_shape(T: int, L: int) -> None:
    if T < 1 or L < 1:
        raise ValueError(f"need T >= 1 and L >= 1, got T={T}, L={L}")


def _range(r: tuple[float, float], name: str) -> tuple[float, float]:
    lo, hi = float(r[0]), float(r[1])
    if not (0 < lo <= hi):
        raise ValueError(f"{name} must satisfy 0 < low <= high, got {r}")
    return lo, hi


def quasilinear_demand(coef: ArrayLike, prices: ArrayLike) -> NDArray[np.float64]:
    """Maximizer of ``sum_l a_l sqrt(x_l) - p . x``: ``x_l = (a_l / (2 p_l))^2``."""
    coef = np.asarray(coef, float)
    return (coef / (2.0 * np.asarray(prices, float))) ** 2


def cobb_douglas_demand(shares: ArrayLike, prices: ArrayLike, incomes: ArrayLike) -> NDArray[np.float64]:
    """Budget-constrained Cobb-Douglas demand ``x_l = alpha_l m / p_l``."""
    prices = np.atleast_2d(np.asarray(prices, float))
    incomes = np.asarray(incomes, float).reshape(-1, 1)
    return np.asarray(shares, float)[None, :] * incomes / prices


def generate_quasilinear_dataset(
    seed: int | None, T: int, L: int, price_range: tuple[float, float] = (0.5, 2.0)
) -> Dataset:
    """Observations from a single quasilinear consumer; always cyclically monotone."""
    _check_shape(T, L)
    lo, hi = _range(price_range, "price_range")
    rng = np.random.default_rng(seed)
    coef = rng.uniform(0.5, 2.0, size=L)
    prices = rng.uniform(lo, hi, size=(T, L))
    return Dataset(prices, quasilinear_demand(coef, prices))


def generate_cobb_douglas_dataset(
    seed: int | None,
    T: int,
    L: int,
    income_range: tuple[float, float] = (1.0, 4.0),
    price_range: tuple[float, float] = (0.5, 2.0),
) -> Dataset:
    """Observations from a Cobb-Douglas consumer with varying income; always satisfies GARP."""
    _check_shape(T, L)
    plo, phi = _range(price_range, "price_range")
    ilo, ihi = _range(income_range, "income_range")
    rng = np.random.default_rng(seed)
    shares = rng.dirichlet(np.ones(L))
    prices = rng.uniform(plo, phi, size=(T, L))
    incomes = rng.uniform(ilo, ihi, size=T)
    return Dataset(prices, cobb_douglas_demand(shares, prices, incomes))


def random_dataset(rng: np.random.Generator, T: int, L: int, low: float = 0.1, high: float = 10.0) -> Dataset:
    """Prices and quantities drawn independently and uniformly from ``[low, high]``."""
    _check_shape(T, L)
    return Dataset(rng.uniform(low, high, size=(T, L)), rng.uniform(low, high, size=(T, L)))
