"""Observed purchase data: validation, ingestion and the cross-expenditure matrix.

A dataset is a sequence of ``T`` observations ``(p^t, x^t)`` over ``L`` goods.
Observation indices are 0-based in the Python API; serialized reports number
observations from 1.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DimensionMismatch,
    MalformedInput,
    NegativeQuantity,
    NonFiniteValue,
    NonPositivePrice,
)

FORMATS = ("csv", "json")


def ordered_dot(left: NDArray[np.float64], right: NDArray[np.float64]) -> NDArray[np.float64]:
    """All pairwise inner products ``left[i] . right[j]``, summed over goods in index order.

    Every expenditure in the package goes through this function so that the same
    pair of vectors always yields the same float, bit for bit.
    """
    left = np.atleast_2d(left)
    right = np.atleast_2d(right)
    out = np.zeros((left.shape[0], right.shape[0]))
    for k in range(left.shape[1]):
        out += left[:, k, None] * right[None, :, k]
    return out


@dataclass(frozen=True)
class Observation:
    price: tuple[float, ...]
    bundle: tuple[float, ...]
    label: str


@dataclass(frozen=True, eq=False)
class Dataset:
    """``T`` price/bundle pairs; arrays are read-only after construction."""

    prices: NDArray[np.float64]
    bundles: NDArray[np.float64]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        prices = _as_matrix(self.prices, "prices")
        bundles = _as_matrix(self.bundles, "bundles")
        if prices.shape != bundles.shape:
            raise DimensionMismatch(
                f"prices have shape {prices.shape} but bundles have shape {bundles.shape}"
            )
        if prices.shape[0] < 1:
            raise DimensionMismatch("a dataset needs at least one observation")
        if prices.shape[1] < 1:
            raise DimensionMismatch("a dataset needs at least one good")
        if not (np.all(np.isfinite(prices)) and np.all(np.isfinite(bundles))):
            raise NonFiniteValue("prices and quantities must be finite")
        if np.any(prices <= 0.0):
            t, k = np.argwhere(prices <= 0.0)[0]
            raise NonPositivePrice(f"observation {t + 1}: price of good {k + 1} is {prices[t, k]}")
        if np.any(bundles < 0.0):
            t, k = np.argwhere(bundles < 0.0)[0]
            raise NegativeQuantity(f"observation {t + 1}: quantity of good {k + 1} is {bundles[t, k]}")
        labels = tuple(str(s) for s in self.labels) or tuple(str(t + 1) for t in range(prices.shape[0]))
        if len(labels) != prices.shape[0]:
            raise DimensionMismatch(f"{len(labels)} labels for {prices.shape[0]} observations")
        prices.setflags(write=False)
        bundles.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "bundles", bundles)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_observations(cls, observations: Iterable[tuple[ArrayLike, ArrayLike]]) -> "Dataset":
        pairs = list(observations)
        if not pairs:
            raise DimensionMismatch("a dataset needs at least one observation")
        lengths = {len(p) for p, _ in pairs} | {len(x) for _, x in pairs}
        if len(lengths) != 1:
            raise DimensionMismatch(f"observations have inconsistent lengths {sorted(lengths)}")
        return cls(np.array([p for p, _ in pairs], float), np.array([x for _, x in pairs], float))

    @property
    def T(self) -> int:
        return self.prices.shape[0]

    @property
    def num_goods(self) -> int:
        return self.prices.shape[1]

    @property
    def observations(self) -> tuple[Observation, ...]:
        return tuple(
            Observation(tuple(map(float, p)), tuple(map(float, x)), lab)
            for p, x, lab in zip(self.prices, self.bundles, self.labels)
        )

    @cached_property
    def expenditure(self) -> "ExpenditureMatrix":
        return expenditure_matrix(self)

    @property
    def own_expenditure(self) -> NDArray[np.float64]:
        return np.diag(self.expenditure.values).copy()

    @property
    def total_expenditure(self) -> float:
        return float(self.own_expenditure.sum())

    def permuted(self, sigma: Sequence[int]) -> "Dataset":
        """The dataset ``(p^t, x^{sigma(t)})``: prices stay put, bundles are reassigned."""
        sigma = _check_permutation(sigma, self.T)
        return Dataset(self.prices.copy(), self.bundles[list(sigma)].copy(), self.labels)

    def reordered(self, order: Sequence[int]) -> "Dataset":
        """Relabel observations: new observation ``i`` is old observation ``order[i]``."""
        order = list(_check_permutation(order, self.T))
        return Dataset(
            self.prices[order].copy(), self.bundles[order].copy(), tuple(self.labels[i] for i in order)
        )

    def with_bundle(self, t: int, bundle: ArrayLike) -> "Dataset":
        bundles = self.bundles.copy()
        bundles[t] = np.asarray(bundle, float)
        return Dataset(self.prices.copy(), bundles, self.labels)

    def scaled_prices(self, factor: float) -> "Dataset":
        return Dataset(self.prices * factor, self.bundles.copy(), self.labels)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.prices).tobytes())
        h.update(np.ascontiguousarray(self.bundles).tobytes())
        return h.hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "observations": [
                {"p": [float(v) for v in p], "x": [float(v) for v in x], "label": lab}
                for p, x, lab in zip(self.prices, self.bundles, self.labels)
            ]
        }

    def __repr__(self) -> str:
        return f"Dataset(T={self.T}, L={self.num_goods})"


@dataclass(frozen=True, eq=False)
class ExpenditureMatrix:
    """``values[t, s] = p^t . x^s``."""

    values: NDArray[np.float64]

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def own(self) -> NDArray[np.float64]:
        return np.diag(self.values).copy()


def expenditure_matrix(d: Dataset) -> ExpenditureMatrix:
    values = ordered_dot(d.prices, d.bundles)
    values.setflags(write=False)
    return ExpenditureMatrix(values)


def _as_matrix(values: ArrayLike, name: str) -> NDArray[np.float64]:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"{name} do not form a rectangular numeric array") from exc
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a T x L array, got ndim={arr.ndim}")
    return arr


def _check_permutation(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError(f"{sigma} is not a permutation of 0..{n - 1}")
    return sigma


# ---------------------------------------------------------------------------
# ingestion


def load_dataset(source: str | Path | bytes | IO, format: str | None = None) -> Dataset:
    """Read a dataset from a path, raw bytes, or an open (text or binary) stream.

    CSV rows hold ``p_1..p_L, x_1..x_L`` with an optional header row. JSON holds
    ``{"observations": [{"p": [...], "x": [...], "label": "..."}]}``. When
    ``format`` is omitted it is taken from the file suffix, else sniffed.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if format is None and path.suffix.lower().lstrip(".") in FORMATS:
            format = path.suffix.lower().lstrip(".")
        raw = path.read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    else:
        raw = source.read()
    if isinstance(raw, str):
        text = raw
    else:
        try:
            text = raw.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise MalformedInput("input is not valid UTF-8") from exc
    if format is None:
        format = "json" if text.lstrip().startswith("{") else "csv"
    if format == "csv":
        return _parse_csv(text)
    if format == "json":
        return _parse_json(text)
    raise MalformedInput(f"unknown format {format!r}; expected one of {FORMATS}")


def _parse_float(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError as exc:
        raise MalformedInput(f"{where}: {cell!r} is not a number") from exc


def _parse_csv(text: str) -> Dataset:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not _numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise MalformedInput("CSV input has no data rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DimensionMismatch(f"row {i + 1} has {len(row)} columns, expected {width}")
    if width % 2 != 0:
        raise DimensionMismatch(f"CSV rows need 2L columns (prices then quantities), got {width}")
    values = np.array(
        [[_parse_float(c.strip(), f"row {i + 1}") for c in row] for i, row in enumerate(rows)]
    )
    half = width // 2
    return Dataset(values[:, :half], values[:, half:])


def _numeric_row(row: list[str]) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def _parse_json(text: str) -> Dataset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    obs = doc.get("observations") if isinstance(doc, dict) else None
    if not isinstance(obs, list) or not obs:
        raise MalformedInput('JSON input needs a non-empty "observations" list')
    prices, bundles, labels = [], [], []
    for i, o in enumerate(obs):
        if not isinstance(o, dict) or "p" not in o or "x" not in o:
            raise MalformedInput(f'observation {i + 1} needs "p" and "x" entries')
        p, x = o["p"], o["x"]
        if not (isinstance(p, list) and isinstance(x, list)):
            raise MalformedInput(f'observation {i + 1}: "p" and "x" must be lists')
        if len(p) != len(x) or (prices and len(p) != len(prices[0])):
            raise DimensionMismatch(f"observation {i + 1} has mismatched lengths")
        try:
            prices.append([float(v) for v in p])
            bundles.append([float(v) for v in x])
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"observation {i + 1} has non-numeric entries") from exc
        labels.append(str(o.get("label", i + 1)))
    return Dataset(np.array(prices), np.array(bundles), tuple(labels))


def dump_dataset(d: Dataset, format: str = "csv") -> str:
    if format == "json":
        return json.dumps(d.to_dict(), indent=2) + "\n"
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    L = d.num_goods
    writer.writerow([f"p{k + 1}" for k in range(L)] + [f"x{k + 1}" for k in range(L)])
    for p, x in zip(d.prices, d.bundles):
        writer.writerow([repr(float(v)) for v in p] + [repr(float(v)) for v in x])
    return buf.getvalue()


FIXTURES = ("fig1a", "fig1b", "example1", "example1_perturbed", "example2")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {FIXTURES}")
    return Path(str(resources.files("pumpkit") / "fixtures" / f"{name}.csv"))


def load_fixture(name: str) -> Dataset:
    """Load one of the bundled example datasets (see ``FIXTURES``)."""
    return load_dataset(fixture_path(name), "csv")
