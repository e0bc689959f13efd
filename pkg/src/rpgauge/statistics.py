"""Market statistics: ingestion, validation and the cross-expenditure matrix.

Observations are stored 0-based internally. The CSV ``t`` column and every
index that is serialized for humans (witness cycles) are 1-based.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import IO, Union

import numpy as np


class StatisticsError(ValueError):
    """Raised when market statistics are malformed or violate an invariant."""


@dataclass(frozen=True)
class MarketStatistics:
    """Observed price/quantity pairs ``{p^t, q^t}``, ``t = 1..T``.

    Attributes:
        prices: ``(T, n)`` array, row ``t`` is the price vector ``p^t``.
        quantities: ``(T, n)`` array, row ``t`` is the purchased bundle ``q^t``.
    """

    prices: np.ndarray
    quantities: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.prices, dtype=np.float64)
        q = np.array(self.quantities, dtype=np.float64)
        if p.ndim != 2 or q.ndim != 2:
            raise StatisticsError("prices and quantities must be 2-D (T x n)")
        if p.shape != q.shape:
            raise StatisticsError(
                f"dimension mismatch: prices {p.shape} vs quantities {q.shape}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise StatisticsError("need T >= 1 observations and n >= 1 goods")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise StatisticsError("non-finite coordinate")
        if np.any(p < 0) or np.any(q < 0):
            raise StatisticsError("negative coordinate")
        own = np.array([_dot(p[t], q[t]) for t in range(p.shape[0])])
        bad = np.flatnonzero(own <= 0)
        if bad.size:
            raise StatisticsError(
                f"zero expenditure at observation t={int(bad[0]) + 1}")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "prices", p)
        object.__setattr__(self, "quantities", q)

    @property
    def T(self) -> int:
        return self.prices.shape[0]

    @property
    def n(self) -> int:
        return self.prices.shape[1]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "observations": [
                {"p": self.prices[t].tolist(), "q": self.quantities[t].tolist()}
                for t in range(self.T)
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t"] + [f"p{i + 1}" for i in range(self.n)]
                        + [f"q{i + 1}" for i in range(self.n)])
        for t in range(self.T):
            writer.writerow([t + 1] + [repr(float(v)) for v in self.prices[t]]
                            + [repr(float(v)) for v in self.quantities[t]])
        return buf.getvalue()


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    # accumulate in order of increasing index so results are reproducible
    s = 0.0
    for x, y in zip(a.tolist(), b.tolist()):
        s += x * y
    return s


def cross_matrix(S: MarketStatistics) -> np.ndarray:
    """Return ``A`` with ``A[t, tau] = p^t . q^tau``.

    Dot products are accumulated sequentially over goods, so the matrix is
    bit-for-bit reproducible across platforms and BLAS builds.
    """
    P, Q = S.prices, S.quantities
    A = np.zeros((S.T, S.T))
    for k in range(S.n):
        A += np.outer(P[:, k], Q[:, k])
    A.setflags(write=False)
    return A


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise StatisticsError(f"malformed record: {where}: {text!r} is not a number")


def _from_csv(text: str) -> MarketStatistics:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise StatisticsError("malformed record: empty CSV")
    header = [c.strip() for c in rows[0]]
    if not header or header[0] != "t" or (len(header) - 1) % 2 or len(header) < 3:
        raise StatisticsError("malformed record: header must be t,p1..pn,q1..qn")
    n = (len(header) - 1) // 2
    expected = ["t"] + [f"p{i + 1}" for i in range(n)] + [f"q{i + 1}" for i in range(n)]
    if header != expected:
        raise StatisticsError(
            f"malformed record: header {header} != {expected}")
    prices, quantities = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise StatisticsError(
                f"dimension mismatch on line {lineno}: {len(row)} fields, "
                f"expected {len(header)}")
        vals = [_parse_float(c.strip(), f"line {lineno}") for c in row[1:]]
        prices.append(vals[:n])
        quantities.append(vals[n:])
    if not prices:
        raise StatisticsError("malformed record: no observations")
    return MarketStatistics(np.array(prices), np.array(quantities))


def _from_json(text: str) -> MarketStatistics:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StatisticsError(f"malformed record: {exc}") from None
    if not isinstance(doc, dict) or "observations" not in doc:
        raise StatisticsError("malformed record: expected {'n':..., 'observations': [...]}")
    obs = doc["observations"]
    if not isinstance(obs, list) or not obs:
        raise StatisticsError("malformed record: no observations")
    n = doc.get("n")
    prices, quantities = [], []
    for t, o in enumerate(obs, start=1):
        try:
            p = [_parse_float(v, f"observation {t}") for v in o["p"]]
            q = [_parse_float(v, f"observation {t}") for v in o["q"]]
        except (KeyError, TypeError):
            raise StatisticsError(f"malformed record: observation {t} needs 'p' and 'q'")
        if n is None:
            n = len(p)
        if len(p) != n or len(q) != n:
            raise StatisticsError(
                f"dimension mismatch at observation {t}: expected n={n}")
        prices.append(p)
        quantities.append(q)
    return MarketStatistics(np.array(prices), np.array(quantities))


def parse_statistics(source: Union[str, bytes, IO], format: str = "csv") -> MarketStatistics:
    """Parse market statistics from a CSV or JSON byte/text stream.

    CSV: header ``t,p1..pn,q1..qn`` and one row per observation.
    JSON: ``{"n": int, "observations": [{"p": [...], "q": [...]}, ...]}``.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    fmt = format.lower()
    if fmt == "csv":
        return _from_csv(source)
    if fmt == "json":
        return _from_json(source)
    raise StatisticsError(f"unknown format {format!r}; use csv or json")


def load_statistics(path: str) -> MarketStatistics:
    """Read statistics from ``path``; the format follows the file extension."""
    fmt = "json" if str(path).lower().endswith(".json") else "csv"
    with open(path, "rb") as fh:
        return parse_statistics(fh, fmt)
