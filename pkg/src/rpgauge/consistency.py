"""Homogeneous strong axiom checks and Afriat multiplier systems.

Taking logarithms ``x_t = log lambda_t`` turns the multiplicative system

    lambda_t A[t, t] <= lambda_tau A[tau, t]

into difference constraints ``x_t - x_tau <= w(tau -> t)`` with
``w(tau -> t) = log A[tau, t] - log A[t, t]``. Feasibility is the absence of
negative cycles in that digraph, and the whole theory reduces to shortest
paths: Bellman-Ford for a solution, Karp for the minimum mean cycle,
Floyd-Warshall for the minimum cycle weight.

Indices are 0-based here; ``AxiomVerdict.to_json`` emits 1-based witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# cycle weights within this distance of zero count as zero
MARGIN_TOL = 1e-12
# above this size the margin of an inconsistent instance is only an upper bound
EXHAUSTIVE_LIMIT = 8

WEAK, STRICT = "weak", "strict"
LAMBDA, MU = "lambda", "mu"


def _check_mode(mode: str) -> None:
    if mode not in (WEAK, STRICT):
        raise ValueError(f"mode must be 'weak' or 'strict', got {mode!r}")


def _check_kind(kind: str) -> None:
    if kind not in (LAMBDA, MU):
        raise ValueError(f"kind must be 'lambda' or 'mu', got {kind!r}")


@dataclass(frozen=True)
class AxiomVerdict:
    """Outcome of the cycle-product test.

    ``margin`` is the minimum over simple cycles of length >= 2 of the log
    cycle product (``+inf`` when no such cycle exists, ``-inf`` when a zero
    cross expenditure makes the system infeasible outright).
    """

    mode: str
    consistent: bool
    witness_cycle: Optional[tuple[int, ...]] = None
    cycle_log_margin: float = math.inf
    margin_exact: bool = True
    zero_cross: bool = False
    min_mean: Optional[float] = None

    def to_json(self) -> dict:
        margin = self.cycle_log_margin
        doc = {
            "mode": self.mode,
            "consistent": self.consistent,
            "witness": None if self.witness_cycle is None
            else [t + 1 for t in self.witness_cycle],
            "margin": margin if math.isfinite(margin) else None,
            "margin_exact": self.margin_exact,
        }
        if self.zero_cross:
            doc["note"] = "zero cross expenditure"
        elif not math.isfinite(margin):
            doc["note"] = "no cycles (T = 1)"
        return doc


@dataclass(frozen=True)
class Multipliers:
    """Positive solution of the lambda system (or the mu system, ``kind='mu'``)."""

    values: np.ndarray
    mode: str = WEAK
    kind: str = LAMBDA

    def to_json(self) -> dict:
        return {"mode": self.mode, "kind": self.kind, "consistent": True,
                self.kind: [float(v) for v in self.values]}


class InfeasibleError(Exception):
    """The requested multiplier system has no positive solution."""

    def __init__(self, verdict: AxiomVerdict, kind: str = LAMBDA):
        self.verdict = verdict
        self.kind = kind
        super().__init__(
            f"{verdict.mode} {kind} system infeasible; witness cycle "
            f"{None if verdict.witness_cycle is None else [t + 1 for t in verdict.witness_cycle]}")


def log_weights(A: np.ndarray) -> np.ndarray:
    """Edge weights ``W[tau, t] = log A[tau, t] - log A[t, t]`` (NaN on the diagonal).

    Zero cross expenditures give ``-inf``.
    """
    A = np.asarray(A, dtype=float)
    with np.errstate(divide="ignore"):
        logA = np.log(A)
    W = logA - np.diag(logA)[None, :]
    np.fill_diagonal(W, np.nan)
    return W


def role_matrix(A: np.ndarray, kind: str) -> np.ndarray:
    """Matrix whose lambda-type system is the requested one (``A.T`` for mu)."""
    _check_kind(kind)
    A = np.asarray(A, dtype=float)
    return A if kind == LAMBDA else A.T


def cycle_product(A: np.ndarray, cycle: Sequence[int]) -> float:
    """Ratio of cross terms to own terms along ``cycle`` (0-based indices).

    For the cycle ``(t1, ..., tk)`` this is
    ``prod A[t_i, t_{i+1}] / prod A[t_i, t_i]`` with ``t_{k+1} = t1``.
    """
    if len(cycle) == 0:
        raise ValueError("empty cycle")
    A = np.asarray(A, dtype=float)
    num = den = 1.0
    k = len(cycle)
    for i in range(k):
        num *= A[cycle[i], cycle[(i + 1) % k]]
        den *= A[cycle[i], cycle[i]]
    return num / den


def karp_min_mean_cycle(W: np.ndarray) -> float:
    """Minimum mean weight over cycles of the complete digraph ``W`` (no self loops).

    ``W[u, v]`` is the weight of edge ``u -> v``; NaN entries are absent edges.
    Returns ``inf`` for graphs with fewer than two nodes.
    """
    n = W.shape[0]
    if n < 2:
        return math.inf
    Wm = np.where(np.isnan(W), np.inf, W)
    D = np.full((n + 1, n), np.inf)
    D[0] = 0.0
    for k in range(1, n + 1):
        D[k] = np.min(D[k - 1][:, None] + Wm, axis=0)
    best = math.inf
    for v in range(n):
        if not math.isfinite(D[n, v]):
            continue
        worst = -math.inf
        for k in range(n):
            if math.isfinite(D[k, v]):
                worst = max(worst, (D[n, v] - D[k, v]) / (n - k))
        best = min(best, worst)
    return best


def _shortest_from_virtual_source(W: np.ndarray) -> np.ndarray:
    """Bellman-Ford distances from a source joined to every node by a 0-edge.

    ``W[u, v]`` is the weight of ``u -> v``; NaN entries are absent edges.
    """
    n = W.shape[0]
    Wm = np.where(np.isnan(W), np.inf, W)
    dist = np.zeros(n)
    for _ in range(n):
        new = np.minimum(dist, np.min(dist[:, None] + Wm, axis=0))
        if np.array_equal(new, dist):
            break
        dist = new
    return dist


def _min_cycle_weight_nonneg(W: np.ndarray) -> float:
    """Minimum simple-cycle weight by Floyd-Warshall; valid without negative cycles."""
    n = W.shape[0]
    D = np.where(np.isnan(W), np.inf, W).copy()
    for k in range(n):
        D = np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :])
    return float(np.min(np.diag(D)))


def _enumerate_min_cycle_weight(W: np.ndarray) -> float:
    """Exhaustive minimum over simple cycles (length >= 2) by depth-first search."""
    n = W.shape[0]
    best = math.inf

    def dfs(start: int, u: int, acc: float, visited: list[bool]) -> None:
        nonlocal best
        for v in range(start, n):
            if v == u:
                continue
            if v == start:
                best = min(best, acc + W[u, v])
            elif not visited[v]:
                visited[v] = True
                dfs(start, v, acc + W[u, v], visited)
                visited[v] = False

    for s in range(n):
        visited = [False] * n
        visited[s] = True
        dfs(s, s, 0.0, visited)
    return best


def _lex_smallest_tight_cycle(W: np.ndarray, mean: float, tol: float) -> tuple[int, ...]:
    """Lexicographically smallest cycle (rotated to start at its minimum) of mean ``mean``.

    With ``W' = W - mean`` there are no negative cycles; a potential ``pi``
    from Bellman-Ford makes reduced costs nonnegative, and the cycles of mean
    ``mean`` are exactly the cycles of zero reduced cost.
    """
    n = W.shape[0]
    Wp = W - mean
    pi = _shortest_from_virtual_source(Wp)
    reduced = Wp + pi[:, None] - pi[None, :]
    scale = 1.0 + np.nanmax(np.abs(W))
    tight = np.nan_to_num(reduced, nan=np.inf) <= tol * scale
    np.fill_diagonal(tight, False)

    def reaches(src: int, dst: int, blocked: set[int]) -> bool:
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(tight[u]):
                v = int(v)
                if v == dst:
                    return True
                if v not in seen and v not in blocked:
                    seen.add(v)
                    stack.append(v)
        return False

    for s in range(n):
        if not reaches(s, s, set()):
            continue
        path, visited, u = [s], {s}, s
        while True:
            if tight[u, s] and len(path) >= 2:
                return tuple(path)
            for v in range(n):
                if tight[u, v] and v not in visited and reaches(v, s, visited):
                    break
            else:  # pragma: no cover - guarded by the reachability invariant
                raise RuntimeError("tight subgraph lost its cycle")
            path.append(v)
            visited.add(v)
            u = v
    raise RuntimeError("no tight cycle found")  # pragma: no cover


def check_axiom(A: np.ndarray, mode: str = WEAK) -> AxiomVerdict:
    """Test the homogeneous strong axiom on the cross matrix ``A``.

    weak: every cycle product is >= 1; strict: every cycle product of a cycle
    of length >= 2 is > 1. Margins within ``MARGIN_TOL`` of zero count as
    weakly but not strictly consistent. An inconsistent verdict carries the
    lexicographically smallest minimum-mean cycle as witness.
    """
    _check_mode(mode)
    A = np.asarray(A, dtype=float)
    T = A.shape[0]
    if A.shape != (T, T) or np.any(np.diag(A) <= 0):
        raise ValueError("cross matrix must be square with positive diagonal")
    if T == 1:
        return AxiomVerdict(mode, True)

    off = ~np.eye(T, dtype=bool)
    zero = (A <= 0) & off
    if zero.any():
        # lambda_t A[t,t] <= lambda_tau * 0 has no positive solution
        tau, t = map(int, np.argwhere(zero)[0])
        return AxiomVerdict(mode, False, (min(t, tau), max(t, tau)), -math.inf,
                            zero_cross=True, min_mean=-math.inf)

    W = log_weights(A)
    mean = karp_min_mean_cycle(W)
    exact = True
    if mean >= -MARGIN_TOL:
        margin = _min_cycle_weight_nonneg(W)
    elif T <= EXHAUSTIVE_LIMIT:
        margin = _enumerate_min_cycle_weight(W)
    else:
        margin, exact = None, False

    witness = None
    weak_ok = margin is not None and margin >= -MARGIN_TOL
    consistent = weak_ok if mode == WEAK else (margin is not None and margin > MARGIN_TOL)
    if not consistent:
        witness = _lex_smallest_tight_cycle(W, mean, 1e-10)
        if margin is None:
            margin = float(np.log(cycle_product(A, witness)))
    return AxiomVerdict(mode, bool(consistent), witness, float(margin), exact,
                        min_mean=float(mean))


def solve_multipliers(A: np.ndarray, mode: str = WEAK, kind: str = LAMBDA) -> Multipliers:
    """Positive Afriat multipliers for the lambda (or mu) system.

    Raises :class:`InfeasibleError` exactly when :func:`check_axiom` is
    inconsistent in the same mode. Strict mode lowers every edge weight by
    ``margin / (2T)``, so each cycle keeps at least half its margin and the
    shortest-path solution satisfies every off-diagonal inequality strictly.
    The returned values are scaled so that the largest equals 1.
    """
    _check_mode(mode)
    B = role_matrix(A, kind)
    T = B.shape[0]
    verdict = check_axiom(B, mode)
    if not verdict.consistent:
        raise InfeasibleError(verdict, kind)
    if T == 1:
        return Multipliers(np.ones(1), mode, kind)
    W = log_weights(B)
    if mode == STRICT:
        W = W - verdict.cycle_log_margin / (2 * T)
    # x_t <= x_tau + W[tau, t]  <=>  edge tau -> t of weight W[tau, t]
    x = _shortest_from_virtual_source(W)
    lam = np.exp(x - x.max())
    return Multipliers(lam, mode, kind)


@dataclass(frozen=True)
class SolutionCheck:
    ok: bool
    slack: float
    worst: Optional[tuple[int, int]] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_solution(A: np.ndarray, m: Multipliers, rtol: float = 1e-12) -> SolutionCheck:
    """Check every inequality of the system declared by ``m``.

    ``slack`` is ``min lambda_tau A[tau, t] - lambda_t A[t, t]`` over all pairs
    (weak) or over ``tau != t`` (strict; ``inf`` when ``T = 1``). Weak mode
    forgives violations below ``rtol`` relative to ``lambda_t A[t, t]``.
    """
    lam = np.asarray(m.values, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("multipliers must be positive")
    B = role_matrix(A, m.kind)
    T = B.shape[0]
    own = lam * np.diag(B)                 # lambda_t A[t,t]
    cross = lam[:, None] * B               # [tau, t] -> lambda_tau A[tau,t]
    S = cross - own[None, :]
    mask = np.ones((T, T), dtype=bool)
    if m.mode == STRICT:
        np.fill_diagonal(mask, False)
    if not mask.any():
        return SolutionCheck(True, math.inf)
    Sm = np.where(mask, S, np.inf)
    tau, t = np.unravel_index(np.argmin(Sm), Sm.shape)
    slack = float(Sm[tau, t])
    if m.mode == STRICT:
        ok = bool(np.all(Sm > 0))
    else:
        ok = bool(np.all(Sm >= -rtol * own[None, :]))
    return SolutionCheck(ok, slack, (int(t), int(tau)))
