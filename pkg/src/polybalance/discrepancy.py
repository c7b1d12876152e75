"""Sign solvers for the l-infinity discrepancy of signed vector sums.

Every solver takes an ``n x m`` :class:`SampleMatrix` (one row per vector)
and returns signs ``x`` with small ``max_j |sum_i x_i A[i, j]|``. All of
them are deterministic given their seed, and every reported discrepancy
is recomputed with :func:`discrepancy_of`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BRUTE_FORCE_CAP = 24
SOLVERS = ("brute", "random", "greedy", "pcolor", "komlos")


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """Read-only ``n x m`` matrix of finite reals, rows are the vectors."""

    entries: np.ndarray
    row_inf_norms: np.ndarray = field(init=False, repr=False)
    row_l2_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"sample matrix must be a non-empty 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("sample matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "row_inf_norms", np.max(np.abs(a), axis=1))
        object.__setattr__(self, "row_l2_norms", np.sqrt(np.sum(a * a, axis=1)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def scaled(self, factor: float) -> SampleMatrix:
        return SampleMatrix(self.entries * factor)

    def to_json(self) -> list:
        return self.entries.tolist()

    @classmethod
    def from_json(cls, rows) -> SampleMatrix:
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ValueError("matrix file must be a JSON list of rows")
        if len({len(r) for r in rows}) > 1:
            raise ValueError("matrix rows have different lengths")
        return cls(np.array(rows, dtype=float))


def as_matrix(matrix) -> SampleMatrix:
    return matrix if isinstance(matrix, SampleMatrix) else SampleMatrix(matrix)


def check_signs(signs, n: int | None = None) -> tuple[int, ...]:
    """Validate a sign vector and return it as a tuple of ints."""
    out = tuple(int(s) for s in signs)
    if any(s not in (-1, 1) for s in out):
        raise ValueError("signs must be -1 or +1")
    if n is not None and len(out) != n:
        raise ValueError(f"expected {n} signs, got {len(out)}")
    return out


@dataclass(frozen=True)
class SolverReport:
    solver: str
    seed: int
    signs: tuple[int, ...]
    discrepancy: float
    iterations: int
    flagged: bool = False

    def to_json(self) -> dict:
        return {
            "solver": self.solver,
            "seed": self.seed,
            "signs": list(self.signs),
            "discrepancy": self.discrepancy,
            "iterations": self.iterations,
            "flagged": self.flagged,
        }

    @classmethod
    def from_json(cls, obj: dict) -> SolverReport:
        return cls(
            solver=str(obj["solver"]),
            seed=int(obj["seed"]),
            signs=check_signs(obj["signs"]),
            discrepancy=float(obj["discrepancy"]),
            iterations=int(obj["iterations"]),
            flagged=bool(obj.get("flagged", False)),
        )


def column_sums(matrix, signs) -> np.ndarray:
    """``sum_i signs[i] * A[i]``, accumulated row by row in index order."""
    a = as_matrix(matrix).entries
    col = np.zeros(a.shape[1])
    for s, row in zip(signs, a):
        col = col + s * row
    return col


def discrepancy_of(matrix, signs) -> float:
    """``max_j |sum_i signs[i] * A[i, j]|``."""
    mat = as_matrix(matrix)
    signs = check_signs(signs)
    if len(signs) != mat.n:
        raise ValueError(f"matrix has {mat.n} rows but {len(signs)} signs given")
    return float(np.max(np.abs(column_sums(mat, signs))))


def _report(name, mat, signs, seed, iterations, flagged=False) -> SolverReport:
    signs = check_signs(signs, mat.n)
    return SolverReport(name, int(seed), signs, discrepancy_of(mat, signs), int(iterations), flagged)


def solve_brute(matrix, block: int = 4096) -> SolverReport:
    """Exact minimum over all ``2**n`` sign vectors.

    Ties go to the lexicographically smallest vector with ``+1 < -1``.
    Since ``x`` and ``-x`` score the same, only ``x_0 = +1`` is enumerated.
    Column sums are accumulated in the same order as
    :func:`discrepancy_of`, so the minimum found is bit-exact.
    """
    mat = as_matrix(matrix)
    n = mat.n
    if n > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force is capped at n={BRUTE_FORCE_CAP}, got n={n}")
    a = mat.entries
    total = 1 << (n - 1)
    shifts = np.arange(n - 2, -1, -1)
    best_val, best_idx = math.inf, 0
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total))
        bits = (idx[:, None] >> shifts[None, :]) & 1
        signs = np.concatenate([np.ones((idx.size, 1)), 1.0 - 2.0 * bits], axis=1)
        col = np.zeros((idx.size, mat.m))
        for i in range(n):
            col = col + signs[:, i : i + 1] * a[i]
        vals = np.max(np.abs(col), axis=1)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_idx = float(vals[k]), int(idx[k])
    signs = [1] + [1 - 2 * ((best_idx >> int(s)) & 1) for s in shifts]
    return _report("brute", mat, signs, 0, total)


def solve_random(matrix, seed: int = 0, restarts: int = 50) -> SolverReport:
    """Best of ``restarts`` independent uniform sign vectors."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    mat = as_matrix(matrix)
    rng = np.random.default_rng(seed)
    best, best_val = None, math.inf
    for _ in range(restarts):
        signs = 1 - 2 * rng.integers(0, 2, size=mat.n)
        val = discrepancy_of(mat, signs)
        if val < best_val:
            best, best_val = signs, val
    return _report("random", mat, best, seed, restarts)


def default_beta(matrix) -> float:
    mat = as_matrix(matrix)
    return math.sqrt(2.0 * math.log(2 * mat.m) / mat.n)


def potential_bound(matrix, beta: float) -> float:
    """Guarantee of the cosh-potential method, ``ln(2m)/beta + beta/2 sum_i r_i^2``.

    ``r_i`` is the l-infinity norm of row ``i``; for rows bounded by one
    this is at most ``ln(2m)/beta + beta n / 2``.
    """
    mat = as_matrix(matrix)
    return math.log(2 * mat.m) / beta + 0.5 * beta * float(np.sum(mat.row_inf_norms**2))


def _log_potential(col: np.ndarray, beta: float) -> float:
    # log sum_j cosh(beta col_j) without overflow
    t = np.abs(beta * col)
    return float(np.logaddexp.reduce(t + np.log1p(np.exp(-2.0 * t)) - math.log(2.0)))


def solve_greedy_potential(matrix, beta: float | None = None) -> SolverReport:
    """Fix signs row by row, each minimising ``sum_j cosh(beta * partial_j)``.

    Raises
    ------
    RuntimeError
        If the result breaks :func:`potential_bound`; that would be a bug,
        since the bound holds for every input.
    """
    mat = as_matrix(matrix)
    if beta is None:
        beta = default_beta(mat)
    if beta <= 0:
        raise ValueError("beta must be positive")
    col = np.zeros(mat.m)
    signs = []
    for row in mat.entries:
        plus, minus = col + row, col - row
        if _log_potential(plus, beta) <= _log_potential(minus, beta):
            signs.append(1)
            col = plus
        else:
            signs.append(-1)
            col = minus
    report = _report("greedy", mat, signs, 0, mat.n)
    bound = potential_bound(mat, beta)
    if report.discrepancy > bound:
        raise RuntimeError(f"potential bound violated: {report.discrepancy} > {bound}")
    return report


def local_search(matrix, signs) -> tuple[tuple[int, ...], int]:
    """Improve a coloring by single and pair sign flips until none helps.

    Each round picks the best flip of one or two signs by an incremental
    estimate (first index wins ties) and keeps it only if the recomputed
    discrepancy strictly drops. The objective is then a fixed function of
    the signs that decreases every move, so the descent terminates.
    Returns the signs and the number of moves.
    """
    mat = as_matrix(matrix)
    a = mat.entries
    s = np.array(check_signs(signs, mat.n), dtype=float)
    moves = 0
    col = column_sums(mat, s)
    cur = float(np.max(np.abs(col)))
    while True:
        delta = 2.0 * s[:, None] * a
        single = np.max(np.abs(col[None, :] - delta), axis=1)
        best, flip = float(single.min()), (int(np.argmin(single)),)
        for i in range(mat.n - 1):
            pair = np.max(np.abs((col - delta[i])[None, :] - delta[i + 1 :]), axis=1)
            j = int(np.argmin(pair))
            if pair[j] < best:
                best, flip = float(pair[j]), (i, i + 1 + j)
        if not best < cur:
            return check_signs(s), moves
        trial = s.copy()
        trial[list(flip)] *= -1
        trial_col = column_sums(mat, trial)
        trial_val = float(np.max(np.abs(trial_col)))
        # the estimate can round below cur, e.g. when a pair flip negates everything
        if not trial_val < cur:
            return check_signs(s), moves
        s, col, cur = trial, trial_col, trial_val
        moves += 1


@dataclass(frozen=True)
class PCParams:
    """Constants of the partial-coloring walk; None picks the default.

    step_size
        Walk increment ``gamma``; default ``sqrt(8 / max_steps)``.
    max_steps
        Step budget per phase; default ``ceil(64 n ln(2m))``.
    phase_cap_multiplier
        ``K`` in the per-phase cap ``K sqrt(n_t ln(2m / n_t))`` on the
        change of each column sum, ``n_t`` being the live variables.
    freeze_threshold
        ``|x_i|`` at which a variable stops moving; default ``1 - 1/(8n)``.
    cap_growth
        Factor applied to the phase cap when tight columns and frozen
        variables leave no direction to move in.
    polish
        Finish with :func:`local_search` on the rounded coloring.
    """

    step_size: float | None = None
    max_steps: int | None = None
    phase_cap_multiplier: float = 1.0
    freeze_threshold: float | None = None
    cap_growth: float = 1.25
    polish: bool = True

    def resolved(self, n: int, m: int) -> PCParams:
        if self.step_size is not None and not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not self.phase_cap_multiplier > 0 or not self.cap_growth > 1:
            raise ValueError("phase_cap_multiplier must be > 0 and cap_growth > 1")
        if self.freeze_threshold is not None and not 0 < self.freeze_threshold <= 1:
            raise ValueError("freeze_threshold must lie in (0, 1]")
        max_steps = self.max_steps or math.ceil(64 * n * math.log(2 * m))
        return PCParams(
            step_size=self.step_size or math.sqrt(8.0 / max_steps),
            max_steps=max_steps,
            phase_cap_multiplier=self.phase_cap_multiplier,
            freeze_threshold=self.freeze_threshold or 1.0 - 1.0 / (8 * n),
            cap_growth=self.cap_growth,
            polish=self.polish,
        )

    def to_json(self) -> dict:
        return {
            "step_size": self.step_size,
            "max_steps": self.max_steps,
            "phase_cap_multiplier": self.phase_cap_multiplier,
            "freeze_threshold": self.freeze_threshold,
            "cap_growth": self.cap_growth,
            "polish": self.polish,
        }


def _orthonormal_basis(cols: np.ndarray) -> np.ndarray:
    if cols.shape[1] == 0:
        return cols
    q, _ = np.linalg.qr(cols)
    return q


def solve_partial_coloring(matrix, params: PCParams | None = None, seed: int = 0) -> SolverReport:
    """Full coloring by repeated partial coloring with a constrained random walk.

    Each phase starts from the current fractional point and takes Gaussian
    steps projected away from frozen variables and from columns whose sum
    has moved by the phase cap. The phase ends once half of the variables
    that were live at its start are frozen; the next phase works on the
    rest with a smaller cap. Frozen variables are rounded to the nearest
    sign at the end.

    If a phase exhausts ``max_steps`` the remaining variables are rounded
    by sign and the report is flagged.
    """
    mat = as_matrix(matrix)
    p = (params or PCParams()).resolved(mat.n, mat.m)
    a = mat.entries
    n, m = mat.n, mat.m
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    frozen = np.zeros(n, dtype=bool)
    flagged = False
    total_steps = 0
    while not frozen.all() and not flagged:
        n_live = int(np.count_nonzero(~frozen))
        goal = math.ceil(n_live / 2)
        cap = p.phase_cap_multiplier * math.sqrt(n_live * math.log(2 * m / n_live))
        drift = np.zeros(m)
        tight = np.zeros(m, dtype=bool)
        newly, steps = 0, 0
        dirty = True
        while newly < goal:
            if steps >= p.max_steps:
                flagged = True
                break
            if dirty:
                live = np.flatnonzero(~frozen)
                basis = _orthonormal_basis(a[np.ix_(live, np.flatnonzero(tight))])
                dirty = False
                if basis.shape[1] >= live.size:
                    cap *= p.cap_growth
                    tight = np.abs(drift) >= cap
                    dirty = True
                    continue
            g = rng.standard_normal(live.size)
            if basis.shape[1]:
                g = g - basis @ (basis.T @ g)
            old = x[live]
            new = np.clip(old + p.step_size * g, -1.0, 1.0)
            x[live] = new
            drift = drift + (new - old) @ a[live]
            steps += 1
            hit = np.abs(new) >= p.freeze_threshold
            if hit.any():
                frozen[live[hit]] = True
                newly += int(np.count_nonzero(hit))
                dirty = True
            over = (np.abs(drift) >= cap) & ~tight
            if over.any():
                tight |= over
                dirty = True
        total_steps += steps
    signs = np.where(x >= 0, 1, -1)
    if p.polish:
        signs, moves = local_search(mat, signs)
        total_steps += moves
    return _report("pcolor", mat, signs, seed, total_steps, flagged)


def solve_komlos_walk(matrix, seed: int = 0, polish: bool = True) -> SolverReport:
    """Gram-Schmidt walk over the rows.

    The pivot is the largest live index. Each step moves along the
    direction that keeps the pivot coefficient 1 and the combination of
    live rows as short as possible, by a random signed length chosen so
    the move is a martingale, until some coordinate reaches +-1. With
    ``polish`` the result is finished by :func:`local_search`.
    """
    mat = as_matrix(matrix)
    v = mat.entries
    n = mat.n
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    live = np.ones(n, dtype=bool)
    pivot = n - 1
    steps = 0
    while live.any():
        if not live[pivot]:
            pivot = int(np.flatnonzero(live)[-1])
        others = np.flatnonzero(live)
        others = others[others != pivot]
        u = np.zeros(n)
        u[pivot] = 1.0
        if others.size:
            coef, *_ = np.linalg.lstsq(v[others].T, -v[pivot], rcond=None)
            u[others] = coef
        moving = np.flatnonzero(live & (u != 0.0))
        um, xm = u[moving], x[moving]
        up = np.min(np.where(um > 0, (1 - xm) / um, (-1 - xm) / um))
        down = np.min(np.where(um > 0, (1 + xm) / um, (1 - xm) / -um))
        if rng.random() < down / (up + down):
            x = x + up * u
        else:
            x = x - down * u
        done = live & (np.abs(x) >= 1.0 - 1e-9)
        x[done] = np.sign(x[done])
        live &= ~done
        steps += 1
    signs = np.where(x >= 0, 1, -1)
    if polish:
        signs, moves = local_search(mat, signs)
        steps += moves
    return _report("komlos", mat, signs, seed, steps)


def solve(matrix, solver: str, seed: int = 0, restarts: int = 50, params: PCParams | None = None) -> SolverReport:
    """Dispatch on a registered solver name (see ``SOLVERS``)."""
    if solver == "brute":
        return solve_brute(matrix)
    if solver == "random":
        return solve_random(matrix, seed=seed, restarts=restarts)
    if solver == "greedy":
        return solve_greedy_potential(matrix)
    if solver == "pcolor":
        return solve_partial_coloring(matrix, params, seed=seed)
    if solver == "komlos":
        return solve_komlos_walk(matrix, seed=seed)
    raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
