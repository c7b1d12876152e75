"""Sample, solve, certify: balancing polynomials with signs.

Three entry points share one shape. Polynomials are sampled on an angle
grid, a discrepancy solver picks signs for the sample vectors, and the
grid maximum of the signed sum is turned into a certified bound on its
Chebyshev norm.

* :func:`balance_sup` takes polynomials of norm at most 1 and degree at
  most n, on ``M n`` extrema angles. With ``M = 9`` the target is
  ``30 sqrt(n)``.
* :func:`balance_l2` takes polynomials of degree below n with unit
  ``int_0^pi p(cos t)^2 dt``, on the ``9n`` roots of ``T_{9n}``.
* :func:`balance_degree_d` takes degree up to ``d >= n``, on ``9d``
  extrema angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cheb_core import ChebPoly, l1_bound, poly_from_json, random_unit_poly, signed_sum
from .discrepancy import PCParams, SolverReport, check_signs, discrepancy_of, solve
from .grids import Grid, extrema_grid, l2_theta_norm_sq, roots_grid, sample_matrix
from .sup_norm import (
    DEFAULT_DENSE_POINTS,
    SupCertificate,
    certified_sup,
    certify_grid_max,
    dense_sup_estimate,
    grid_max,
    grid_factor,
)

SPENCER_CONSTANT = 6.0
#: Slack for an exactly normalised input whose computed L2 mass rounds above 1.
L2_ROUNDING_SLACK = 1e-12
#: Relative slack on the row-norm identity for unit-L2 inputs.
ROW_NORM_SLACK = 1e-9
VERIFY_RTOL = 1e-12


class HypothesisViolation(ValueError):
    """Input polynomials do not satisfy the balancing hypotheses."""


@dataclass(frozen=True)
class BalanceResult:
    mode: str  # "sup", "l2" or "degree_d"
    signs: tuple[int, ...]
    grid_discrepancy: float
    certificate: SupCertificate
    theoretical_bound: float
    measured_constant: float
    n: int
    d: int
    m: int
    solver_report: SolverReport
    spencer_constant: float | None
    row_scale: float = 1.0
    dense_points: int = DEFAULT_DENSE_POINTS

    @property
    def grid_factor(self) -> float:
        return self.certificate.factor

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "signs": list(self.signs),
            "grid_discrepancy": self.grid_discrepancy,
            "certificate": self.certificate.to_json(),
            "grid_factor": self.grid_factor,
            "spencer_constant": self.spencer_constant,
            "theoretical_bound": self.theoretical_bound,
            "measured_constant": self.measured_constant,
            "row_scale": self.row_scale,
            "dense_points": self.dense_points,
            "solver_report": self.solver_report.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> BalanceResult:
        try:
            return cls(
                mode=str(obj["mode"]),
                signs=check_signs(obj["signs"]),
                grid_discrepancy=float(obj["grid_discrepancy"]),
                certificate=SupCertificate.from_json(obj["certificate"]),
                theoretical_bound=float(obj["theoretical_bound"]),
                measured_constant=float(obj["measured_constant"]),
                n=int(obj["n"]),
                d=int(obj["d"]),
                m=int(obj["m"]),
                solver_report=SolverReport.from_json(obj["solver_report"]),
                spencer_constant=None if obj.get("spencer_constant") is None else float(obj["spencer_constant"]),
                row_scale=float(obj.get("row_scale", 1.0)),
                dense_points=int(obj.get("dense_points", DEFAULT_DENSE_POINTS)),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed result file: {exc}") from exc


def unit_norm_bound(p: ChebPoly) -> float:
    """Best certified upper bound on ``||p||_inf`` available cheaply.

    The smaller of the coefficient l1 norm (exact for ``T_k``) and the
    9-point-per-degree grid certificate.
    """
    deg = max(p.degree, 1)
    grid_bound = certified_sup(p, deg, extrema_grid(deg, 9), dense_points=None).certified_bound
    return min(l1_bound(p), grid_bound)


def _check_sup_inputs(polys: Sequence[ChebPoly], degree_bound: int):
    if not polys:
        raise HypothesisViolation("need at least one polynomial")
    for i, p in enumerate(polys):
        if p.degree > degree_bound:
            raise HypothesisViolation(f"polynomial {i}: degree {p.degree} exceeds bound {degree_bound}")
        bound = unit_norm_bound(p)
        if bound > 1.0:
            raise HypothesisViolation(
                f"polynomial {i}: ||p||_inf <= 1 not certified (best certified bound {bound:.6g})"
            )


def _run(polys, grid, degree_bound, solver, seed, restarts, params, dense_points, scale=1.0):
    mat = sample_matrix(polys, grid, n=degree_bound)
    report = solve(mat.scaled(scale) if scale != 1.0 else mat, solver, seed=seed, restarts=restarts, params=params)
    grid_disc = discrepancy_of(mat, report.signs)
    q = signed_sum(polys, report.signs)
    dense = dense_sup_estimate(q, dense_points)
    cert = certify_grid_max(grid_disc, degree_bound, grid, dense)
    return mat, report, grid_disc, cert


def balance_sup(
    polys: Sequence[ChebPoly],
    solver: str = "greedy",
    M: int = 9,
    seed: int = 0,
    restarts: int = 50,
    params: PCParams | None = None,
    dense_points: int = DEFAULT_DENSE_POINTS,
) -> BalanceResult:
    """Signs for ``n`` polynomials with ``||p_i||_inf <= 1`` and degree ``<= n``.

    The certified bound on the signed sum is ``factor * grid discrepancy``;
    the reported theoretical bound is ``factor * 6 * sqrt(M n)``, i.e.
    ``30 sqrt(n)`` for ``M = 9``.
    """
    n = len(polys)
    _check_sup_inputs(polys, n)
    grid = extrema_grid(n, M)
    _, report, grid_disc, cert = _run(polys, grid, n, solver, seed, restarts, params, dense_points)
    theoretical = cert.factor * SPENCER_CONSTANT * math.sqrt(M * n)
    return BalanceResult(
        mode="sup", signs=report.signs, grid_discrepancy=grid_disc, certificate=cert,
        theoretical_bound=theoretical, measured_constant=cert.certified_bound / math.sqrt(n),
        n=n, d=n, m=grid.m, solver_report=report, spencer_constant=SPENCER_CONSTANT,
        dense_points=dense_points,
    )


def balance_degree_d(
    polys: Sequence[ChebPoly],
    d: int,
    solver: str = "greedy",
    seed: int = 0,
    restarts: int = 50,
    params: PCParams | None = None,
    dense_points: int = DEFAULT_DENSE_POINTS,
) -> BalanceResult:
    """Like :func:`balance_sup` for degrees up to ``d >= n``, on ``9d`` angles.

    The measured constant is ``certified_bound / sqrt(n ln(18 d / n))``.
    """
    n = len(polys)
    if d < n:
        raise HypothesisViolation(f"degree bound d={d} must be at least n={n}")
    _check_sup_inputs(polys, d)
    grid = extrema_grid(d, 9)
    _, report, grid_disc, cert = _run(polys, grid, d, solver, seed, restarts, params, dense_points)
    scale = math.sqrt(n * math.log(2 * grid.m / n))
    measured = cert.certified_bound / scale
    return BalanceResult(
        mode="degree_d", signs=report.signs, grid_discrepancy=grid_disc, certificate=cert,
        theoretical_bound=measured * scale, measured_constant=measured,
        n=n, d=d, m=grid.m, solver_report=report, spencer_constant=SPENCER_CONSTANT,
        dense_points=dense_points,
    )


def balance_l2(
    polys: Sequence[ChebPoly],
    solver: str = "komlos",
    seed: int = 0,
    restarts: int = 50,
    params: PCParams | None = None,
    dense_points: int = DEFAULT_DENSE_POINTS,
) -> BalanceResult:
    """Signs for ``n`` polynomials of degree ``< n`` and unit L2 mass in angle space.

    Rows sampled on the ``9n`` roots of ``T_{9n}`` have l2 norm at most
    ``sqrt(9n/pi)`` (quadrature is exact for ``p^2``). They are rescaled
    to unit l2 for the solver. The constant ``C`` of a Komlos-type bound
    is measured as ``grid discrepancy / sqrt(9n/pi)``, and the reported
    bound is ``3 C sqrt(n)``.
    """
    n = len(polys)
    if n < 1:
        raise HypothesisViolation("need at least one polynomial")
    for i, p in enumerate(polys):
        if p.degree >= n:
            raise HypothesisViolation(f"polynomial {i}: degree {p.degree} must be below n={n}")
        mass = l2_theta_norm_sq(p)
        if mass > 1.0 + L2_ROUNDING_SLACK:
            raise HypothesisViolation(f"polynomial {i}: int_0^pi p(cos t)^2 dt = {mass:.12g} exceeds 1")
    grid = roots_grid(9 * n, 9)
    row_limit = math.sqrt(9 * n / math.pi)
    mat = sample_matrix(polys, grid, n=n)
    worst = float(mat.row_l2_norms.max())
    if worst > row_limit * (1 + ROW_NORM_SLACK):
        raise RuntimeError(f"row l2 norm {worst} exceeds sqrt(9n/pi) = {row_limit}; quadrature identity broken")
    scale = 1.0 / row_limit
    _, report, grid_disc, cert = _run(polys, grid, n, solver, seed, restarts, params, dense_points, scale)
    c_hat = grid_disc / row_limit
    return BalanceResult(
        mode="l2", signs=report.signs, grid_discrepancy=grid_disc, certificate=cert,
        theoretical_bound=3.0 * c_hat * math.sqrt(n), measured_constant=c_hat,
        n=n, d=n - 1, m=grid.m, solver_report=report, spencer_constant=None,
        row_scale=scale, dense_points=dense_points,
    )


def expected_grid(result: BalanceResult) -> tuple[Grid, int]:
    """The grid and degree bound a result of this mode must use."""
    g = result.certificate.grid
    if result.mode == "sup":
        return extrema_grid(result.n, g.M), result.n
    if result.mode == "degree_d":
        return extrema_grid(result.d, 9), result.d
    if result.mode == "l2":
        return roots_grid(9 * result.n, 9), result.n
    raise ValueError(f"unknown result mode {result.mode!r}")


def _close(a: float, b: float, scale: float) -> bool:
    return math.isclose(a, b, rel_tol=VERIFY_RTOL, abs_tol=VERIFY_RTOL * scale)


def verify(result: BalanceResult, polys: Sequence[ChebPoly]) -> bool:
    """Recompute a result from scratch and compare every stored number.

    Returns False on any mismatch beyond ``1e-12`` relative, or if the
    dense estimate exceeds the certified bound. Raises ``ValueError`` when
    the result does not fit the polynomials at all.
    """
    n = len(polys)
    if result.n != n or len(result.signs) != n:
        raise ValueError(f"result is for n={result.n} with {len(result.signs)} signs, got {n} polynomials")
    grid, degree_bound = expected_grid(result)
    if grid != result.certificate.grid or grid.m != result.m:
        return False
    if any(p.degree > degree_bound for p in polys):
        raise ValueError("polynomial degree exceeds the result's degree bound")
    if tuple(result.solver_report.signs) != tuple(result.signs):
        return False
    mat = sample_matrix(polys, grid, n=degree_bound)
    scale = 1.0 + float(mat.row_inf_norms.sum())
    grid_disc = discrepancy_of(mat, result.signs)
    solver_disc = discrepancy_of(mat.scaled(result.row_scale), result.signs) if result.row_scale != 1.0 else grid_disc
    q = signed_sum(polys, result.signs)
    factor = grid_factor(degree_bound, grid)
    dense = dense_sup_estimate(q, result.dense_points)
    cert = result.certificate
    checks = [
        _close(grid_disc, result.grid_discrepancy, scale),
        _close(solver_disc, result.solver_report.discrepancy, scale),
        _close(grid_max(q, grid), result.grid_discrepancy, scale),
        cert.factor == factor,
        _close(cert.grid_max, grid_disc, scale),
        _close(cert.certified_bound, factor * grid_disc, scale),
        cert.dense_estimate is not None and _close(cert.dense_estimate, dense, scale),
        dense <= cert.certified_bound,
    ]
    return all(checks)


def random_instance(n: int, seed: int, degree: int | None = None) -> list[ChebPoly]:
    """``n`` certified-unit random polynomials of the given degree (default n)."""
    deg = n if degree is None else degree
    seeds = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [random_unit_poly(deg, int(s)) for s in seeds]


def random_l2_unit_poly(degree: int, seed: int) -> ChebPoly:
    """Gaussian Chebyshev coefficients rescaled to unit ``int_0^pi p(cos t)^2 dt``."""
    rng = np.random.default_rng(seed)
    p = ChebPoly(rng.standard_normal(degree + 1))
    p = p.scale(1.0 / math.sqrt(l2_theta_norm_sq(p)))
    while l2_theta_norm_sq(p) > 1.0:
        p = p.scale(1.0 - 2.0**-52)
    return p


def random_l2_instance(n: int, seed: int) -> list[ChebPoly]:
    """``n`` unit-L2 random polynomials of degree ``n - 1``."""
    seeds = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [random_l2_unit_poly(n - 1, int(s)) for s in seeds]


def instance_to_json(polys: Sequence[ChebPoly], degree_bound: int) -> dict:
    return {"polys": [p.to_json() for p in polys], "degree_bound": int(degree_bound)}


def instance_from_json(obj: dict) -> tuple[list[ChebPoly], int]:
    if not isinstance(obj, dict) or not isinstance(obj.get("polys"), list):
        raise ValueError("instance file needs a 'polys' list")
    polys = [poly_from_json(p) for p in obj["polys"]]
    if not polys:
        raise ValueError("instance has no polynomials")
    bound = obj.get("degree_bound", max(p.degree for p in polys))
    if not isinstance(bound, int) or isinstance(bound, bool):
        raise ValueError("'degree_bound' must be an integer")
    return polys, bound
