"""Chebyshev-norm estimates and grid-to-global certificates.

If ``|p|`` is at most ``g`` on an angle grid of spacing ``pi/(M n)`` that
leaves no gap wider than one spacing in ``[0, pi]``, Bernstein's
inequality for the degree-``n`` cosine series ``p(cos t)`` bounds the
growth between nodes, and ``||p||_inf <= g / (1 - pi/M)``. For the
default ``M = 9`` the rounded-up factor ``5/3`` is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cheb_core import ChebPoly
from .grids import Grid, cosine_series_extrema, grid_from_json, grid_values

DEFAULT_DENSE_POINTS = 100_000
NINE_POINT_FACTOR = 5.0 / 3.0


@dataclass(frozen=True)
class SupCertificate:
    grid_max: float
    factor: float
    certified_bound: float
    grid: Grid
    dense_estimate: float | None = None

    def to_json(self) -> dict:
        return {
            "grid_max": self.grid_max,
            "factor": self.factor,
            "certified_bound": self.certified_bound,
            "dense_estimate": self.dense_estimate,
            "grid": self.grid.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> SupCertificate:
        return cls(
            grid_max=float(obj["grid_max"]),
            factor=float(obj["factor"]),
            certified_bound=float(obj["certified_bound"]),
            grid=grid_from_json(obj["grid"]),
            dense_estimate=None if obj.get("dense_estimate") is None else float(obj["dense_estimate"]),
        )


def grid_max(p: ChebPoly, grid: Grid) -> float:
    """``max_k |p(cos theta_k)|`` over the grid."""
    if grid.m == 0:
        raise ValueError("empty grid")
    return float(np.max(np.abs(grid_values(p, grid))))


def grid_factor(n: int, grid: Grid) -> float:
    """Grid-to-sup factor for degree ``n`` on ``grid``.

    Raises ``ValueError`` when the grid does not satisfy the certificate's
    hypotheses: it must tile ``[0, pi)`` evenly, start within one spacing
    of 0, and have more than ``pi`` nodes per unit of degree.
    """
    if n < 1:
        raise ValueError("degree bound n must be >= 1")
    m = grid.m
    if not math.isclose(m * grid.spacing, math.pi, rel_tol=1e-12):
        raise ValueError("grid spacing does not tile [0, pi)")
    if not (0.0 <= grid.offset <= grid.spacing * (1 + 1e-12)):
        raise ValueError("grid offset must lie in [0, spacing]")
    ratio = m / n
    if ratio <= math.pi:
        raise ValueError(f"grid has {m} nodes for degree {n}; needs more than pi * n")
    if m == 9 * n:
        return NINE_POINT_FACTOR
    return 1.0 / (1.0 - math.pi / ratio)


def certify_grid_max(gmax: float, n: int, grid: Grid, dense_estimate: float | None = None) -> SupCertificate:
    """Wrap an already computed grid maximum into a certificate."""
    factor = grid_factor(n, grid)
    return SupCertificate(float(gmax), factor, float(gmax) * factor, grid, dense_estimate)


def certified_sup(
    p: ChebPoly, n: int, grid: Grid, dense_points: int | None = DEFAULT_DENSE_POINTS
) -> SupCertificate:
    """Certified upper bound on ``||p||_inf`` from grid values.

    Parameters
    ----------
    p : ChebPoly
        Polynomial with ``degree <= n``.
    n : int
        Degree bound the grid was built for.
    grid : Grid
        Sampling grid; see :func:`grid_factor` for the requirements.
    dense_points : int or None
        Resolution of the diagnostic dense estimate stored on the
        certificate, or None to skip it.
    """
    if p.degree > n:
        raise ValueError(f"degree {p.degree} exceeds certificate degree bound {n}")
    dense = None if dense_points is None else dense_sup_estimate(p, dense_points)
    return certify_grid_max(grid_max(p, grid), n, grid, dense)


def dense_sup_estimate(p: ChebPoly, num_points: int = DEFAULT_DENSE_POINTS) -> float:
    """Max of ``|p(cos t)|`` over ``t = k pi / num_points``, ``k = 0..num_points``.

    A lower estimate of ``||p||_inf``. Refining by an integer factor only
    adds nodes, so the estimate never decreases along e.g. powers of 10.
    """
    if num_points < 2:
        raise ValueError("num_points must be >= 2")
    vals = np.abs(cosine_series_extrema(p.coeffs, num_points))
    # the DCT sums in a different order at t = 0 and t = pi; use exact sums there
    c = p.coeffs.tolist()
    vals[0] = abs(math.fsum(c))
    vals[-1] = abs(math.fsum(cj if j % 2 == 0 else -cj for j, cj in enumerate(c)))
    return float(vals.max())
