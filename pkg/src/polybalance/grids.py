"""Sampling grids in angle space and Gauss-Chebyshev quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import fft

from .cheb_core import ChebPoly, cheb_product, eval_cheb
from .discrepancy import SampleMatrix


@dataclass(frozen=True, eq=False)
class Grid:
    """Equispaced angles ``offset + k * spacing`` for ``k = 0..m-1``.

    ``kind`` is ``"extrema"`` (offset 0, spacing ``pi/(M n)``) or
    ``"roots"`` (the ``m`` roots of ``T_m``, offset half a spacing).
    ``n`` is the degree the grid was designed for and ``m = M * n``.
    """

    kind: str
    n: int
    M: int
    offset: float
    spacing: float
    thetas: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.thetas.size

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.kind, self.n, self.M) == (other.kind, other.n, other.M)

    def __hash__(self):
        return hash((self.kind, self.n, self.M))

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "M": self.M, "offset": self.offset}


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def extrema_grid(n: int, M: int = 9) -> Grid:
    """Angles ``k pi / (M n)``, ``k = 0..M n - 1``.

    ``M`` must exceed pi for the grid certificate to be meaningful, so
    ``M <= 3`` is rejected.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if M <= 3:
        raise ValueError(f"grid multiplier M={M} must be >= 4 (needs M > pi)")
    m = M * n
    spacing = math.pi / m
    thetas = np.arange(m) * spacing
    return Grid("extrema", n, M, 0.0, spacing, _frozen(thetas), _frozen(np.cos(thetas)))


def roots_grid(N: int, M: int = 1) -> Grid:
    """Angles ``(2k + 1) pi / (2N)``; the points are the roots of ``T_N``.

    ``M`` only records the design: the grid serves degree ``N // M``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if M < 1 or N % M:
        raise ValueError(f"M={M} must divide N={N}")
    thetas = (2 * np.arange(N) + 1) * math.pi / (2 * N)
    return Grid(
        "roots", N // M, M, math.pi / (2 * N), math.pi / N,
        _frozen(thetas), _frozen(np.cos(thetas)),
    )


def grid_from_json(obj: dict) -> Grid:
    kind = obj.get("kind")
    n, M = int(obj["n"]), int(obj["M"])
    if kind == "extrema":
        grid = extrema_grid(n, M)
    elif kind == "roots":
        grid = roots_grid(n * M, M)
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    if "offset" in obj and not math.isclose(obj["offset"], grid.offset, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError("grid offset does not match its kind")
    return grid


def _fold_extrema(coeffs: np.ndarray, N: int) -> np.ndarray:
    # cos(j k pi / N) depends on j only through j mod 2N and j -> 2N - j
    if coeffs.shape[-1] <= N + 1:
        out = np.zeros(coeffs.shape[:-1] + (N + 1,))
        out[..., : coeffs.shape[-1]] = coeffs
        return out
    out = np.zeros(coeffs.shape[:-1] + (N + 1,))
    for j in range(coeffs.shape[-1]):
        r = j % (2 * N)
        if r > N:
            r = 2 * N - r
        out[..., r] += coeffs[..., j]
    return out


def _fold_roots(coeffs: np.ndarray, N: int) -> np.ndarray:
    # cos(j (2k+1) pi / 2N) flips sign under j -> j + 2N and j -> 2N - j,
    # and vanishes for j = N
    out = np.zeros(coeffs.shape[:-1] + (N,))
    if coeffs.shape[-1] <= N:
        out[..., : coeffs.shape[-1]] = coeffs
        return out
    for j in range(coeffs.shape[-1]):
        r = j % (2 * N)
        sign = -1.0 if (j // (2 * N)) % 2 else 1.0
        if r == N:
            continue
        if r > N:
            r = 2 * N - r
            sign = -sign
        out[..., r] += sign * coeffs[..., j]
    return out


def cosine_series_extrema(coeffs: np.ndarray, N: int) -> np.ndarray:
    """Values of ``sum_j c_j cos(j t)`` at ``t = k pi / N``, ``k = 0..N``.

    ``coeffs`` may be 2-D (one series per row). Uses a type-I DCT.
    """
    c = _fold_extrema(np.atleast_2d(np.asarray(coeffs, dtype=float)), N)
    x = c.copy()
    x[:, 1:N] *= 0.5
    vals = fft.dct(x, type=1, axis=-1)
    return vals if np.ndim(coeffs) > 1 else vals[0]


def grid_values(polys: Sequence[ChebPoly] | ChebPoly, grid: Grid) -> np.ndarray:
    """Evaluate one or many polynomials on every grid angle.

    Exact aliasing identities fold high coefficients onto the grid, then a
    DCT (type I for extrema grids, type III for roots grids) evaluates all
    nodes at once. Returns shape ``(m,)`` for a single polynomial and
    ``(len(polys), m)`` otherwise.
    """
    single = isinstance(polys, ChebPoly)
    plist = [polys] if single else list(polys)
    if not plist:
        raise ValueError("no polynomials to evaluate")
    width = max(p.degree for p in plist) + 1
    coeffs = np.zeros((len(plist), width))
    for i, p in enumerate(plist):
        coeffs[i, : p.degree + 1] = p.coeffs
    m = grid.m
    if grid.kind == "extrema":
        # m * spacing = pi, so node k is k pi / m; drop the k = m endpoint
        vals = cosine_series_extrema(coeffs, m)[:, :m]
    elif grid.kind == "roots":
        x = _fold_roots(coeffs, m)
        x[:, 1:] *= 0.5
        vals = fft.dct(x, type=3, axis=-1)
    else:
        raise ValueError(f"unknown grid kind {grid.kind!r}")
    return vals[0] if single else vals


def sample_matrix(polys: Sequence[ChebPoly], grid: Grid, n: int | None = None) -> SampleMatrix:
    """Rows ``p_i(cos theta_j)`` over the grid, shape ``(len(polys), m)``.

    ``n`` is the degree bound the grid certifies (default ``grid.n``);
    polynomials above it are rejected because the grid certificate would
    not cover them.
    """
    bound = grid.n if n is None else n
    for i, p in enumerate(polys):
        if p.degree > bound:
            raise ValueError(f"polynomial {i} has degree {p.degree} > grid design degree {bound}")
    return SampleMatrix(grid_values(list(polys), grid))


def gauss_cheb_quadrature(p: ChebPoly, N: int) -> float:
    """``(pi / N) * sum_k p(x_k)`` over the roots of ``T_N``.

    Equals ``int_0^pi p(cos t) dt`` whenever ``degree(p) < 2N``. Higher
    degrees still return the sum; callers who need exactness check the
    degree themselves.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    vals = eval_cheb(p, roots_grid(N).points)
    return math.pi / N * math.fsum(vals.tolist())


def l2_theta_norm_sq(p: ChebPoly) -> float:
    """``int_0^pi p(cos t)^2 dt``, exact through quadrature on ``p * p``."""
    return gauss_cheb_quadrature(cheb_product(p, p), p.degree + 1)
