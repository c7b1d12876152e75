"""Polynomials in the Chebyshev basis.

A :class:`ChebPoly` stores coefficients ``c_0..c_d`` of ``sum_j c_j T_j``.
Because ``T_j(cos t) = cos(j t)``, the same coefficients are the cosine
series of ``q(t) = p(cos t)``; everything downstream works in that angle
space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as npcheb

#: Largest power-basis degree accepted by :func:`from_monomial`.
MONOMIAL_DEGREE_CAP = 4096


def _as_coeffs(coeffs) -> np.ndarray:
    arr = np.array(coeffs, dtype=float).ravel()
    if arr.size == 0:
        arr = np.zeros(1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChebPoly:
    """Polynomial ``sum_j coeffs[j] * T_j``.

    The coefficient array is read-only. Trailing zeros are kept, so
    ``degree`` is the index of the last *stored* coefficient; the zero
    polynomial is ``ChebPoly([0.0])`` with degree 0.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return eval_cheb(self, x)

    def __eq__(self, other):
        if not isinstance(other, ChebPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __neg__(self) -> ChebPoly:
        return ChebPoly(-self.coeffs)

    def scale(self, factor: float) -> ChebPoly:
        return ChebPoly(self.coeffs * float(factor))

    def to_json(self) -> dict:
        return {"basis": "chebyshev", "coeffs": [float(c) for c in self.coeffs]}


@dataclass(frozen=True, eq=False)
class MonomialPoly:
    """Polynomial ``sum_k coeffs[k] * x**k`` in the power basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        # Horner; only used at the boundary and in tests.
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def to_json(self) -> dict:
        return {"basis": "monomial", "coeffs": [float(c) for c in self.coeffs]}


def poly_from_json(obj: dict) -> ChebPoly:
    """Read a polynomial JSON object, converting monomial input.

    Raises
    ------
    ValueError
        On an unknown ``basis`` or a malformed coefficient list.
    """
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ValueError("polynomial object needs 'basis' and 'coeffs'")
    basis = obj.get("basis")
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, list) or not all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs
    ):
        raise ValueError("'coeffs' must be a list of numbers")
    if basis == "chebyshev":
        return ChebPoly(coeffs)
    if basis == "monomial":
        return from_monomial(MonomialPoly(coeffs))
    raise ValueError(f"unknown polynomial basis {basis!r}")


def cheb_basis(k: int) -> ChebPoly:
    """Return ``T_k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    coeffs = np.zeros(k + 1)
    coeffs[k] = 1.0
    return ChebPoly(coeffs)


def eval_cheb(p: ChebPoly, x):
    """Evaluate ``p`` at ``x`` with the Clenshaw backward recurrence.

    Accepts a scalar or an array. Points outside ``[-1, 1]`` are evaluated
    but carry no meaning for the sup-norm certificates.
    """
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise ValueError("evaluation point must be finite")
    c = p.coeffs
    b1 = np.zeros_like(x_arr)
    b2 = np.zeros_like(x_arr)
    two_x = 2.0 * x_arr
    for cj in c[:0:-1]:
        b1, b2 = cj + two_x * b1 - b2, b1
    out = c[0] + x_arr * b1 - b2
    if np.ndim(x) == 0:
        return float(out)
    return out


def eval_trig(p: ChebPoly, theta):
    """Evaluate the cosine series ``sum_j c_j cos(j theta)``.

    Summation runs over ``j`` in increasing order, so the result for a
    given angle does not depend on how many angles are evaluated at once.
    """
    t = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("theta must be finite")
    acc = np.zeros_like(t)
    for j, cj in enumerate(p.coeffs):
        if cj != 0.0:
            acc = acc + cj * np.cos(j * t)
    if np.ndim(theta) == 0:
        return float(acc)
    return acc


def _half_binomial_rows(max_degree: int):
    """Yield ``C(n, k) / 2**n`` for ``n = 0..max_degree`` as arrays.

    Built with the halving Pascal recurrence so no factorial is formed;
    tiny entries underflow to zero instead of overflowing.
    """
    row = np.ones(1)
    yield row
    for _ in range(max_degree):
        nxt = np.zeros(row.size + 1)
        nxt[:-1] += row
        nxt[1:] += row
        row = 0.5 * nxt
        yield row


def from_monomial(m: MonomialPoly, degree_cap: int = MONOMIAL_DEGREE_CAP) -> ChebPoly:
    """Convert a power-basis polynomial to the Chebyshev basis.

    Each ``x**n`` is expanded with the cosine-power identity::

        cos^n t = 2^(1-n) sum_{k < n/2} C(n, k) cos((n - 2k) t)
                  [+ 2^-n C(n, n/2)  when n is even]
    """
    d = m.degree
    if d > degree_cap:
        raise ValueError(f"monomial degree {d} exceeds cap {degree_cap}")
    out = np.zeros(d + 1)
    for n, h in enumerate(_half_binomial_rows(d)):
        a = m.coeffs[n]
        if a == 0.0:
            continue
        ks = np.arange((n + 1) // 2)
        # 2^(1-n) C(n, k) = 2 * h[k]
        out[n - 2 * ks] += a * 2.0 * h[ks]
        if n % 2 == 0:
            out[0] += a * h[n // 2]
    return ChebPoly(out)


def to_monomial(p: ChebPoly) -> MonomialPoly:
    """Convert back to the power basis (loses accuracy at high degree)."""
    return MonomialPoly(npcheb.cheb2poly(p.coeffs))


def signed_sum(polys: Sequence[ChebPoly], signs) -> ChebPoly:
    """Coefficient-wise ``sum_i signs[i] * polys[i]``."""
    signs = list(signs)
    if len(polys) != len(signs) or not polys:
        raise ValueError(
            f"need matching non-empty inputs, got {len(polys)} polys and {len(signs)} signs"
        )
    deg = max(p.degree for p in polys)
    out = np.zeros(deg + 1)
    for p, s in zip(polys, signs):
        out[: p.degree + 1] += s * p.coeffs
    return ChebPoly(out)


def cheb_product(p: ChebPoly, q: ChebPoly) -> ChebPoly:
    """Product via ``T_a T_b = (T_{a+b} + T_{|a-b|}) / 2``."""
    half = 0.5 * np.outer(p.coeffs, q.coeffs)
    i, j = np.indices(half.shape)
    out = np.zeros(p.degree + q.degree + 1)
    np.add.at(out, (i + j).ravel(), half.ravel())
    np.add.at(out, np.abs(i - j).ravel(), half.ravel())
    return ChebPoly(out)


def random_unit_poly(degree: int, seed: int) -> ChebPoly:
    """Random polynomial whose certified Chebyshev norm is at most one.

    Standard-normal coefficients are divided by the grid certificate
    (9 points per unit of degree), so ``||p||_inf <= 1`` is proven rather
    than sampled.
    """
    from .sup_norm import certified_sup
    from .grids import extrema_grid

    if degree < 0:
        raise ValueError("degree must be non-negative")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(degree + 1)
    n = max(degree, 1)
    grid = extrema_grid(n, 9)
    bound = certified_sup(ChebPoly(coeffs), n, grid, dense_points=None).certified_bound
    coeffs = coeffs / bound
    # division can land one ulp above 1
    while certified_sup(ChebPoly(coeffs), n, grid, dense_points=None).certified_bound > 1.0:
        coeffs = coeffs * (1.0 - 2.0**-52)
    return ChebPoly(coeffs)


def l1_bound(p: ChebPoly) -> float:
    """``sum_j |c_j|``, a trivially valid upper bound on ``||p||_inf``."""
    return math.fsum(abs(float(c)) for c in p.coeffs)
