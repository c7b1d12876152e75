"""Rudin-Shapiro signs, their flatness, and the sqrt(n/2) lower bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cheb_core import ChebPoly
from .discrepancy import check_signs
from .grids import cosine_series_extrema, extrema_grid, l2_theta_norm_sq
from .sup_norm import SupCertificate, certified_sup

LOWER_BOUND_CAP = 10
LOWER_BOUND_POINTS = 10_000


@dataclass(frozen=True)
class FlatnessReport:
    n: int
    signs: tuple[int, ...]
    circle_max: float
    cheb_sup: SupCertificate
    ratio: float
    num_thetas: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "signs": list(self.signs),
            "circle_max": self.circle_max,
            "cheb_sup": self.cheb_sup.to_json(),
            "ratio": self.ratio,
            "num_thetas": self.num_thetas,
        }


def rs_signs(n: int) -> tuple[int, ...]:
    """Rudin-Shapiro signs for indices ``i = 1..n``.

    ``x_i = (-1)**(number of overlapping "11" blocks in binary i)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return tuple(-1 if bin(i & (i >> 1)).count("1") % 2 else 1 for i in range(1, n + 1))


def chebyshev_sum(signs) -> ChebPoly:
    """``sum_{i=1}^n signs[i-1] * T_i``."""
    return ChebPoly(np.concatenate([[0.0], np.asarray(signs, dtype=float)]))


def circle_values(signs, num_thetas: int) -> tuple[np.ndarray, np.ndarray]:
    """Cosine and sine sums ``sum_i x_i cos(i t)``, ``sum_i x_i sin(i t)``.

    Evaluated at ``t = 2 pi k / num_thetas`` for ``k = 0..num_thetas - 1``.
    """
    a = np.zeros(max(num_thetas, len(signs) + 1))
    a[1 : len(signs) + 1] = signs
    if a.size > num_thetas:
        # alias higher frequencies onto the sample circle
        a = np.bincount(np.arange(a.size) % num_thetas, weights=a, minlength=num_thetas)
    z = np.fft.ifft(a) * num_thetas
    return z.real, z.imag


def flatness_report(n: int, num_thetas: int | None = None, signs=None) -> FlatnessReport:
    """Max modulus of ``sum x_i z^i`` on the unit circle and the certified Chebyshev sup.

    Defaults to Rudin-Shapiro signs and ``8n`` angles; fewer than ``4n``
    angles are rejected.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    num_thetas = 8 * n if num_thetas is None else num_thetas
    if num_thetas < 4 * n:
        raise ValueError(f"num_thetas={num_thetas} below the 4n={4 * n} resolution floor")
    signs = rs_signs(n) if signs is None else check_signs(signs, n)
    c, s = circle_values(signs, num_thetas)
    circle_max = float(np.sqrt(c * c + s * s).max())
    cert = certified_sup(chebyshev_sum(signs), n, extrema_grid(n, 9), dense_points=None)
    return FlatnessReport(n, signs, circle_max, cert, circle_max / math.sqrt(n), num_thetas)


def _all_signs(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1.0 - 2.0 * bits


def lower_bound_check(n: int, num_points: int = LOWER_BOUND_POINTS) -> float:
    """Min over all ``2**n`` sign vectors of the dense sup of ``sum x_i T_i``.

    Sign vectors are visited in lexicographic order (``+1`` first). Dense
    sampling underestimates every sup, so the minimum is conservative for
    checking a lower bound.

    Raises
    ------
    AssertionError
        If the minimum falls below ``sqrt(n/2) (1 - 1e-6)``.
    """
    if not 1 <= n <= LOWER_BOUND_CAP:
        raise ValueError(f"lower_bound_check needs 1 <= n <= {LOWER_BOUND_CAP}, got {n}")
    signs = _all_signs(n)
    coeffs = np.concatenate([np.zeros((signs.shape[0], 1)), signs], axis=1)
    sups = np.abs(cosine_series_extrema(coeffs, num_points)).max(axis=1)
    best = float(sups.min())
    bound = math.sqrt(n / 2)
    assert best >= bound * (1 - 1e-6), f"lower bound violated: {best} < {bound}"
    return best


def l2_identity(n: int, signs) -> float:
    """``(1/pi) int_0^pi q(cos t)^2 dt`` for ``q = sum x_i T_i``; always ``n/2``."""
    signs = check_signs(signs, n)
    return l2_theta_norm_sq(chebyshev_sum(signs)) / math.pi
