"""Shared numerical kernels: erf, adaptive quadrature, Gauss-Laguerre rules
and the log-normal expectation used as the exact key-rate oracle."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special
from scipy.linalg import eigh_tridiagonal

from .errors import NonConvergence, OrderTooLarge

MAX_LAGUERRE_ORDER = 512

# |L_n(x)| <= exp(x/2) overflows a double past x ~ 1400; the recurrence is
# renormalised whenever a value grows beyond this.
_RESCALE_AT = 1e150


def erf_accurate(x):
    """Gaussian error function.

    Accepts a scalar or an array; scalars come back as ``float``. Backed by
    the Cephes implementation in SciPy, which is accurate to a few ulp and
    exactly odd.
    """
    out = special.erf(x)
    if np.ndim(out) == 0:
        return float(out)
    return out


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    *,
    breakpoints: Sequence[float] | None = None,
    limit: int = 500,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to relative tolerance ``rel_tol``.

    Uses globally adaptive Gauss-Kronrod subdivision (QUADPACK). Interior
    ``breakpoints`` are forwarded so that known features of the integrand
    sit on panel boundaries.

    Raises:
        ValueError: if ``a >= b`` or ``rel_tol`` is outside ``(0, 1e-2]``.
        NonConvergence: if the subdivision limit is reached, or QUADPACK
            reports any other failure, before the tolerance is met.
    """
    if not a < b:
        raise ValueError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    if not 0.0 < rel_tol <= 1e-2:
        raise ValueError(f"rel_tol must lie in (0, 1e-2], got {rel_tol}")

    points = None
    if breakpoints:
        points = sorted(p for p in breakpoints if a < p < b) or None

    value, _abserr, _info, *failure = integrate.quad(
        f, a, b, epsabs=0.0, epsrel=rel_tol, limit=limit, points=points, full_output=1
    )
    # a fourth element (the QUADPACK message) is only present when ier != 0
    if failure:
        raise NonConvergence(f"adaptive quadrature on [{a}, {b}] failed: {failure[0]}")
    return float(value)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre rule on ``[0, inf)`` with weight ``exp(-x)``.

    ``scaled_weights`` hold ``w_g * exp(x_g)`` so that
    ``sum(scaled_weights * f(nodes))`` approximates ``int_0^inf f(x) dx``
    without ever forming the raw weights, which underflow for large orders.
    """

    order: int
    nodes: np.ndarray
    scaled_weights: np.ndarray

    def __post_init__(self) -> None:
        self.nodes.setflags(write=False)
        self.scaled_weights.setflags(write=False)

    @property
    def weights(self) -> np.ndarray:
        """Raw weights ``w_g``; the smallest underflow to zero for large orders."""
        return np.exp(np.log(self.scaled_weights) - self.nodes)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Approximate ``int_0^inf f(x) dx``; ``f`` must accept an array."""
        return float(np.sum(self.scaled_weights * f(self.nodes)))


def _laguerre_pair(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(L_n(x), L_{n-1}(x))`` up to a common factor ``exp(log_scale)``."""
    prev = np.ones_like(x)
    cur = 1.0 - x
    log_scale = np.zeros_like(x)
    if n == 1:
        return cur, prev, log_scale
    for j in range(1, n):
        nxt = ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE_AT
        if np.any(big):
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            log_scale = log_scale + np.log(s)
    return cur, prev, log_scale


@lru_cache(maxsize=16)
def gauss_laguerre(order: int) -> QuadratureRule:
    """Build the order-``G`` Gauss-Laguerre rule.

    Nodes come from the eigenvalues of the Jacobi matrix (Golub-Welsch),
    polished with Newton steps on ``L_G``. Scaled weights are assembled in
    the log domain from ``w_g = x_g / ((G+1) L_{G+1}(x_g))**2``.
    """
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise ValueError(f"quadrature order must be a positive integer, got {order!r}")
    if order > MAX_LAGUERRE_ORDER:
        raise OrderTooLarge(f"order {order} exceeds the supported maximum {MAX_LAGUERRE_ORDER}")
    g = int(order)

    diag = 2.0 * np.arange(g) + 1.0
    off = np.arange(1.0, g)
    x = eigh_tridiagonal(diag, off, eigvals_only=True)
    x = np.sort(x)

    # Polish in extended precision: the recurrence loses the low bits of the
    # smallest roots in plain double arithmetic.
    xl = x.astype(np.longdouble)
    for _ in range(3):
        lg, lgm1, _ = _laguerre_pair(g, xl)
        # L_G'(x) = G (L_G - L_{G-1}) / x; the common scale cancels in the ratio
        xl = xl - xl * lg / (g * (lg - lgm1))

    lnext, _, log_scale = _laguerre_pair(g + 1, xl)
    log_norm = np.log(np.longdouble(g + 1)) + np.log(np.abs(lnext)) + log_scale
    log_w_scaled = np.log(xl) + xl - 2.0 * log_norm
    return QuadratureRule(
        order=g,
        nodes=xl.astype(float),
        scaled_weights=np.exp(log_w_scaled).astype(float),
    )


def lognormal_pdf(x, sigma_sq: float):
    """Density of the mean-one log-normal with log-variance ``sigma_sq``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logx = np.log(x)
        dens = np.exp(-((logx + sigma_sq / 2.0) ** 2) / (2.0 * sigma_sq)) / (
            x * math.sqrt(2.0 * math.pi * sigma_sq)
        )
    dens = np.where(x > 0, dens, 0.0)
    return float(dens) if dens.ndim == 0 else dens


def lognormal_expectation(
    g: Callable[[float], float],
    sigma_R_sq: float,
    upper_clamp: float = math.inf,
    rel_tol: float = 1e-7,
) -> float:
    """``E[g(I)]`` for mean-one log-normal ``I``, truncated to ``I < upper_clamp``.

    Integrates in ``z = ln I`` against the Gaussian weight over ten standard
    deviations either side of the location, cut at ``ln(upper_clamp)``.
    """
    if not sigma_R_sq > 0:
        raise ValueError(f"sigma_R_sq must be positive, got {sigma_R_sq}")
    if not upper_clamp > 0:
        raise ValueError(f"upper_clamp must be positive, got {upper_clamp}")
    mu = -sigma_R_sq / 2.0
    s = math.sqrt(sigma_R_sq)
    lo = mu - 10.0 * s
    hi = mu + 10.0 * s
    if math.isfinite(upper_clamp):
        hi = min(hi, math.log(upper_clamp))
    if hi <= lo:
        return 0.0
    norm = 1.0 / (s * math.sqrt(2.0 * math.pi))

    def integrand(z: float) -> float:
        return g(math.exp(z)) * norm * math.exp(-0.5 * ((z - mu) / s) ** 2)

    bp = [mu] if lo < mu < hi else None
    return integrate_adaptive(integrand, lo, hi, rel_tol, breakpoints=bp)
