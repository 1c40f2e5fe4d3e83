"""PLOB repeaterless bound on the secret-key rate, pointwise and averaged
over log-normal turbulence fading, plus the QPS focus-distance search."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidConfig, SaturatedChannel
from .numerics import QuadratureRule, gauss_laguerre, lognormal_expectation, lognormal_pdf

DEFAULT_LAGUERRE_ORDER = 180
FOCUS_XTOL_M = 1e-3
TIE_TOL_BITS = 1e-6


@dataclass(frozen=True)
class ChannelBudget:
    """Loss factors of the end-to-end channel and the total Rytov variance."""

    tau_eff: float
    tau_l: float
    tau_p: float
    sigma_R_sq: float

    def __post_init__(self) -> None:
        for name in ("tau_eff", "tau_l", "tau_p"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise InvalidConfig(name, f"must lie in (0, 1], got {v}")
        if not self.sigma_R_sq >= 0:
            raise InvalidConfig("sigma_R_sq", f"must be >= 0, got {self.sigma_R_sq}")

    @property
    def c(self) -> float:
        """Mean transmissivity ``tau_eff * tau_l * tau_p``."""
        return self.tau_eff * self.tau_l * self.tau_p


def plob_pointwise(tau: float) -> float:
    """``-log2(1 - tau)`` bits per channel use."""
    if tau >= 1:
        raise SaturatedChannel(f"transmissivity {tau} >= 1: the bound diverges")
    if tau < 0:
        raise ValueError(f"transmissivity must be >= 0, got {tau}")
    return -math.log1p(-tau) / math.log(2.0)


def plob_average_exact(budget: ChannelBudget, rel_tol: float = 1e-7) -> float:
    """Turbulence-averaged bound by adaptive integration (the reference value)."""
    c = budget.c
    if budget.sigma_R_sq == 0:
        return plob_pointwise(c)
    return lognormal_expectation(
        lambda i: plob_pointwise(c * i), budget.sigma_R_sq, upper_clamp=1.0 / c, rel_tol=rel_tol
    )


def plob_average_gl(budget: ChannelBudget, rule: QuadratureRule | None = None) -> float:
    """Turbulence-averaged bound by Gauss-Laguerre quadrature.

    Nodes at or beyond the clamp ``c * x >= 1`` contribute nothing.
    """
    c = budget.c
    if budget.sigma_R_sq == 0:
        return plob_pointwise(c)
    if rule is None:
        rule = gauss_laguerre(DEFAULT_LAGUERRE_ORDER)
    x = rule.nodes
    keep = c * x < 1.0
    xk = x[keep]
    bits = -np.log1p(-c * xk) / math.log(2.0)
    return float(np.sum(rule.scaled_weights[keep] * bits * lognormal_pdf(xk, budget.sigma_R_sq)))


@dataclass(frozen=True)
class FocusOptimum:
    f_opt: float
    skr_opt: float
    curve: tuple[tuple[float, float], ...]


def _evaluate(objective: Callable[[float], float], fs: Sequence[float], workers: int | None) -> list[float]:
    if workers is None or workers <= 1 or len(fs) <= 1:
        return [objective(f) for f in fs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(objective, fs))


def optimize_focus(
    objective: Callable[[float], float],
    f_grid: Sequence[float],
    f_min: float,
    *,
    refine: bool = True,
    workers: int | None = None,
) -> FocusOptimum:
    """Maximise ``objective(f)`` (the key rate) over QPS focus distances.

    The grid is scanned first; values within ``TIE_TOL_BITS`` of the best
    count as ties and the smallest such ``f`` wins. With ``refine`` a
    bounded golden-section search polishes the winner to ``FOCUS_XTOL_M``
    between its grid neighbours; the refined point is kept only if it
    beats the grid value by more than the tie tolerance.
    """
    fs = [float(f) for f in f_grid]
    if not fs:
        raise ValueError("f_grid must not be empty")
    if any(f < f_min * (1 - 1e-12) for f in fs):
        raise ValueError(f"f_grid must lie in [{f_min}, inf)")
    order = sorted(range(len(fs)), key=fs.__getitem__)
    fs = [fs[i] for i in order]
    values = _evaluate(objective, fs, workers)
    curve = tuple(zip(fs, values))

    best = max(values)
    idx = next(i for i, v in enumerate(values) if v >= best - TIE_TOL_BITS)
    f_best, v_best = fs[idx], values[idx]

    if refine and len(fs) > 1:
        lo = fs[max(idx - 1, 0)]
        hi = fs[min(idx + 1, len(fs) - 1)]
        res = minimize_scalar(
            lambda f: -objective(f), bounds=(lo, hi), method="bounded", options={"xatol": FOCUS_XTOL_M}
        )
        if res.success and -res.fun > v_best + TIE_TOL_BITS:
            f_best, v_best = float(res.x), float(-res.fun)

    return FocusOptimum(f_opt=f_best, skr_opt=v_best, curve=curve)
