"""Seeded Monte-Carlo estimators used to cross-check the closed forms.

Draws are generated in fixed-size chunks, each with its own stream derived
from ``SeedSequence(seed, spawn_key=(chunk,))``. Chunk statistics are merged
in chunk order, so the result depends only on ``(seed, n)`` and never on how
many workers computed the chunks.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beam import RxBeam
from .gml import HoverStats, conditional_gml
from .skr import ChannelBudget

CHUNK_SIZE = 1 << 16
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class McResult:
    mean: float
    stderr: float
    n: int
    seed: int

    def z_score(self, reference: float) -> float:
        """Standardised distance of ``reference`` from the estimate."""
        diff = self.mean - reference
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.stderr


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _run_chunks(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    n: int,
    seed: int,
    workers: int | None,
) -> McResult:
    if n < MIN_SAMPLES:
        raise ValueError(f"n must be >= {MIN_SAMPLES}, got {n}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)

    def work(i: int) -> np.ndarray:
        return sampler(_chunk_rng(seed, i), sizes[i])

    if workers is None or workers <= 1:
        chunks = [work(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(work, range(len(sizes))))

    # Chan et al. pairwise merge on values shifted by the first draw, so a
    # constant sample gives that constant back exactly with zero spread.
    shift = float(chunks[0][0])
    count = 0
    mean = 0.0
    m2 = 0.0
    for vals in chunks:
        d = vals - shift
        nb = d.size
        mb = float(np.mean(d))
        m2b = float(np.sum((d - mb) ** 2))
        delta = mb - mean
        tot = count + nb
        mean = mean + delta * nb / tot
        m2 = m2 + m2b + delta * delta * count * nb / tot
        count = tot

    var = m2 / (count - 1)
    return McResult(mean=shift + mean, stderr=math.sqrt(var / count), n=count, seed=seed)


def mc_average_gml(
    rx: RxBeam, hover: HoverStats, a: float, n: int, seed: int, workers: int | None = None
) -> McResult:
    """Average of the conditional GML over Gaussian hovering offsets."""

    def sampler(rng: np.random.Generator, m: int) -> np.ndarray:
        z = rng.standard_normal((2, m))
        ox = hover.mu_x + hover.sigma_x * z[0]
        oy = hover.mu_y + hover.sigma_y * z[1]
        return conditional_gml(ox, oy, rx, a)

    return _run_chunks(sampler, n, seed, workers)


def _lognormal_draws(rng: np.random.Generator, m: int, sigma_sq: float) -> np.ndarray:
    return np.exp(-sigma_sq / 2.0 + math.sqrt(sigma_sq) * rng.standard_normal(m))


def mc_plob(budget: ChannelBudget, n: int, seed: int, workers: int | None = None) -> McResult:
    """Average PLOB bound over mean-one log-normal fading draws.

    Draws that push ``c * I`` to 1 or beyond contribute zero.
    """
    c = budget.c
    s2 = budget.sigma_R_sq

    def sampler(rng: np.random.Generator, m: int) -> np.ndarray:
        tau = c * _lognormal_draws(rng, m, s2)
        out = np.zeros(m)
        ok = tau < 1.0
        out[ok] = -np.log1p(-tau[ok]) / math.log(2.0)
        return out

    return _run_chunks(sampler, n, seed, workers)


def mc_lognormal_mean(sigma_sq: float, n: int, seed: int, workers: int | None = None) -> McResult:
    """Sample mean of the raw mean-one log-normal irradiance."""
    if not sigma_sq >= 0:
        raise ValueError(f"sigma_sq must be >= 0, got {sigma_sq}")
    return _run_chunks(lambda rng, m: _lognormal_draws(rng, m, sigma_sq), n, seed, workers)
