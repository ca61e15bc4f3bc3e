"""Synthetic price panels with planted dependence regimes.

Each regime has its own correlation matrix. Log-prices are a stationary
AR(1) process driven by innovations with that correlation, so level
correlations inside a window track the regime's matrix; the switch
between regimes is abrupt at the given months.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .panel import PricePanel, WindowSpec


def block_correlation(n: int, n_blocks: int, within: float, between: float) -> np.ndarray:
    """Equicorrelated blocks of (near) equal size."""
    block = np.arange(n) * n_blocks // n
    same = block[:, None] == block[None, :]
    C = np.where(same, within, between)
    np.fill_diagonal(C, 1.0)
    return C


def hub_correlation(n: int, loading: float) -> np.ndarray:
    """Country 0 is a common factor every other country loads on."""
    load = np.full(n, loading)
    load[0] = 1.0
    C = np.outer(load, load)
    np.fill_diagonal(C, 1.0)
    return C


def default_regimes(n: int) -> list:
    """Five fixed blocks; each regime changes how tightly they are bound.

    Keeping the partition fixed makes every pairwise correlation move
    monotonically between its old and new value in windows straddling a
    switch, so the indices ramp from one level to the next instead of
    overshooting.
    """
    return [
        block_correlation(n, 5, 0.4, 0.1),   # loosely integrated
        block_correlation(n, 5, 0.9, 0.6),   # tightly integrated
        block_correlation(n, 5, 0.45, 0.0),  # fragmented
    ]


@dataclass(frozen=True, eq=False)
class SyntheticPanel:
    panel: PricePanel
    break_months: tuple
    true_change_points: tuple  # window index t: break between windows t and t+1
    regimes: tuple


def true_change_point(break_month: int, spec: WindowSpec) -> int:
    """Last window in which strictly more than half the months precede
    ``break_month``."""
    return math.ceil((break_month - spec.length_months / 2) / spec.step_months) - 1


def planted_regime_panel(
    seed: int = 0,
    n_countries: int = 30,
    n_months: int = 720,
    break_months: tuple = (240, 480),
    regimes=None,
    ar: float = 0.0,
    volatility: float = 0.05,
    start: str = "1955-01",
    spec: WindowSpec = WindowSpec(),
) -> SyntheticPanel:
    rng = np.random.default_rng(seed)
    if regimes is None:
        regimes = default_regimes(n_countries)
    if len(regimes) != len(break_months) + 1:
        raise ValueError("need one more regime than break months")
    if list(break_months) != sorted(set(break_months)) or not all(0 < m < n_months for m in break_months):
        raise ValueError("break months must be increasing and inside the panel")
    chol = [np.linalg.cholesky(C) for C in regimes]
    edges = [0, *break_months, n_months]

    x = np.zeros((n_months, n_countries))
    state = chol[0] @ rng.standard_normal(n_countries)
    scale = math.sqrt(1 - ar * ar)
    for r, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        for t in range(a, b):
            state = ar * state + scale * (chol[r] @ rng.standard_normal(n_countries))
            x[t] = state
    values = 100.0 * np.exp(volatility * x)
    codes = tuple(f"C{j:02d}" for j in range(n_countries))
    dates = np.datetime64(start, "M") + np.arange(n_months)
    return SyntheticPanel(
        panel=PricePanel(dates, codes, values),
        break_months=tuple(break_months),
        true_change_points=tuple(true_change_point(m, spec) for m in break_months),
        regimes=tuple(regimes),
    )
