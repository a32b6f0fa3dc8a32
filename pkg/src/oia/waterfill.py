"""Exact water-filling power allocation over parallel channel gains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class PowerAllocation:
    """Nonnegative per-mode powers plus the Lagrangian water level.

    ``powers`` is in the same mode order as the inverse gains it was computed
    from; excluded modes hold exact zeros, so counting unused modes needs no
    epsilon. ``active_count`` is the number of strictly positive entries.
    """

    powers: np.ndarray
    water_level: float
    active_count: int


def waterfill(inverse_gains, budget: float) -> PowerAllocation:
    """Maximize sum_n log2(1 + powers[n] / inverse_gains[n]) under a power budget.

    Closed-form active-set solution of the KKT conditions: sort inverse gains
    ascending, include modes greedily with
    ``level = (budget + sum of included inverse gains) / count``,
    and stop as soon as the next candidate's inverse gain is at or above the
    level. Included modes get ``level - inverse_gain``; everything else gets
    an exact zero. The sum of powers equals the budget to rounding.

    Parameters
    ----------
    inverse_gains : array_like
        Positive per-mode costs (e.g. noise variance over squared channel
        gain). ``+inf`` marks a mode that can never be used.
    budget : float
        Total power to distribute, > 0.

    Raises
    ------
    InvalidInputError
        Empty gain list, nonpositive budget, nonpositive or NaN gains, or no
        finite gain at all.
    """
    ig = np.asarray(inverse_gains, dtype=float)
    if ig.ndim != 1 or ig.size == 0:
        raise InvalidInputError("inverse_gains must be a nonempty 1-D sequence")
    if np.isnan(ig).any() or (ig <= 0).any():
        raise InvalidInputError("inverse gains must be positive (or +inf)")
    if not (np.isfinite(budget) and budget > 0):
        raise InvalidInputError("budget must be positive and finite")
    finite = np.isfinite(ig)
    if not finite.any():
        raise InvalidInputError("need at least one finite inverse gain")

    order = np.argsort(ig, kind="stable")
    sorted_ig = ig[order]
    n_finite = int(finite.sum())

    active = 1
    included = sorted_ig[0]
    level = budget + included
    while active < n_finite and sorted_ig[active] < level:
        included += sorted_ig[active]
        active += 1
        level = (budget + included) / active

    powers_sorted = np.zeros(ig.size)
    powers_sorted[:active] = level - sorted_ig[:active]
    powers = np.zeros(ig.size)
    powers[order] = powers_sorted
    return PowerAllocation(powers=powers, water_level=float(level), active_count=active)
