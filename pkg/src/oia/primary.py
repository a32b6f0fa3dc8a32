"""Primary-link design: SVD diagonalization and water-filled power allocation.

The primary pair ignores the opportunistic link entirely. It precodes with
the right singular vectors of its direct channel, filters with the conjugate
transposed left singular vectors, and water-fills its budget over the
resulting parallel modes. The complementary allocation marks how far below
the water level each unused mode sits; the secondary precoder is built on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, InvalidInputError
from .kernels import SvdFactors, svd
from .waterfill import PowerAllocation, waterfill


@dataclass(frozen=True)
class PrimaryDesign:
    """Everything the primary link commits to for one channel realization.

    The precoder is ``svd.v``; the receive filter is ``svd.u`` conjugate
    transposed. ``p1.powers`` and ``p1_bar`` have disjoint supports by
    construction (they share the same water level), so their elementwise
    product is exactly zero. ``unused_count`` is the number of allocatable
    modes carrying zero power, i.e. the dimensions left free for the
    opportunistic link.
    """

    svd: SvdFactors
    p1: PowerAllocation
    p1_bar: np.ndarray
    unused_count: int
    sigma2: float
    p_max: float

    @property
    def active_modes(self) -> np.ndarray:
        """Indices of modes with strictly positive primary power."""
        return np.flatnonzero(self.p1.powers > 0.0)


def design_primary(h11, p_max: float, sigma2: float) -> PrimaryDesign:
    """Water-filled single-user design over the direct channel's singular modes.

    Inverse gain of mode n is sigma2 / lambda_n^2 over the min(nr, nt)
    allocatable modes; the complementary allocation is
    ``max(0, inverse_gain - water_level)`` per mode. When nt > nr the surplus
    transmit dimensions are nullspace directions, not water-filling
    decisions: they carry no power and are not counted as unused modes.

    Raises
    ------
    DegenerateChannelError
        If any allocatable singular value is exactly zero. The complementary
        allocation divides by lambda_n^2, so an exactly rank-deficient
        channel has no finite design; callers discard the trial and redraw.
    InvalidInputError
        If p_max or sigma2 is not strictly positive.
    """
    if not (np.isfinite(p_max) and p_max > 0):
        raise InvalidInputError("p_max must be positive and finite")
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise InvalidInputError("sigma2 must be positive and finite")
    factors = svd(h11)
    lam = factors.sigma
    if lam[-1] == 0.0:
        raise DegenerateChannelError(
            "channel is rank deficient, complementary allocation undefined")
    inverse_gains = sigma2 / lam**2
    p1 = waterfill(inverse_gains, p_max)
    p1_bar = np.maximum(0.0, inverse_gains - p1.water_level)
    unused = int(np.count_nonzero(p1.powers == 0.0))
    return PrimaryDesign(svd=factors, p1=p1, p1_bar=p1_bar, unused_count=unused,
                         sigma2=float(sigma2), p_max=float(p_max))


def primary_rate(design: PrimaryDesign) -> float:
    """Achieved primary rate in bits/s/Hz, summed over the diagonalized modes."""
    lam = design.svd.sigma
    mode_snr = lam**2 * design.p1.powers / design.sigma2
    return float(np.sum(np.log1p(mode_snr)) / np.log(2.0))
