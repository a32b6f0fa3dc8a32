"""Secondary-link design: zero-interference precoder, whitening, power allocation.

The opportunistic transmitter aims its signal at the spatial modes the
primary left unused. With square channels the unscaled precoder is
``inv(h12) @ u1 @ diag(p1_bar)``: after the primary's receive filter, its
transmission lands exactly on the unused-mode diagonal and the active modes
see nothing. With more receive than transmit antennas the inverse is
replaced by the left pseudo-inverse. Column n is exactly zero whenever
``p1_bar[n]`` is zero, so the precoder spans only the free dimensions.

The secondary receiver whitens the primary's interference (covariance q)
with ``q^{-1/2}`` and then either splits power uniformly or water-fills an
equivalent whitened channel restricted to the active columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IllConditionedChannelError,
    InternalInvariantError,
    InvalidInputError,
    UnsupportedGeometryError,
)
from .kernels import RANK_GUARD, herm, hermitian_inv_sqrt, log2_det_id_plus, pinv_tall
from .waterfill import waterfill

# The interference-plus-noise covariance dominates sigma2 * I by
# construction; this slack absorbs eigenvalue rounding when whitening.
NOISE_FLOOR_SLACK = 1e-10


@dataclass(frozen=True)
class SecondaryDesign:
    """One power-allocation scheme's full outcome for a trial.

    ``v2_raw`` is the unscaled precoder (columns outside ``active_columns``
    exactly zero); the transmitted precoder is ``alpha * v2_raw``. ``p2`` is
    the final Hermitian PSD input covariance, full size, and
    ``trace(v2 @ p2 @ v2^H)`` meets the power budget with equality whenever
    any column is active.
    """

    v2_raw: np.ndarray
    active_columns: np.ndarray
    q: np.ndarray
    f2: np.ndarray
    alpha: float
    p2: np.ndarray
    rate: float

    @property
    def v2(self) -> np.ndarray:
        """Final (scaled) precoder."""
        return self.alpha * self.v2_raw


def _solve_refined(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b with one step of iterative refinement."""
    x = np.linalg.solve(a, b)
    residual = b - a @ x
    return x + np.linalg.solve(a, residual)


def build_precoder(h12, u1, p1_bar) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled zero-interference precoder and its active column indices.

    Parameters
    ----------
    h12 : array_like
        Cross channel from the secondary transmitter to the primary receiver,
        nr x nt with nr >= nt and full column rank.
    u1 : array_like
        Left singular vectors of the primary's direct channel (nr x nr); only
        the first nt columns, the ones paired with singular values, are used.
    p1_bar : array_like
        Complementary primary allocation over the nt allocatable modes.

    Returns
    -------
    (v2_raw, active_columns)
        nt x nt precoder with scale deferred (alpha applied later), and the
        indices of its nonzero columns (the primary's unused modes).

    Raises
    ------
    UnsupportedGeometryError
        If nr < nt; no precoder construction exists for that shape.
    IllConditionedChannelError
        If h12 fails the rank guard; the trial should be redrawn.
    """
    h12 = np.asarray(h12, dtype=np.complex128)
    u1 = np.asarray(u1, dtype=np.complex128)
    nr, nt = h12.shape
    if nr < nt:
        raise UnsupportedGeometryError(
            f"no precoder for nr={nr} < nt={nt}; need at least as many receive antennas")
    p1_bar = np.asarray(p1_bar, dtype=float)
    if p1_bar.shape != (nt,):
        raise InvalidInputError(f"p1_bar must have {nt} entries, got shape {p1_bar.shape}")
    if nr == nt:
        s = np.linalg.svd(h12, compute_uv=False)
        if s[0] == 0.0 or s[-1] < RANK_GUARD * s[0]:
            ratio = 0.0 if s[0] == 0.0 else s[-1] / s[0]
            raise IllConditionedChannelError(
                f"cross channel fails rank guard (singular-value ratio {ratio:.3e})")
        steered = _solve_refined(h12, u1)
    else:
        steered = pinv_tall(h12) @ u1[:, :nt]
    v2_raw = steered * p1_bar[None, :]
    active_columns = np.flatnonzero(p1_bar > 0.0)
    return v2_raw, active_columns


def interference_covariance(h21, v1, p1, sigma2: float) -> np.ndarray:
    """Covariance of the primary's interference plus noise at the secondary receiver.

    ``h21 @ v1 @ diag(p1) @ v1^H @ h21^H + sigma2 * I``, symmetrized. The
    result is Hermitian with spectrum at or above sigma2. ``p1`` may be
    shorter than nt (min(nr, nt) allocatable modes); the surplus transmit
    dimensions carry zero power.
    """
    h21 = np.asarray(h21, dtype=np.complex128)
    v1 = np.asarray(v1, dtype=np.complex128)
    p = np.asarray(p1, dtype=float)
    nt = v1.shape[0]
    diag = np.zeros(nt)
    diag[:p.size] = p
    cov = h21 @ ((v1 * diag[None, :]) @ herm(v1)) @ herm(h21)
    q = cov + sigma2 * np.eye(h21.shape[0])
    return 0.5 * (q + herm(q))


def uniform_secondary(v2_raw, active_columns, q, h22, p_max: float,
                      sigma2: float) -> SecondaryDesign:
    """Uniform power scheme: identity input covariance, scale tuned to the budget.

    alpha is chosen so that ``trace(v2 @ v2^H) = p_max`` exactly. With no
    active column there is nothing to transmit on: alpha is 0 and the rate 0.
    """
    if not (np.isfinite(p_max) and p_max > 0):
        raise InvalidInputError("p_max must be positive and finite")
    v2_raw = np.asarray(v2_raw, dtype=np.complex128)
    h22 = np.asarray(h22, dtype=np.complex128)
    active = np.asarray(active_columns, dtype=int)
    nt = v2_raw.shape[1]
    f2 = hermitian_inv_sqrt(q, floor=sigma2 * (1.0 - NOISE_FLOOR_SLACK))
    p2 = np.eye(nt)
    if active.size == 0:
        return SecondaryDesign(v2_raw=v2_raw, active_columns=active, q=np.asarray(q),
                               f2=f2, alpha=0.0, p2=p2, rate=0.0)
    total = float(np.sum(np.abs(v2_raw) ** 2))
    alpha = float(np.sqrt(p_max / total))
    whitened = f2 @ h22 @ (alpha * v2_raw)
    rate = log2_det_id_plus(whitened @ herm(whitened))
    return SecondaryDesign(v2_raw=v2_raw, active_columns=active, q=np.asarray(q),
                           f2=f2, alpha=alpha, p2=p2, rate=rate)


def optimal_secondary(v2_raw, active_columns, q, h22, p_max: float,
                      sigma2: float) -> SecondaryDesign:
    """Rate-maximizing power scheme via water-filling on an equivalent channel.

    The full-size precoder gram matrix is singular whenever some columns are
    zero, so the transform runs on the active columns only. With
    ``vt = v2_raw[:, active]`` and ``m = (vt^H vt)^{1/2}``, the equivalent
    whitened channel is ``g = q^{-1/2} @ h22 @ vt @ m^{-1}``; water-filling
    its squared singular values under the budget gives the diagonal
    allocation, which is conjugated back through the right singular vectors
    and ``m^{-1}`` and embedded at the active rows and columns. The budget is
    then met with equality: ``trace(vt @ p2_reduced @ vt^H) = p_max``.

    The scale alpha stays 1: the transformed trace constraint already
    absorbs all scaling, and any nonzero alpha yields the same transmitted
    covariance.
    """
    if not (np.isfinite(p_max) and p_max > 0):
        raise InvalidInputError("p_max must be positive and finite")
    v2_raw = np.asarray(v2_raw, dtype=np.complex128)
    h22 = np.asarray(h22, dtype=np.complex128)
    active = np.asarray(active_columns, dtype=int)
    nt = v2_raw.shape[1]
    f2 = hermitian_inv_sqrt(q, floor=sigma2 * (1.0 - NOISE_FLOOR_SLACK))
    if active.size == 0:
        return SecondaryDesign(v2_raw=v2_raw, active_columns=active, q=np.asarray(q),
                               f2=f2, alpha=1.0, p2=np.zeros((nt, nt)), rate=0.0)
    vt = v2_raw[:, active]
    # Column equilibration: complementary-allocation entries can differ by
    # many orders of magnitude, which would wreck the gram eigendecomposition
    # (small eigenvalues only carry absolute accuracy). The optimum depends
    # only on the precoder's column space, so solve in normalized columns and
    # undo the rescale on the output covariance.
    norms = np.linalg.norm(vt, axis=0)
    if norms.min() == 0.0:
        raise InternalInvariantError("an active precoder column is exactly zero")
    vn = vt / norms[None, :]
    gram = herm(vn) @ vn
    w, basis = np.linalg.eigh(0.5 * (gram + herm(gram)))
    if w[0] <= 0.0 or w[0] < 1e-12 * w[-1]:
        raise InternalInvariantError(
            "active precoder columns are numerically dependent; "
            "this cannot happen for a full-rank cross channel")
    m_inv = (basis * (1.0 / np.sqrt(w))) @ herm(basis)
    g = f2 @ h22 @ vn @ m_inv
    _, eta, zh = np.linalg.svd(g, full_matrices=False)
    z = herm(zh)
    with np.errstate(divide="ignore"):
        alloc = waterfill(1.0 / eta**2, p_max)
    p_reduced = m_inv @ ((z * alloc.powers[None, :]) @ herm(z)) @ m_inv
    p_reduced = (p_reduced / norms[:, None]) / norms[None, :]
    p_reduced = 0.5 * (p_reduced + herm(p_reduced))
    p2 = np.zeros((nt, nt), dtype=np.complex128)
    p2[np.ix_(active, active)] = p_reduced
    rate = float(np.sum(np.log1p(eta**2 * alloc.powers)) / np.log(2.0))
    return SecondaryDesign(v2_raw=v2_raw, active_columns=active, q=np.asarray(q),
                           f2=f2, alpha=1.0, p2=p2, rate=rate)


def residual_interference(u1, h12, v2, p2, active_primary_modes) -> float:
    """Largest per-mode interference amplitude the primary receiver sees.

    After the primary's receive filter, mode n observes row n of
    ``u1^H @ h12 @ v2 @ p2^{1/2}``. Returns the maximum Euclidean row norm
    over the primary's active modes; the alignment construction keeps this at
    rounding level.
    """
    u1 = np.asarray(u1, dtype=np.complex128)
    h12 = np.asarray(h12, dtype=np.complex128)
    v2 = np.asarray(v2, dtype=np.complex128)
    p2 = np.asarray(p2, dtype=np.complex128)
    active = np.asarray(active_primary_modes, dtype=int)
    if active.size == 0:
        return 0.0
    w, vecs = np.linalg.eigh(0.5 * (p2 + herm(p2)))
    root = (vecs * np.sqrt(np.maximum(w, 0.0))) @ herm(vecs)
    seen = herm(u1) @ h12 @ v2 @ root
    return float(np.max(np.linalg.norm(seen[active, :], axis=1)))
