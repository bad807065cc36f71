"""Competing spectral order estimator.

The data are mapped to [0, 1], projected on a trigonometric basis to
form the moment matrix

    N[k, l] = (1/n) * sum_t phi_k(y_t) * phi_l(y_{t+1}),

and the order is the length of the leading run of singular values that
are "significant": larger than ``tau_factor`` times the value predicted
by a straight line fitted through the smallest ``n_reg`` singular
values against their index.
"""

from dataclasses import dataclass

import numpy as np

from .series import LINEAR, ObservedSeries


@dataclass(frozen=True)
class SpectralConfig:
    """Basis size, regression count and significance multiplier."""

    n_basis: int
    n_reg: int
    tau_factor: float = 1.5

    def __post_init__(self):
        if self.n_basis < 1:
            raise ValueError("n_basis must be >= 1")
        if not 1 <= self.n_reg <= self.n_basis:
            raise ValueError("need 1 <= n_reg <= n_basis")
        if self.n_reg < 2:
            raise ValueError("the regression needs at least two points (n_reg >= 2)")
        if self.tau_factor <= 0:
            raise ValueError("tau_factor must be positive")


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Selected order plus the spectrum and the fitted reference line."""

    l_hat: int
    sigma: np.ndarray
    fitted: np.ndarray
    significant: np.ndarray
    config: SpectralConfig


def scale_to_unit(series: ObservedSeries) -> ObservedSeries:
    """Affinely map a univariate series onto [0, 1]."""
    if series.dim != 1:
        raise ValueError("scaling to the unit interval needs univariate data")
    pts = series.points[:, 0]
    lo, hi = float(pts.min()), float(pts.max())
    if hi <= lo:
        raise ValueError("degenerate data: constant series cannot be scaled")
    return ObservedSeries(
        sequences=tuple((s - lo) / (hi - lo) for s in series.sequences),
        kind=LINEAR,
    )


def basis_matrix(values: np.ndarray, n_basis: int) -> np.ndarray:
    """Trigonometric basis phi_0 = 1, phi_k = sqrt(2) cos(pi k y) for
    k = 1..n_basis-1, evaluated columnwise."""
    values = np.asarray(values, dtype=float)
    out = np.empty((values.size, n_basis))
    out[:, 0] = 1.0
    for k in range(1, n_basis):
        out[:, k] = np.sqrt(2.0) * np.cos(np.pi * k * values)
    return out


def build_nhat(series: ObservedSeries, n_basis: int) -> np.ndarray:
    """Pairwise basis moment matrix over within-sequence pairs."""
    if series.dim != 1:
        raise ValueError("the spectral baseline handles univariate data only")
    blocks_first, blocks_second = [], []
    for seq in series.sequences:
        blocks_first.append(seq[:-1, 0])
        blocks_second.append(seq[1:, 0])
    first = basis_matrix(np.concatenate(blocks_first), n_basis)
    second = basis_matrix(np.concatenate(blocks_second), n_basis)
    n = first.shape[0]
    return first.T @ second / n


def significance_line(sigma: np.ndarray, n_reg: int) -> np.ndarray:
    """Straight line fitted through the ``n_reg`` smallest singular
    values against their (1-based) index, evaluated at every index."""
    m = sigma.size
    idx = np.arange(1, m + 1, dtype=float)
    tail_idx = idx[m - n_reg :]
    tail_sigma = sigma[m - n_reg :]
    slope, intercept = np.polyfit(tail_idx, tail_sigma, 1)
    return intercept + slope * idx


def spectral_order(
    series: ObservedSeries,
    config: SpectralConfig,
    scale: str = "auto",
) -> SpectralResult:
    """Run the spectral baseline on a univariate series.

    ``scale`` controls the unit-interval mapping: "auto" rescales only
    when observations fall outside [0, 1], "always"/"never" force the
    choice.  Counting stops at the first non-significant singular value.
    """
    if scale not in ("auto", "always", "never"):
        raise ValueError(f"unknown scale policy {scale!r}")
    if config.n_basis > series.n_pairs:
        raise ValueError("n_basis must not exceed the number of pairs")
    pts = series.points[:, 0]
    needs_scaling = pts.min() < 0.0 or pts.max() > 1.0
    if scale == "always" or (scale == "auto" and needs_scaling):
        series = scale_to_unit(series)
    nhat = build_nhat(series, config.n_basis)
    sigma = np.linalg.svd(nhat, compute_uv=False)
    fitted = significance_line(sigma, config.n_reg)
    significant = sigma > config.tau_factor * fitted
    l_hat = 0
    for flag in significant:
        if not flag:
            break
        l_hat += 1
    return SpectralResult(
        l_hat=l_hat,
        sigma=sigma,
        fitted=fitted,
        significant=significant,
        config=config,
    )
