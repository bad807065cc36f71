"""Kernel families, cross-kernel inner products and bandwidth rules.

Two smoothing kernels ship: the Gaussian kernel for data on R^d and the
von Mises kernel for angles on [0, 2*pi).  The central quantity is the
cross inner product

    phi_h(a, b) = integral of K_h(z - a) * K_h(z - b) dz,

which has a closed form for both families and fills the Gram matrix of
the pair operator.  Bandwidths follow h = kappa * n**(-beta) with a
Silverman-style automatic kappa.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import i0e

from .series import ObservedSeries

GAUSSIAN = "gaussian"
VONMISES = "vonmises"

SQRT_2PI = np.sqrt(2.0 * np.pi)

#: squared L2 norm of the standard normal density, 1/(2*sqrt(pi))
GAUSSIAN_L2_SQ = 1.0 / (2.0 * np.sqrt(np.pi))


@dataclass(frozen=True)
class KernelSpec:
    """A smoothing kernel: family, bandwidth and product dimension.

    For the von Mises family the concentration is ``bandwidth**-2`` and
    only ``dim == 1`` circular data are supported.
    """

    family: str
    bandwidth: float
    dim: int = 1

    def __post_init__(self):
        if self.family not in (GAUSSIAN, VONMISES):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.family == VONMISES and self.dim != 1:
            raise ValueError("von Mises kernel requires dim == 1")

    @property
    def concentration(self) -> float:
        """Von Mises concentration parameter 1/h^2."""
        if self.family != VONMISES:
            raise AttributeError("concentration is defined for the von Mises family")
        return self.bandwidth**-2


@dataclass(frozen=True, eq=False)
class CustomKernel:
    """A user-supplied kernel, defined by its cross inner product.

    ``cross_gram_fn(a, b, h)`` must return the inner product of the two
    scaled kernels centred at the d-vectors ``a`` and ``b``; any kernel
    with a non-vanishing Fourier transform qualifies.  ``l2_sq`` (the
    squared L2 norm of the unscaled univariate kernel) is only needed
    for the theoretical threshold rule.
    """

    cross_gram_fn: Callable
    bandwidth: float
    dim: int = 1
    l2_sq: float | None = None

    family = "custom"

    def __post_init__(self):
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class BandwidthRule:
    """Bandwidth schedule h = kappa * n**(-beta).

    ``kappa=None`` selects the automatic scale: Silverman's
    0.9 * min(sd, IQR/1.34) for univariate data, 0.9 times the geometric
    mean of the per-coordinate standard deviations for d >= 2, and 1 for
    the von Mises kernel.  ``n`` counts consecutive pairs.
    """

    beta: float
    kappa: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.kappa is not None and not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @classmethod
    def default_for(cls, dim: int, family: str = GAUSSIAN) -> "BandwidthRule":
        """The paper-style default: beta = 1/6 for d = 1 (and for the
        von Mises kernel, with kappa = 1), beta = 1/(4 + 2d) for d >= 2."""
        if family == VONMISES:
            return cls(beta=1.0 / 6.0, kappa=1.0)
        beta = 1.0 / 6.0 if dim == 1 else 1.0 / (4.0 + 2.0 * dim)
        return cls(beta=beta, kappa=None)


def _check_finite(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("kernel argument contains non-finite values")
    return arr


def kernel_eval(spec: KernelSpec, u) -> np.ndarray | float:
    """Evaluate the unscaled univariate kernel at ``u``.

    Gaussian: the standard normal density.  Von Mises: ``u`` is an angle
    difference and K(u) = exp(cos(u)/h^2) / (2*pi*I0(1/h^2)), evaluated
    through the scaled Bessel function so large concentrations do not
    overflow.
    """
    arr = _check_finite(u)
    if spec.family == GAUSSIAN:
        out = np.exp(-0.5 * arr**2) / SQRT_2PI
    else:
        kap = spec.concentration
        out = np.exp(kap * (np.cos(arr) - 1.0)) / (2.0 * np.pi * i0e(kap))
    return out if out.ndim else float(out)


def cross_gram(spec, a, b) -> float:
    """phi_h(a, b) for a single pair of points (closed form for the
    built-in families, delegated for a CustomKernel)."""
    a = _check_finite(a).reshape(-1)
    b = _check_finite(b).reshape(-1)
    if a.shape != b.shape or a.size != spec.dim:
        raise ValueError(
            f"points must both have dimension {spec.dim}, got {a.size} and {b.size}"
        )
    if isinstance(spec, CustomKernel):
        return float(spec.cross_gram_fn(a, b, spec.bandwidth))
    if spec.family == GAUSSIAN:
        h = spec.bandwidth
        sq = float(np.sum((a - b) ** 2))
        return (4.0 * np.pi * h * h) ** (-spec.dim / 2.0) * np.exp(-sq / (4.0 * h * h))
    kap = spec.concentration
    c = abs(np.cos(0.5 * (float(a[0]) - float(b[0]))))
    # I0(2*kap*c) / (2*pi*I0(kap)^2) written with exp-scaled Bessels
    return float(i0e(2.0 * kap * c) * np.exp(2.0 * kap * (c - 1.0))) / (
        2.0 * np.pi * float(i0e(kap)) ** 2
    )


def cross_gram_matrix(spec, points: np.ndarray) -> np.ndarray:
    """All pairwise phi_h values for an (N, d) point array.

    The result is made bit-for-bit symmetric by mirroring the upper
    triangle.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != spec.dim:
        raise ValueError(f"points must be (N, {spec.dim}), got {pts.shape}")
    if isinstance(spec, CustomKernel):
        n = pts.shape[0]
        w = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                w[i, j] = spec.cross_gram_fn(pts[i], pts[j], spec.bandwidth)
    elif spec.family == GAUSSIAN:
        h = spec.bandwidth
        sq = pts @ pts.T
        norms = np.diag(sq).copy()
        d2 = np.maximum(norms[:, None] + norms[None, :] - 2.0 * sq, 0.0)
        w = (4.0 * np.pi * h * h) ** (-spec.dim / 2.0) * np.exp(-d2 / (4.0 * h * h))
    else:
        kap = spec.concentration
        ang = pts[:, 0]
        c = np.abs(np.cos(0.5 * (ang[:, None] - ang[None, :])))
        w = i0e(2.0 * kap * c) * np.exp(2.0 * kap * (c - 1.0))
        w /= 2.0 * np.pi * float(i0e(kap)) ** 2
    if not np.all(np.isfinite(w)):
        i, j = np.argwhere(~np.isfinite(w))[0]
        raise FloatingPointError(
            f"non-finite kernel value for points {i} and {j} (bandwidth {spec.bandwidth})"
        )
    upper = np.triu(w)
    return upper + np.triu(w, 1).T


def kernel_l2_norm_sq(spec) -> float:
    """Squared L2 norm of the unscaled univariate kernel.

    Equals phi_1 evaluated at coinciding points for the Gaussian family
    and I0(2*kap)/(2*pi*I0(kap)^2) for the von Mises family.  A
    CustomKernel must carry the value explicitly.
    """
    if isinstance(spec, CustomKernel):
        if spec.l2_sq is None:
            raise ValueError("this custom kernel does not declare its L2 norm")
        return float(spec.l2_sq)
    if spec.family == GAUSSIAN:
        return GAUSSIAN_L2_SQ
    kap = spec.concentration
    return float(i0e(2.0 * kap)) / (2.0 * np.pi * float(i0e(kap)) ** 2)


def silverman_kappa(series: ObservedSeries) -> float:
    """Automatic bandwidth scale from the pooled observations.

    Univariate: 0.9 * min(sd, IQR/1.34).  Multivariate: 0.9 times the
    geometric mean of the per-coordinate standard deviations (a single
    scalar bandwidth is shared by all coordinates).
    """
    pts = series.points
    sds = np.std(pts, axis=0, ddof=1)
    if np.any(sds <= 0):
        raise ValueError("degenerate data: a coordinate has zero variance")
    if series.dim == 1:
        iqr = float(np.quantile(pts[:, 0], 0.75) - np.quantile(pts[:, 0], 0.25))
        scale = min(float(sds[0]), iqr / 1.34)
        if scale <= 0:
            raise ValueError("degenerate data: zero interquartile range and variance")
        return 0.9 * scale
    return 0.9 * float(np.prod(sds)) ** (1.0 / series.dim)


def select_bandwidth(rule: BandwidthRule, series: ObservedSeries) -> float:
    """Resolve a bandwidth rule against a series: h = kappa * n**(-beta)."""
    n = series.n_pairs
    if n < 1:
        raise ValueError("series has no consecutive pairs")
    kappa = rule.kappa if rule.kappa is not None else silverman_kappa(series)
    return kappa * n ** (-rule.beta)
