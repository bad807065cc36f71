"""Observed time series container shared by the whole pipeline.

A series is one or several contiguous sequences of d-dimensional
observations.  Consecutive-pair statistics never cross a sequence
boundary, so the container keeps the sequences separate and exposes the
pooled point/pair counts that the estimators need.
"""

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

LINEAR = "linear"
CIRCULAR = "circular"


def _as_matrix(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"sequence must be 1- or 2-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class ObservedSeries:
    """One or several contiguous sequences of observations.

    Parameters
    ----------
    sequences : tuple of (len_s, d) arrays
        Each sequence must contain at least two observations and all
        sequences share the dimension ``d``.
    kind : {"linear", "circular"}
        Circular data must be univariate; values are wrapped to
        ``[0, 2*pi)`` at construction.
    """

    sequences: tuple = field(default=())
    kind: str = LINEAR

    def __post_init__(self):
        if self.kind not in (LINEAR, CIRCULAR):
            raise ValueError(f"unknown data kind {self.kind!r}")
        if not self.sequences:
            raise ValueError("series must contain at least one sequence")
        mats = []
        dim = None
        for s, seq in enumerate(self.sequences):
            arr = _as_matrix(seq)
            if arr.shape[0] < 2:
                raise ValueError(f"sequence {s} has fewer than 2 observations")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"sequence {s} contains non-finite values")
            if dim is None:
                dim = arr.shape[1]
            elif arr.shape[1] != dim:
                raise ValueError(
                    f"sequence {s} has dimension {arr.shape[1]}, expected {dim}"
                )
            mats.append(arr)
        if self.kind == CIRCULAR:
            if dim != 1:
                raise ValueError("circular series must be univariate")
            mats = [np.mod(m, TWO_PI) for m in mats]
        for m in mats:
            m.flags.writeable = False
        object.__setattr__(self, "sequences", tuple(mats))

    @classmethod
    def from_points(cls, points, kind: str = LINEAR) -> "ObservedSeries":
        """Wrap a single contiguous sequence."""
        return cls(sequences=(points,), kind=kind)

    @property
    def dim(self) -> int:
        return self.sequences[0].shape[1]

    @property
    def n_sequences(self) -> int:
        return len(self.sequences)

    @property
    def n_points(self) -> int:
        """Total number of observations N across sequences."""
        return sum(s.shape[0] for s in self.sequences)

    @property
    def n_pairs(self) -> int:
        """Total number of consecutive pairs n (boundaries excluded)."""
        return sum(s.shape[0] - 1 for s in self.sequences)

    @property
    def points(self) -> np.ndarray:
        """All observations stacked into one (N, d) array."""
        return np.concatenate(self.sequences, axis=0)

    def coordinate(self, j: int) -> "ObservedSeries":
        """Univariate series formed by coordinate ``j`` of every sequence."""
        if not 0 <= j < self.dim:
            raise IndexError(f"coordinate {j} out of range for dim {self.dim}")
        return ObservedSeries(
            sequences=tuple(s[:, j : j + 1] for s in self.sequences), kind=self.kind
        )
