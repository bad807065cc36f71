"""Simulation of stationary finite-state hidden Markov models.

Covers the emission families used throughout the experiments: the
state-shift model with exchangeable noise (Gaussian, Student t3,
Laplace, Exponential), Beta emissions on [0, 1], Gaussian location
emissions on R, and von Mises emissions on the circle.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .series import CIRCULAR, LINEAR, TWO_PI, ObservedSeries

GAUSSIAN_NOISE = "gaussian"
STUDENT3_NOISE = "student3"
LAPLACE_NOISE = "laplace"
EXPONENTIAL_NOISE = "exponential"

NOISE_FAMILIES = (GAUSSIAN_NOISE, STUDENT3_NOISE, LAPLACE_NOISE, EXPONENTIAL_NOISE)


@dataclass(frozen=True)
class ShiftNoise:
    """Location shift plus unit-scale noise.

    The Exponential noise is used as drawn (rate 1, support [0, inf)),
    not recentred; Student noise is the plain t with 3 degrees of
    freedom.
    """

    shift: float
    noise: str = GAUSSIAN_NOISE

    def __post_init__(self):
        if self.noise not in NOISE_FAMILIES:
            raise ValueError(f"unknown noise family {self.noise!r}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.noise == GAUSSIAN_NOISE:
            eps = rng.standard_normal(size)
        elif self.noise == STUDENT3_NOISE:
            eps = rng.standard_t(3, size)
        elif self.noise == LAPLACE_NOISE:
            eps = rng.laplace(0.0, 1.0, size)
        else:
            eps = rng.exponential(1.0, size)
        return self.shift + eps


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("Beta parameters must be positive")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.beta(self.a, self.b, size)


@dataclass(frozen=True)
class GaussianLoc:
    mean: float
    sd: float = 1.0

    def __post_init__(self):
        if self.sd <= 0:
            raise ValueError("sd must be positive")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.mean + self.sd * rng.standard_normal(size)


@dataclass(frozen=True)
class VonMisesLoc:
    mean: float
    concentration: float

    def __post_init__(self):
        if self.concentration <= 0:
            raise ValueError("concentration must be positive")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.mod(rng.vonmises(self.mean, self.concentration, size), TWO_PI)


@dataclass(frozen=True, eq=False)
class HmmSpec:
    """A stationary HMM: transition matrix, stationary law, emissions."""

    transition: np.ndarray
    stationary: np.ndarray
    emissions: tuple
    dim: int = 1
    kind: str = LINEAR

    def __post_init__(self):
        a = np.asarray(self.transition, dtype=float)
        pi = np.asarray(self.stationary, dtype=float)
        ell = a.shape[0]
        if a.shape != (ell, ell):
            raise ValueError("transition matrix must be square")
        if len(self.emissions) != ell:
            raise ValueError("need one emission per state")
        if np.any(a < 0) or np.max(np.abs(a.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition rows must be nonnegative and sum to 1")
        if abs(pi.sum() - 1.0) > 1e-10 or np.any(pi < 0):
            raise ValueError("stationary vector must be a distribution")
        if np.max(np.abs(pi @ a - pi)) > 1e-10:
            raise ValueError("stationary vector does not satisfy pi A = pi")
        if abs(np.linalg.det(a)) <= 1e-10:
            warnings.warn(
                "transition matrix is numerically rank deficient; "
                "the order is not identifiable from pair distributions",
                stacklevel=2,
            )
        object.__setattr__(self, "transition", a)
        object.__setattr__(self, "stationary", pi)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @classmethod
    def from_transition(cls, transition, emissions, dim: int = 1, kind: str = LINEAR):
        a = np.asarray(transition, dtype=float)
        return cls(
            transition=a,
            stationary=stationary_distribution(a),
            emissions=tuple(emissions),
            dim=dim,
            kind=kind,
        )


def make_transition_nu(nu: float, n_states: int = 3) -> np.ndarray:
    """Symmetric transition matrix with off-diagonal rate ``nu``.

    For three states the diagonal equals 1 - 2*nu.  At nu = 0 all states
    are absorbing and at nu = 1/n_states the matrix is singular (the
    chain becomes an iid sequence); both make the order unidentifiable,
    so a warning is emitted.
    """
    if not 0.0 < nu < 1.0 / (n_states - 1):
        raise ValueError(
            f"nu must lie in (0, {1.0 / (n_states - 1)}) for {n_states} states"
        )
    if abs(nu - 1.0 / n_states) < 1e-12:
        warnings.warn(
            "nu = 1/L makes the transition matrix singular; the model is not identifiable",
            stacklevel=2,
        )
    a = np.full((n_states, n_states), nu)
    np.fill_diagonal(a, 1.0 - (n_states - 1) * nu)
    return a


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    stack = [start]
    seen[start] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return seen


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Solve pi A = pi with sum(pi) = 1 for an irreducible chain."""
    a = np.asarray(transition, dtype=float)
    ell = a.shape[0]
    adj = a > 0
    for start in range(ell):
        if not _reachable(adj, start).all():
            raise ValueError("transition matrix is reducible")
    system = np.vstack([a.T - np.eye(ell), np.ones(ell)])
    rhs = np.zeros(ell + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = np.max(np.abs(pi @ a - pi))
    if resid > 1e-12:
        raise np.linalg.LinAlgError(
            f"stationary distribution residual {resid:.3e} exceeds 1e-12"
        )
    return pi


def simulate(
    spec: HmmSpec, n_pairs: int, seed: int | np.random.Generator
) -> tuple[ObservedSeries, np.ndarray]:
    """Draw one stationary path of n_pairs + 1 observations.

    The first state follows the stationary law, transitions follow the
    rows of the transition matrix, and coordinates are conditionally
    independent draws from the state's emission.  Output is a
    deterministic function of (spec, n_pairs, seed).
    """
    if n_pairs < 1:
        raise ValueError("need n_pairs >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n_obs = n_pairs + 1
    cum = np.cumsum(spec.transition, axis=1)
    u = rng.random(n_obs)
    states = np.empty(n_obs, dtype=np.intp)
    states[0] = np.searchsorted(np.cumsum(spec.stationary), u[0])
    for t in range(n_pairs):
        states[t + 1] = np.searchsorted(cum[states[t]], u[t + 1])
    obs = np.empty((n_obs, spec.dim))
    for ell in range(spec.n_states):
        mask = states == ell
        count = int(mask.sum())
        if count:
            obs[mask] = spec.emissions[ell].sample(rng, (count, spec.dim))
    return ObservedSeries.from_points(obs, kind=spec.kind), states


def shift_scenario(
    noise: str = GAUSSIAN_NOISE, delta: float = 5.0, nu: float = 0.1, dim: int = 1
) -> HmmSpec:
    """Three-state shift model: state 2 shifted by +delta, state 3 by
    -delta, state 1 centred, iid noise in every coordinate."""
    emissions = (
        ShiftNoise(0.0, noise),
        ShiftNoise(delta, noise),
        ShiftNoise(-delta, noise),
    )
    return HmmSpec.from_transition(make_transition_nu(nu), emissions, dim=dim)


def paper_scenarios(nu: float = 0.1) -> dict:
    """The named three-state benchmark scenarios.

    ``beta3``: B(12, 1), B(1, 12), B(12, 12) on [0, 1].
    ``gauss3``: N(-6, 1), N(6, 1), N(0, 1) on R.
    ``vm3``: von Mises with means pi/2, pi/2 + 2pi/3, pi/2 + 4pi/3 and
    concentration 10 on the circle.
    """
    a = make_transition_nu(nu)
    return {
        "beta3": HmmSpec.from_transition(
            a, (Beta(12.0, 1.0), Beta(1.0, 12.0), Beta(12.0, 12.0))
        ),
        "gauss3": HmmSpec.from_transition(
            a, (GaussianLoc(-6.0), GaussianLoc(6.0), GaussianLoc(0.0))
        ),
        "vm3": HmmSpec.from_transition(
            a,
            (
                VonMisesLoc(np.pi / 2, 10.0),
                VonMisesLoc(np.pi / 2 + 2 * np.pi / 3, 10.0),
                VonMisesLoc(np.pi / 2 + 4 * np.pi / 3, 10.0),
            ),
            kind=CIRCULAR,
        ),
    }


def get_scenario(
    name: str,
    noise: str = GAUSSIAN_NOISE,
    delta: float = 5.0,
    nu: float = 0.1,
    dim: int = 1,
) -> HmmSpec:
    """Resolve a scenario name to a specification.

    Names: ``beta3``, ``gauss3``, ``vm3`` and the parameterized
    ``gauss-shift``, ``student-shift``, ``laplace-shift``, ``exp-shift``.
    """
    shift_names = {
        "gauss-shift": GAUSSIAN_NOISE,
        "student-shift": STUDENT3_NOISE,
        "laplace-shift": LAPLACE_NOISE,
        "exp-shift": EXPONENTIAL_NOISE,
    }
    if name in shift_names:
        return shift_scenario(shift_names[name], delta=delta, nu=nu, dim=dim)
    if name == "shift":
        return shift_scenario(noise, delta=delta, nu=nu, dim=dim)
    catalog = paper_scenarios(nu)
    if name in catalog:
        return catalog[name]
    raise KeyError(
        f"unknown scenario {name!r}; expected one of "
        f"{sorted(catalog) + sorted(shift_names) + ['shift']}"
    )
