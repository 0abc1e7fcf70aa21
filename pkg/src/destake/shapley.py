"""Shapley values for the liveness and safety threshold voting games.

A validator is pivotal in an ordering when the cumulative weight before it
fails the threshold test and succeeds once it arrives.  Exact values come
from subset enumeration with exact rational coefficients, so efficiency
(sum phi = 1) holds exactly; sampled values count pivots over seeded random
permutations and are bit-reproducible for a fixed (samples, seed) regardless
of backend or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import _kernels
from .errors import (
    InsufficientSamplesError,
    TooLargeError,
    ZeroVarianceError,
)
from .metrics import gini
from .model import WeightVector

EXACT_LIMIT_DEFAULT = 20


@dataclass(frozen=True)
class VotingGame:
    """Threshold voting game over a weight vector.

    ``threshold_fraction`` is an exact Fraction (1/3 liveness, 2/3 safety) by
    default; the literal decimal constants 0.33 / 0.66 are available for the
    looser reading of the thresholds.  ``strict`` selects > (default) over >=.
    """

    weights: WeightVector
    threshold_fraction: Fraction | float
    strict: bool = True

    def __post_init__(self) -> None:
        frac = self.threshold_fraction
        value = float(frac)
        if not 0.0 < value < 1.0:
            raise ValueError(f"threshold fraction must be in (0, 1), got {frac}")

    @property
    def threshold_weight(self) -> float:
        """Threshold in weight units; exact-fraction mode keeps num*W/den exact
        whenever the total weight allows it."""
        w_total = self.weights.total_weight
        frac = self.threshold_fraction
        if isinstance(frac, Fraction):
            return float(frac.numerator) * w_total / float(frac.denominator)
        return frac * w_total

    @classmethod
    def liveness(cls, wv: WeightVector, *, literal: bool = False, strict: bool = True) -> VotingGame:
        return cls(wv, 0.33 if literal else Fraction(1, 3), strict)

    @classmethod
    def safety(cls, wv: WeightVector, *, literal: bool = False, strict: bool = True) -> VotingGame:
        return cls(wv, 0.66 if literal else Fraction(2, 3), strict)


@dataclass(frozen=True)
class ShapleyResult:
    """Per-validator Shapley values plus estimator metadata.

    ``exact_values`` carries the rational values for the exact method so the
    efficiency/symmetry/dummy axioms can be checked without float tolerance.
    """

    values: np.ndarray
    method: str
    samples: int | None = None
    seed: int | None = None
    std_error_max: float | None = None
    exact_values: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return int(self.values.size)


def _marginal_mask(sums_wo: np.ndarray, wk: float, threshold: float, strict: bool) -> np.ndarray:
    if strict:
        return (sums_wo <= threshold) & (sums_wo + wk > threshold)
    return (sums_wo < threshold) & (sums_wo + wk >= threshold)


def shapley_exact(game: VotingGame, exact_limit: int = EXACT_LIMIT_DEFAULT) -> ShapleyResult:
    """Exact Shapley values by enumeration of all 2^m coalitions.

    Pivotal coalitions are counted per size, then combined with exact
    factorial coefficients, so sum(phi) == 1 holds as rationals.
    """
    w = game.weights.weights
    m = w.size
    if m > exact_limit:
        raise TooLargeError(
            f"exact enumeration limited to m <= {exact_limit}, got {m}; use sampling"
        )
    threshold = game.threshold_weight

    # subset sums and sizes by doubling over validators
    sums = np.zeros(1, dtype=np.float64)
    sizes = np.zeros(1, dtype=np.uint8)
    for k in range(m):
        sums = np.concatenate((sums, sums + w[k]))
        sizes = np.concatenate((sizes, sizes + np.uint8(1)))
    index = np.arange(1 << m, dtype=np.uint32)

    coeff = [Fraction(factorial(s) * factorial(m - s - 1), factorial(m)) for s in range(m)]
    phi: list[Fraction] = []
    for k in range(m):
        without_k = ((index >> np.uint32(k)) & np.uint32(1)) == 0
        sums_wo = sums[without_k]
        pivotal = _marginal_mask(sums_wo, float(w[k]), threshold, game.strict)
        size_counts = np.bincount(sizes[without_k][pivotal], minlength=m)
        phi.append(sum((coeff[s] * int(c) for s, c in enumerate(size_counts)), Fraction(0)))

    if sum(phi, Fraction(0)) != 1:
        raise AssertionError("exact Shapley values must sum to one")
    return ShapleyResult(
        values=np.array([float(f) for f in phi]),
        method="exact",
        exact_values=tuple(phi),
    )


def shapley_sampled(game: VotingGame, samples: int, seed: int) -> ShapleyResult:
    """Monte Carlo Shapley values: the fraction of sampled permutations in
    which each validator is pivotal."""
    if samples < 1000:
        raise InsufficientSamplesError(f"need at least 1000 samples, got {samples}")
    w = game.weights.weights
    counts = _kernels.pivot_counts(w, game.threshold_weight, game.strict, samples, seed)
    if int(counts.sum()) != samples:
        raise AssertionError("every sampled permutation must contribute one pivot")
    values = counts / float(samples)
    std_error_max = float(np.max(np.sqrt(values * (1.0 - values) / samples)))
    return ShapleyResult(
        values=values,
        method="sampled",
        samples=samples,
        seed=seed,
        std_error_max=std_error_max,
    )


def shapley_gini(result: ShapleyResult) -> float:
    """Gini index of the Shapley vector (zero entries tolerated)."""
    return gini(result.values)


def stake_shapley_correlation(wv: WeightVector, result: ShapleyResult) -> float:
    """Pearson correlation between consensus weights and Shapley values."""
    w = wv.weights
    phi = result.values
    if w.size != phi.size:
        raise ValueError("weight and Shapley vectors must align")
    wc = w - w.mean()
    pc = phi - phi.mean()
    var_w = float(np.sum(wc * wc))
    var_p = float(np.sum(pc * pc))
    if var_w == 0.0 or var_p == 0.0:
        raise ZeroVarianceError("correlation undefined for a constant vector")
    return float(np.sum(wc * pc) / np.sqrt(var_w * var_p))
