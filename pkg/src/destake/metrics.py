"""Distributional decentralization metrics over a weight vector.

Gini uses the discrete mean-absolute-difference estimator
G = sum_ij |w_i - w_j| / (2 m sum_k w_k), computed via the sorted form.
Nakamoto coefficients come from a greedy descending-weight scan against the
one-third (liveness) and two-thirds (safety) thresholds, which is optimal for
cumulative-sum thresholds.  The rank-size (Zipf) exponent is the negated OLS
slope through (ln r, ln w_r), clamped at zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptySetError, InsufficientPointsError
from .model import StakeSnapshot, WeightScheme, WeightVector, compute_weights


def _values(wv) -> np.ndarray:
    """Accept a WeightVector or raw array-like; validated non-negative, positive total."""
    if isinstance(wv, WeightVector):
        return wv.weights
    arr = np.asarray(wv, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("weights must be one-dimensional")
    if arr.size == 0:
        raise EmptySetError("empty weight vector")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("weights must be finite and non-negative")
    if arr.sum() <= 0:
        raise ValueError("weights must have a positive total")
    return arr


def gini(wv) -> float:
    """Discrete Gini index in [0, 1); 0 iff all weights are equal.

    Zero entries are tolerated so the same estimator serves Shapley vectors.
    """
    w = np.sort(_values(wv))
    if w[0] == w[-1]:
        return 0.0  # exact: rank products would otherwise leave ~1e-16 residue
    m = w.size
    total = float(w.sum())
    ranks = np.arange(1, m + 1, dtype=np.float64)
    return float((2.0 * np.sum(ranks * w) - (m + 1) * total) / (m * total))


def lorenz_curve(wv) -> np.ndarray:
    """(m+1, 2) array of (cumulative validator share, cumulative weight share) pairs."""
    w = np.sort(_values(wv))
    m = w.size
    x = np.arange(0, m + 1, dtype=np.float64) / m
    y = np.concatenate(([0.0], np.cumsum(w) / w.sum()))
    return np.column_stack((x, y))


def write_lorenz_csv(wv, path) -> None:
    points = lorenz_curve(wv)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["validator_share", "weight_share"])
        for x, y in points:
            writer.writerow([repr(float(x)), repr(float(y))])


def _greedy_count(w: np.ndarray, two_thirds: bool) -> int:
    # greedy descending scan; the threshold uses the same accumulation as the
    # prefix sums so integer-weight boundary cases stay exact
    cs = np.cumsum(np.sort(w)[::-1])
    total = float(cs[-1])
    threshold = 2.0 * total / 3.0 if two_thirds else total / 3.0
    return int(np.searchsorted(cs, threshold, side="left")) + 1


def nakamoto_liveness(wv) -> tuple[int, float]:
    """Smallest validator count whose weight reaches one-third of the total."""
    w = _values(wv)
    count = _greedy_count(w, two_thirds=False)
    return count, 100.0 * count / w.size


def nakamoto_safety(wv) -> tuple[int, float]:
    """Smallest validator count whose weight reaches the two-thirds quorum."""
    w = _values(wv)
    count = _greedy_count(w, two_thirds=True)
    return count, 100.0 * count / w.size


def hhi(wv) -> float:
    """Sum of squared normalized weights, in [1/m, 1]; 1/m iff uniform."""
    w = _values(wv)
    shares = w / w.sum()
    return float(shares @ shares)


def zipf_fit(wv) -> tuple[float, float]:
    """OLS fit of ln(weight) against ln(rank) over descending weights.

    Returns (Z, r2) where Z is the negated slope clamped at zero.  A constant
    vector fits exactly (r2 = 1, Z = 0).  Needs at least two points.
    """
    w = _values(wv)
    if w.size < 2:
        raise InsufficientPointsError("rank-size fit needs at least two weights")
    if np.any(w <= 0):
        raise ValueError("rank-size fit needs strictly positive weights")
    desc = np.sort(w)[::-1]
    if desc[0] == desc[-1]:
        return 0.0, 1.0  # constant weights: flat line fits exactly
    x = np.log(np.arange(1, w.size + 1, dtype=np.float64))
    y = np.log(desc)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.sum(xc * xc))
    slope = float(np.sum(xc * yc)) / sxx
    residual = yc - slope * xc
    ss_res = float(np.sum(residual * residual))
    ss_tot = float(np.sum(yc * yc))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return max(0.0, -slope), r2


def epsilon_delta(wv, delta: float) -> float:
    """Weight disparity: max weight over the delta-th percentile weight, minus one.

    The percentile is counted from the poorest validator (delta=0 picks the
    poorest, delta=50 the lower median).
    """
    if not 0 <= delta < 100:
        raise ValueError(f"delta must be in [0, 100), got {delta}")
    w = np.sort(_values(wv))
    idx = int(math.floor(delta / 100.0 * (w.size - 1)))
    if w[idx] <= 0:
        raise ValueError("percentile weight is zero; disparity undefined")
    return float(w[-1] / w[idx] - 1.0)


@dataclass(frozen=True)
class MetricsReport:
    """All distributional metrics (plus optional coalition metrics) for one
    (snapshot, scheme) pair."""

    chain: str
    scheme: str
    m: int
    gini: float
    nakamoto_liveness_count: int
    nakamoto_liveness_pct: float
    nakamoto_safety_count: int
    nakamoto_safety_pct: float
    hhi: float
    zipf: float
    zipf_r2: float
    epsilon_at: dict[int, float]
    shapley_liveness_gini: float | None = None
    shapley_safety_gini: float | None = None
    shapley_method: str | None = None
    shapley_samples: int | None = None
    shapley_seed: int | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        out = {
            "chain": self.chain,
            "scheme": self.scheme,
            "m": self.m,
            "gini": clean(self.gini),
            "nakamoto_liveness_count": self.nakamoto_liveness_count,
            "nakamoto_liveness_pct": clean(self.nakamoto_liveness_pct),
            "nakamoto_safety_count": self.nakamoto_safety_count,
            "nakamoto_safety_pct": clean(self.nakamoto_safety_pct),
            "hhi": clean(self.hhi),
            "zipf": clean(self.zipf),
            "zipf_r2": clean(self.zipf_r2),
            "epsilon_at": {str(k): clean(v) for k, v in sorted(self.epsilon_at.items())},
        }
        if self.shapley_method is not None:
            out["shapley"] = {
                "method": self.shapley_method,
                "samples": self.shapley_samples,
                "seed": self.shapley_seed,
                "liveness_gini": clean(self.shapley_liveness_gini),
                "safety_gini": clean(self.shapley_safety_gini),
            }
        return out


def full_report(
    snapshot: StakeSnapshot,
    scheme: WeightScheme,
    *,
    shapley: str = "off",
    samples: int = 100_000,
    seed: int = 0,
    exact_limit: int = 20,
    literal_thresholds: bool = False,
) -> MetricsReport:
    """Compose every metric for one (snapshot, scheme) pair.

    ``shapley`` is "off", "sampled" or "exact".  Deterministic for a fixed
    (samples, seed).  For a singleton set the rank-size exponent is undefined
    and reported as NaN (null in JSON).
    """
    wv = compute_weights(snapshot, scheme)
    if wv.m >= 2:
        z, r2 = zipf_fit(wv)
    else:
        z, r2 = float("nan"), float("nan")
    nl_count, nl_pct = nakamoto_liveness(wv)
    ns_count, ns_pct = nakamoto_safety(wv)
    report = dict(
        chain=snapshot.chain,
        scheme=scheme.label,
        m=wv.m,
        gini=gini(wv),
        nakamoto_liveness_count=nl_count,
        nakamoto_liveness_pct=nl_pct,
        nakamoto_safety_count=ns_count,
        nakamoto_safety_pct=ns_pct,
        hhi=hhi(wv),
        zipf=z,
        zipf_r2=r2,
        epsilon_at={0: epsilon_delta(wv, 0), 50: epsilon_delta(wv, 50)},
    )
    if shapley not in ("off", "sampled", "exact"):
        raise ValueError(f"shapley mode must be off, sampled or exact, got {shapley!r}")
    if shapley != "off":
        from . import shapley as coalition

        results = {}
        for name, game in (
            ("liveness", coalition.VotingGame.liveness(wv, literal=literal_thresholds)),
            ("safety", coalition.VotingGame.safety(wv, literal=literal_thresholds)),
        ):
            if shapley == "exact":
                results[name] = coalition.shapley_exact(game, exact_limit=exact_limit)
            else:
                results[name] = coalition.shapley_sampled(game, samples=samples, seed=seed)
        report.update(
            shapley_liveness_gini=coalition.shapley_gini(results["liveness"]),
            shapley_safety_gini=coalition.shapley_gini(results["safety"]),
            shapley_method=shapley,
            shapley_samples=samples if shapley == "sampled" else None,
            shapley_seed=seed if shapley == "sampled" else None,
        )
    return MetricsReport(**report)
