"""Multi-epoch reward compounding and weighted block-proposer sampling.

Each epoch every validator's reward alpha * w(s) restakes into its balance,
with weights recomputed under the scheme; the trace records the Gini of the
consensus weights per epoch (for the linear scheme that equals the stake
Gini, which a pure rescale leaves constant).  Proposers are drawn i.i.d.
proportionally to the initial weights from a seeded generator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import gini
from .model import StakeSnapshot, WeightScheme, WeightVector, compute_weights


@dataclass(frozen=True)
class SimulationConfig:
    epochs: int
    annual_inflation: float
    epochs_per_year: int
    scheme: WeightScheme
    proposer_rounds: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.epochs_per_year < 1:
            raise ValueError(f"epochs_per_year must be >= 1, got {self.epochs_per_year}")
        if self.annual_inflation < 0:
            raise ValueError(f"annual_inflation must be >= 0, got {self.annual_inflation}")
        if self.proposer_rounds < 0:
            raise ValueError(f"proposer_rounds must be >= 0, got {self.proposer_rounds}")

    @property
    def alpha_per_epoch(self) -> float:
        return self.annual_inflation / self.epochs_per_year


@dataclass(frozen=True)
class SimulationTrace:
    """Epoch series (row 0 is the initial state) plus proposer tallies."""

    config: SimulationConfig
    validator_ids: tuple[str, ...]
    stakes: np.ndarray  # (epochs + 1, m) real balances
    gini_series: np.ndarray  # (epochs + 1,) Gini of scheme weights
    richest_median_ratio: np.ndarray  # (epochs + 1,) on stake balances
    proposer_counts: np.ndarray  # (m,) int64 tallies over proposer_rounds

    def __post_init__(self) -> None:
        for name in ("stakes", "gini_series", "richest_median_ratio", "proposer_counts"):
            arr = getattr(self, name)
            arr.setflags(write=False)


def _richest_median(stakes: np.ndarray) -> float:
    asc = np.sort(stakes)
    return float(asc[-1] / asc[(asc.size - 1) // 2])


def run_compounding(snapshot: StakeSnapshot, config: SimulationConfig) -> SimulationTrace:
    """Iterate s_k <- s_k + alpha * w_k(s_k) for the configured epochs."""
    alpha = config.alpha_per_epoch
    scheme = config.scheme
    stakes = snapshot.stake_array()
    m = stakes.size

    all_stakes = np.empty((config.epochs + 1, m), dtype=np.float64)
    gini_series = np.empty(config.epochs + 1, dtype=np.float64)
    ratio_series = np.empty(config.epochs + 1, dtype=np.float64)

    weights = scheme.apply(stakes)
    all_stakes[0] = stakes
    gini_series[0] = gini(weights)
    ratio_series[0] = _richest_median(stakes)
    initial_wv = WeightVector(
        weights=weights, total_weight=float(weights.sum()), scheme=scheme, ids=snapshot.ids
    )

    for epoch in range(1, config.epochs + 1):
        stakes = stakes + alpha * weights
        weights = scheme.apply(stakes)
        all_stakes[epoch] = stakes
        gini_series[epoch] = gini(weights)
        ratio_series[epoch] = _richest_median(stakes)

    if config.proposer_rounds > 0:
        proposer_counts = sample_proposers(initial_wv, config.proposer_rounds, config.seed)
    else:
        proposer_counts = np.zeros(m, dtype=np.int64)

    return SimulationTrace(
        config=config,
        validator_ids=snapshot.ids,
        stakes=all_stakes,
        gini_series=gini_series,
        richest_median_ratio=ratio_series,
        proposer_counts=proposer_counts,
    )


def sample_proposers(wv: WeightVector, rounds: int, seed: int) -> np.ndarray:
    """Tally ``rounds`` i.i.d. proposer draws with probability w_k / W each."""
    if rounds < 0:
        raise ValueError(f"rounds must be >= 0, got {rounds}")
    m = wv.m
    if rounds == 0:
        return np.zeros(m, dtype=np.int64)
    cdf = np.cumsum(wv.weights / wv.total_weight)
    u = np.random.default_rng(seed).random(rounds)
    picks = np.minimum(np.searchsorted(cdf, u, side="right"), m - 1)
    return np.bincount(picks, minlength=m).astype(np.int64)


def write_trace_csv(trace: SimulationTrace, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "gini", "richest_median_ratio"])
        for epoch in range(trace.gini_series.size):
            writer.writerow(
                [
                    epoch,
                    repr(float(trace.gini_series[epoch])),
                    repr(float(trace.richest_median_ratio[epoch])),
                ]
            )


def write_proposers_csv(trace: SimulationTrace, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "count"])
        for vid, count in zip(trace.validator_ids, trace.proposer_counts):
            writer.writerow([vid, int(count)])
