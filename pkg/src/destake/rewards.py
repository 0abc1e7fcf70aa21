"""Reweighting mechanics beyond raw weights: validator-set capping, epoch
rewards under a stake threshold, and Sybil stake-splitting incentives.

Rewards are alpha * weight per epoch.  The Sybil cost C is a per-additional-
identity cost, so splitting one stake into n identities costs (n-1) * C; the
minimum deterrent cost is the smallest C that makes an equal split no better
than staying whole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

from .errors import EmptySetError, InvalidSplitError
from .model import StakeSnapshot, ValidatorRecord, WeightScheme

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class RewardParams:
    """Per-epoch inflation factor, Sybil cost per extra identity, optional set cap."""

    alpha: float
    sybil_cost: float = 0.0
    cap_M: int | None = None

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.sybil_cost < 0:
            raise ValueError(f"sybil_cost must be non-negative, got {self.sybil_cost}")
        if self.cap_M is not None and self.cap_M < 1:
            raise ValueError(f"cap_M must be a positive integer, got {self.cap_M}")


def select_validator_set(
    candidates: StakeSnapshot | Sequence[ValidatorRecord],
    M: int,
) -> tuple[StakeSnapshot, int]:
    """Pick the top min(M, available) candidates by stake, ties by ascending id.

    Returns the selected set and s_M, the stake of the last admitted candidate
    (the entry threshold).  Zero-stake candidates are never admitted.  The
    result does not depend on the input order.
    """
    if M < 1:
        raise ValueError(f"M must be at least 1, got {M}")
    if isinstance(candidates, StakeSnapshot):
        chain, captured_at = candidates.chain, candidates.captured_at
        pool = list(candidates.validators)
    else:
        chain, captured_at = "candidates", _EPOCH
        pool = [rec for rec in candidates if rec.stake > 0]
    if not pool:
        raise EmptySetError("no stake-bearing candidates to select from")
    pool.sort(key=lambda rec: (-rec.stake, rec.id))
    selected = tuple(pool[: min(M, len(pool))])
    snapshot = StakeSnapshot(chain=chain, captured_at=captured_at, validators=selected)
    return snapshot, selected[-1].stake


def epoch_rewards(
    snapshot: StakeSnapshot,
    scheme: WeightScheme,
    params: RewardParams,
    *,
    s_M: int | None = None,
) -> np.ndarray:
    """Per-validator epoch rewards alpha * w_k, aligned to snapshot order.

    With an entry threshold ``s_M``, every selected validator (stake >= s_M)
    is paid and everyone below it earns zero; the snapshot itself should
    already be cap-selected when params.cap_M is in force.
    """
    weights = scheme.apply(snapshot.stake_array())
    rewards = params.alpha * weights
    if s_M is not None:
        below = np.array([rec.stake < s_M for rec in snapshot.validators])
        rewards[below] = 0.0
    return rewards


@dataclass(frozen=True)
class SybilAnalysis:
    """Outcome of splitting one stake into n equal identities versus staying whole."""

    stake: int
    parts: int
    scheme: WeightScheme
    single_reward: float
    split_reward: float
    min_deterrent_cost: float
    rational_to_split: bool
    sybil_cost: float
    lsw_asymptotic_cost: float | None = None


def sybil_split_analysis(
    S: int, n: int, scheme: WeightScheme, params: RewardParams
) -> SybilAnalysis:
    """Compare the reward of one identity with stake S against n identities of S/n.

    The equal split is the optimum for every concave scheme, so the minimum
    deterrent cost (split - single) / (n - 1) deters every split.  Parts are
    integer token amounts: S must divide evenly into n.
    """
    if not isinstance(S, int) or not isinstance(n, int):
        raise InvalidSplitError("stake and parts must be integers")
    if n < 2:
        raise InvalidSplitError(f"a split needs at least 2 parts, got {n}")
    if S < n:
        raise InvalidSplitError(f"stake {S} cannot fund {n} identities of at least 1 token")
    if S % n != 0:
        raise InvalidSplitError(
            f"stake {S} does not divide into {n} equal integer parts"
        )
    w_single, w_part = scheme.apply(np.array([S, S // n], dtype=np.float64))
    single = params.alpha * float(w_single)
    split = n * params.alpha * float(w_part)
    min_cost = max(0.0, (split - single) / (n - 1))
    rational = split - (n - 1) * params.sybil_cost > single
    asymptote = None
    if scheme.kind == "lsw":
        # reference value only: the exact expression above is the binding bound
        asymptote = params.alpha * math.log(n) / (n - 1)
    return SybilAnalysis(
        stake=S,
        parts=n,
        scheme=scheme,
        single_reward=single,
        split_reward=split,
        min_deterrent_cost=min_cost,
        rational_to_split=rational,
        sybil_cost=params.sybil_cost,
        lsw_asymptotic_cost=asymptote,
    )


def check_split_inequality(
    s_i: int, s_j: int, s_k: int, scheme: WeightScheme, params: RewardParams
) -> bool:
    """Whether w(s_i) > w(s_j) + w(s_k) - C/alpha, i.e. this particular
    two-way split is deterred."""
    for name, value in (("s_i", s_i), ("s_j", s_j), ("s_k", s_k)):
        if not isinstance(value, int) or value <= 0:
            raise InvalidSplitError(f"{name} must be a positive integer, got {value!r}")
    if s_i < s_j + s_k:
        raise InvalidSplitError(f"combined stake {s_i} must cover the parts {s_j} + {s_k}")
    w_i, w_j, w_k = scheme.apply(np.array([s_i, s_j, s_k], dtype=np.float64))
    return bool(w_i > w_j + w_k - params.sybil_cost / params.alpha)
