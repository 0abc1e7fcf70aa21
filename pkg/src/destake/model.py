"""Core domain types: validators, snapshots, weight schemes and weight vectors.

Stakes are exact integers in the chain's base token units; consensus weights
are double-precision reals produced by a :class:`WeightScheme`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import EmptySetError, NonPositiveWeightError, ParseError, ZeroStakeError

SCHEME_KINDS = ("linear", "srsw", "lsw", "power")


@dataclass(frozen=True)
class ValidatorRecord:
    """One validator: opaque id plus its staked tokens in base units."""

    id: str
    stake: int

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ParseError("validator id must be a non-empty string")
        if isinstance(self.stake, bool) or not isinstance(self.stake, int):
            raise ParseError(f"stake of {self.id!r} must be an integer, got {self.stake!r}")
        if self.stake < 0:
            raise ZeroStakeError(f"validator {self.id!r} has non-positive stake {self.stake}")


@dataclass(frozen=True)
class StakeSnapshot:
    """One chain's validator set at one timestamp.

    Validators keep the order they were given; ingestion normalizes to
    descending stake with ties broken by ascending id.
    """

    chain: str
    captured_at: datetime
    validators: tuple[ValidatorRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "validators", tuple(self.validators))
        if not self.validators:
            raise EmptySetError("snapshot has no validators")
        seen: set[str] = set()
        for rec in self.validators:
            if rec.id in seen:
                raise ParseError(f"duplicate validator id {rec.id!r}")
            seen.add(rec.id)
            if rec.stake == 0:
                raise ZeroStakeError(f"validator {rec.id!r} has non-positive stake 0")
        if self.captured_at.tzinfo is None:
            object.__setattr__(
                self, "captured_at", self.captured_at.replace(tzinfo=timezone.utc)
            )
        else:
            object.__setattr__(
                self, "captured_at", self.captured_at.astimezone(timezone.utc)
            )

    @property
    def m(self) -> int:
        return len(self.validators)

    @property
    def stakes(self) -> tuple[int, ...]:
        return tuple(rec.stake for rec in self.validators)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(rec.id for rec in self.validators)

    @property
    def total_stake(self) -> int:
        return sum(rec.stake for rec in self.validators)

    def stake_array(self) -> np.ndarray:
        """Stakes as float64; values beyond 2**53 lose precision, as any real weight does."""
        return np.array([float(rec.stake) for rec in self.validators], dtype=np.float64)


@dataclass(frozen=True)
class WeightScheme:
    """A stake-to-weight transformation: linear, srsw (sqrt), lsw (log) or power.

    ``power`` carries an exponent in (0, 1]; exponent 1 is bit-identical to
    linear and exponent 1/2 to srsw.  ``lsw_offset`` selects log(1+s) (the
    default, positive for every stake >= 1) over log(s).
    """

    kind: str
    exponent: float | None = None
    lsw_offset: bool = True

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "power":
            if self.exponent is None:
                raise ValueError("power scheme requires an exponent")
            exponent = float(self.exponent)
            if not 0.0 < exponent <= 1.0:
                raise ValueError(f"power exponent must be in (0, 1], got {exponent}")
            object.__setattr__(self, "exponent", exponent)
        elif self.exponent is not None:
            raise ValueError(f"{self.kind} scheme does not take an exponent")

    @classmethod
    def linear(cls) -> WeightScheme:
        return cls("linear")

    @classmethod
    def srsw(cls) -> WeightScheme:
        return cls("srsw")

    @classmethod
    def lsw(cls, offset: bool = True) -> WeightScheme:
        return cls("lsw", lsw_offset=offset)

    @classmethod
    def power(cls, exponent: float) -> WeightScheme:
        return cls("power", exponent=exponent)

    @property
    def label(self) -> str:
        if self.kind == "power":
            # exponents 1 and 1/2 are bit-identical to linear and srsw
            if self.exponent == 1.0:
                return "linear"
            if self.exponent == 0.5:
                return "srsw"
            return f"power{self.exponent:g}"
        if self.kind == "lsw" and not self.lsw_offset:
            return "lsw-nooffset"
        return self.kind

    def apply(self, stakes) -> np.ndarray:
        """Transform positive stake values (ints or reals) into weights.

        Raises NonPositiveWeightError when any input or output weight is <= 0,
        e.g. lsw without offset on a stake of 1.
        """
        s = np.asarray(stakes, dtype=np.float64)
        if s.ndim != 1:
            raise ValueError("stakes must be one-dimensional")
        if s.size == 0:
            raise EmptySetError("cannot weight an empty stake vector")
        if not np.all(s > 0):
            bad = int(np.argmin(s > 0))
            raise NonPositiveWeightError(f"stake at position {bad} is not positive")
        if self.kind == "linear":
            w = s.copy()
        elif self.kind == "srsw":
            w = np.sqrt(s)
        elif self.kind == "lsw":
            w = np.log1p(s) if self.lsw_offset else np.log(s)
        else:
            # keep power(1) == linear and power(1/2) == srsw bit-identical
            if self.exponent == 1.0:
                w = s.copy()
            elif self.exponent == 0.5:
                w = np.sqrt(s)
            else:
                w = s**self.exponent
        if not np.all(w > 0):
            bad = int(np.argmin(w > 0))
            raise NonPositiveWeightError(
                f"{self.label} weight of stake {s[bad]:g} at position {bad} is not positive"
            )
        return w


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Per-validator weights aligned to snapshot order, plus their total."""

    weights: np.ndarray
    total_weight: float
    scheme: WeightScheme
    ids: tuple[str, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise EmptySetError("weight vector must hold at least one weight")
        if not np.all(w > 0):
            raise NonPositiveWeightError("all weights must be positive")
        total = float(self.total_weight)
        if abs(total - float(w.sum())) > 1e-12 * max(1.0, abs(total)):
            raise ValueError("total_weight does not match the sum of weights")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total_weight", total)
        if self.ids is not None and len(self.ids) != w.size:
            raise ValueError("ids length does not match weights")

    @property
    def m(self) -> int:
        return int(self.weights.size)

    def __len__(self) -> int:
        return self.m


def compute_weights(snapshot: StakeSnapshot, scheme: WeightScheme) -> WeightVector:
    """Weight every validator in the snapshot under the scheme, order preserved."""
    w = scheme.apply(snapshot.stake_array())
    return WeightVector(
        weights=w, total_weight=float(w.sum()), scheme=scheme, ids=snapshot.ids
    )


def quorum_threshold(wv: WeightVector) -> float:
    """Minimum cumulative weight of a quorum certificate: two-thirds of total weight."""
    return 2.0 * wv.total_weight / 3.0
