"""Pure numpy pivot-counting kernel for permutation-sampled Shapley values.

Randomness layout (shared with the compiled twin, bit-for-bit):

    s0      = mix64(seed + GOLDEN)
    key_j   = mix64(s0 ^ ((j + 1) * GOLDEN))        per-permutation substream
    x(j, t) = mix64(key_j + (t + 1) * GOLDEN)       counter-based draw at step t

where mix64 is the splitmix64 finalizer and all arithmetic wraps mod 2**64.
Permutation j is a lazy Fisher-Yates walk: at step t the entry drawn uniformly
from positions [t, m) arrives, its weight is accumulated, and the permutation
stops at the entry whose arrival crosses the threshold (the pivot).  Because
every draw is a pure function of (seed, j, t), results do not depend on chunk
sizes, thread scheduling or backend.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

_CHUNK = 16384


def _mix_u64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def pivot_counts(
    weights: np.ndarray,
    threshold: float,
    strict: bool,
    n_samples: int,
    seed: int,
) -> np.ndarray:
    """Count, per validator, the sampled permutations in which it is pivotal."""
    w = np.ascontiguousarray(weights, dtype=np.float64)
    m = w.size
    counts = np.zeros(m, dtype=np.int64)
    s0 = _mix_int((seed & _MASK) + _GOLDEN)
    identity = np.arange(m, dtype=np.int32)

    done = 0
    while done < n_samples:
        b = min(_CHUNK, n_samples - done)
        j = np.arange(done, done + b, dtype=np.uint64)
        keys = _mix_u64(np.uint64(s0) ^ ((j + np.uint64(1)) * np.uint64(_GOLDEN)))

        perm = np.tile(identity, (b, 1))
        rows = np.arange(b)
        acc = np.zeros(b, dtype=np.float64)
        pivots = np.zeros(b, dtype=np.int64)
        alive = np.ones(b, dtype=bool)

        for t in range(m):
            step = ((t + 1) * _GOLDEN) & _MASK
            x = _mix_u64(keys + np.uint64(step))
            r = (x % np.uint64(m - t)).astype(np.int64) + t
            tmp = perm[rows, t].copy()
            perm[rows, t] = perm[rows, r]
            perm[rows, r] = tmp
            arrived = perm[:, t]
            acc = acc + np.where(alive, w[arrived], 0.0)
            crossed = acc > threshold if strict else acc >= threshold
            newly = alive & crossed
            if newly.any():
                pivots[newly] = arrived[newly]
                alive &= ~newly
            if not alive.any():
                break

        if alive.any():
            raise AssertionError("threshold never crossed; threshold must be < total weight")
        counts += np.bincount(pivots, minlength=m)
        done += b
    return counts
