"""Plain (irreversible) searches used as ground truth."""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence


class UnsortedInput(ValueError):
    pass


class LinearAnswer(NamedTuple):
    first: Optional[int]
    count: int
    found: bool


def linear_oracle(keys: Sequence[int], k: int) -> LinearAnswer:
    first = None
    count = 0
    for i, key in enumerate(keys):
        if key == k:
            if first is None:
                first = i
            count += 1
    return LinearAnswer(first, count, first is not None)


def binary_oracle(keys: Sequence[int], k: int) -> Optional[int]:
    """Index of ``k`` in the strictly increasing ``keys``, or None."""
    for a, b in zip(keys, keys[1:]):
        if not a < b:
            raise UnsortedInput(f"keys are not strictly increasing at {a}, {b}")
    lo, hi = 0, len(keys)
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid] < k:
            lo = mid + 1
        elif keys[mid] > k:
            hi = mid
        else:
            return mid
    return None


def ceil_log2(n: int) -> int:
    """Smallest v with 2**v >= n, for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    v = 0
    while (1 << v) < n:
        v += 1
    return v
