"""Small statistical estimators shared by sessions and campaigns."""
from __future__ import annotations

import math
from collections.abc import Sequence

from . import kernels
from .protocol import as_codes


class UndefinedQBER(ValueError):
    pass


def qber(alice_sample: Sequence[int], bob_sample: Sequence[int]) -> float:
    """Fraction of disagreeing bits in a publicly compared sample."""
    if len(alice_sample) != len(bob_sample):
        raise ValueError(f"length mismatch: {len(alice_sample)} vs {len(bob_sample)}")
    if not alice_sample:
        raise UndefinedQBER("QBER of an empty sample is undefined")
    return kernels.hamming(as_codes(alice_sample), as_codes(bob_sample)) / len(alice_sample)


def bernoulli_stderr(p: float, n: int) -> float:
    if n < 1:
        return 0.0
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def mean_and_stderr(values: Sequence[float]) -> tuple[float, float]:
    m = len(values)
    if m == 0:
        return 0.0, 0.0
    mean = math.fsum(values) / m
    if m == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (m - 1)
    return mean, math.sqrt(var / m)


def intercept_detection_probability(sample_bits: int) -> float:
    """Chance that random-basis intercept-resend shows at least one error in ``s`` sampled bits."""
    return 1.0 - 0.75**sample_bits


def multicopy_misidentification(copies: int) -> float:
    """Chance that ``k`` computational-basis readouts of a superposed qubit all agree."""
    return 2.0 ** (1 - copies)
