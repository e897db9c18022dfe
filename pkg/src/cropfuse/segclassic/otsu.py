"""Otsu's global threshold on a 256-level histogram."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateHistogram, DomainError
from ..imagecore import BandImage, BinaryMask, Domain

LEVELS = 256


def quantize(img: BandImage) -> np.ndarray:
    """Unit intensities to integer levels 0..255 (nearest level)."""
    if img.domain is not Domain.UNIT:
        raise DomainError("otsu expects a unit-domain band")
    return np.rint(img.values * (LEVELS - 1)).astype(np.int64)


def otsu_level(levels: np.ndarray) -> int:
    """Level ``k`` maximizing the between-class variance of {<= k} vs {> k}.

    The comparison is carried out in exact integer arithmetic using
    ``sigma_b^2(k) * N^2 = (N*S0 - n0*S)^2 / (n0 * n1)``, so exhaustive
    ties resolve deterministically toward the lowest ``k``.
    """
    hist = np.bincount(levels.ravel(), minlength=LEVELS)
    if np.count_nonzero(hist) < 2:
        raise DegenerateHistogram("image has a single intensity level")
    n_total = int(hist.sum())
    s_total = int(np.dot(hist, np.arange(LEVELS)))
    n0_cum = np.cumsum(hist).tolist()
    s0_cum = np.cumsum(hist * np.arange(LEVELS)).tolist()

    best_k, best_num, best_den = -1, 0, 1
    for k in range(LEVELS - 1):
        n0 = n0_cum[k]
        n1 = n_total - n0
        if n0 == 0 or n1 == 0:
            continue
        diff = n_total * s0_cum[k] - n0 * s_total
        num, den = diff * diff, n0 * n1
        if best_k < 0 or num * best_den > best_num * den:
            best_k, best_num, best_den = k, num, den
    return best_k


def otsu_segment(img: BandImage) -> tuple[float, BinaryMask]:
    """Returns ``(threshold, mask)``; the mask marks pixels brighter than threshold."""
    levels = quantize(img)
    k = otsu_level(levels)
    return k / (LEVELS - 1), BinaryMask(levels > k)
