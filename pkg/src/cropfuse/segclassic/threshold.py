from __future__ import annotations

import numpy as np

from ..errors import OutOfRange
from ..imagecore import BinaryMask, LikelihoodMask


def apply_threshold(q: LikelihoodMask, t: float) -> BinaryMask:
    """Hard decision: 1 where likelihood >= t, else 0."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise OutOfRange(f"threshold must lie in [0, 1], got {t}")
    return BinaryMask(q.values >= t)


def to_likelihood(mask: BinaryMask) -> LikelihoodMask:
    return LikelihoodMask(mask.values.astype(np.float32))
