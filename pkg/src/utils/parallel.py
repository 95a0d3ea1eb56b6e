"""Order-preserving parallel map used by per-document stages and EBM bags."""

import logging
from typing import Callable, List, Sequence, TypeVar

from joblib import Parallel, delayed

logger = logging.getLogger("gamsum.utils.parallel")

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply ``func`` to every item, returning results in input order.

    Args:
        func: Pure function to apply
        items: Inputs
        workers: Maximum parallel jobs; 1 runs inline

    Returns:
        Results aligned with ``items``
    """
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {workers} workers")
    return Parallel(n_jobs=workers)(delayed(func)(item) for item in items)
