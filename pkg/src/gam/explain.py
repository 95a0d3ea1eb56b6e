"""
Explanations of an additive model: importance ratios, shape tables and
per-sentence contributions.
"""

import logging
import math
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import expit

from src.errors import ZeroImportanceError
from src.gam.model import INTERCEPT, AdditiveModel, TermKind

logger = logging.getLogger("gamsum.gam.explain")


class VariationStatistic(Enum):
    """How a term's variation over a dataset is measured."""

    STD = "std"
    MAD = "mad"


class TermImportance(NamedTuple):
    term: str
    kind: TermKind
    ratio: float


class ShapeTable(NamedTuple):
    """
    Plot-ready values of one term.

    Main tables have one row per bin. Pair tables are in long format, one
    row per (bin_i, bin_j) cell; ``grid()`` pivots them to a matrix.
    """

    term: str
    kind: TermKind
    frame: pd.DataFrame

    def grid(self) -> pd.DataFrame:
        if self.kind is not TermKind.PAIR:
            raise ValueError("only pair tables pivot to a grid")
        return self.frame.pivot(index="center_i", columns="center_j", values="contribution")


def _variation(values: np.ndarray, statistic: VariationStatistic) -> float:
    if statistic is VariationStatistic.MAD:
        return float(np.mean(np.abs(values - values.mean())))
    return float(np.std(values))


def importance_ratios(
    model: AdditiveModel,
    x: np.ndarray,
    statistic: VariationStatistic = VariationStatistic.STD,
) -> List[TermImportance]:
    """
    Normalized variation of every term's contribution over a dataset.

    Args:
        model: Finalized model
        x: Rows to measure over (any subset: a split, a document, the corpus)
        statistic: Standard deviation, or mean absolute deviation

    Returns:
        Ratios summing to 1, largest first (ties keep summation order)

    Raises:
        ZeroImportanceError: No term varies over ``x``
    """
    rows = np.asarray(x, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("importance_ratios needs a non-empty dataset")
    terms = model.terms()
    contributions = model.term_contributions(rows)
    variations = [_variation(contributions[:, k], statistic) for k in range(len(terms))]
    total = math.fsum(variations)
    if not terms or total <= 0.0:
        raise ZeroImportanceError("every term contributes zero variation on this dataset")

    ranked = sorted(range(len(terms)), key=lambda k: (-variations[k], k))
    return [TermImportance(terms[k].name, terms[k].kind, variations[k] / total) for k in ranked]


def importance_frame(importances: Sequence[TermImportance]) -> pd.DataFrame:
    """Importance list as a (term, kind, ratio) table."""
    return pd.DataFrame(
        {
            "term": [imp.term for imp in importances],
            "kind": [imp.kind.value for imp in importances],
            "ratio": [imp.ratio for imp in importances],
        }
    )


def export_shape_tables(model: AdditiveModel) -> List[ShapeTable]:
    """
    One table per retained term, in summation order.

    Contributions equal what decompose returns at each bin center.
    """
    tables: List[ShapeTable] = []
    for term in model.terms():
        if term.kind is TermKind.MAIN:
            (f,) = term.features
            edges = model.binner.edges(f)
            frame = pd.DataFrame(
                {
                    "bin": np.arange(edges.size - 1),
                    "lower": edges[:-1],
                    "upper": edges[1:],
                    "center": model.binner.centers(f),
                    "contribution": model.mains[f],
                }
            )
        else:
            i, j = term.features
            edges_i, edges_j = model.pair_binner.edges(i), model.pair_binner.edges(j)
            centers_i, centers_j = model.pair_binner.centers(i), model.pair_binner.centers(j)
            bi, bj = np.meshgrid(np.arange(centers_i.size), np.arange(centers_j.size), indexing="ij")
            bi, bj = bi.ravel(), bj.ravel()
            frame = pd.DataFrame(
                {
                    "bin_i": bi,
                    "bin_j": bj,
                    "lower_i": edges_i[:-1][bi],
                    "upper_i": edges_i[1:][bi],
                    "lower_j": edges_j[:-1][bj],
                    "upper_j": edges_j[1:][bj],
                    "center_i": centers_i[bi],
                    "center_j": centers_j[bj],
                    "contribution": model.pairs[(i, j)][bi, bj],
                }
            )
        tables.append(ShapeTable(term.name, term.kind, frame))
    return tables


def explain_sentences(
    model: AdditiveModel,
    x: np.ndarray,
    row_labels: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """
    Local explanations: the contribution of every term for every row.

    Args:
        model: Finalized model
        x: Feature rows
        row_labels: Optional index values (e.g. sentence ids)

    Returns:
        Columns intercept, one per term, logit and probability
    """
    rows = np.asarray(x, dtype=np.float64)
    contributions = model.term_contributions(rows)
    frame = pd.DataFrame(contributions, columns=[t.name for t in model.terms()])
    frame.insert(0, INTERCEPT, model.intercept)
    logits = model.predict_logit(rows)
    frame["logit"] = logits
    frame["probability"] = expit(logits)
    if row_labels is not None:
        frame.index = list(row_labels)
    return frame
