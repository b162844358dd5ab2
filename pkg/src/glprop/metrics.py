"""Ranking and classification metrics: DCG/NDCG, Recall@K, accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidK,
    LengthMismatch,
    ZeroIdeal,
)


@dataclass(frozen=True)
class RankedCategories:
    """Category indices sorted by descending score; ties broken by ascending
    category index so rankings are deterministic."""

    order: np.ndarray
    scores: np.ndarray


def rank_categories(scores) -> RankedCategories:
    scores = np.atleast_1d(np.asarray(scores, dtype=np.float64))
    if scores.size == 0:
        raise EmptyInput("cannot rank an empty score vector")
    order = np.lexsort((np.arange(scores.size), -scores))
    return RankedCategories(order=order, scores=scores)


def dcg(relevances) -> float:
    """Discounted cumulative gain of an ordered relevance list: the first
    item undiscounted, item i (1-based, i >= 2) discounted by log2(i)."""
    rel = np.atleast_1d(np.asarray(relevances, dtype=np.float64))
    if rel.size == 0:
        raise EmptyInput("dcg of an empty list")
    if rel.size == 1:
        return float(rel[0])
    discounts = np.log2(np.arange(2, rel.size + 1))
    return float(rel[0] + np.sum(rel[1:] / discounts))


def ndcg(predicted, truth) -> float:
    """Rank categories by the predicted scores, read off the ground-truth
    probability of each ranked category as its relevance, and normalize by
    the DCG of the truth ranked in its own descending order."""
    predicted = np.atleast_1d(np.asarray(predicted, dtype=np.float64))
    truth = np.atleast_1d(np.asarray(truth, dtype=np.float64))
    if predicted.shape != truth.shape:
        raise DimensionMismatch(
            f"predicted has {predicted.shape[0]} categories, truth has {truth.shape[0]}"
        )
    ideal = dcg(truth[rank_categories(truth).order])
    if ideal <= 0:
        raise ZeroIdeal("ground truth has no positive mass")
    return dcg(truth[rank_categories(predicted).order]) / ideal


def recall_at_k(predicted, truth, k: int) -> float:
    """Overlap of the top-k predicted and top-k ground-truth categories,
    divided by k."""
    predicted = np.atleast_1d(np.asarray(predicted, dtype=np.float64))
    truth = np.atleast_1d(np.asarray(truth, dtype=np.float64))
    if predicted.shape != truth.shape:
        raise DimensionMismatch(
            f"predicted has {predicted.shape[0]} categories, truth has {truth.shape[0]}"
        )
    if not 1 <= k <= predicted.size:
        raise InvalidK(f"k must be in [1, {predicted.size}], got {k}")
    top_pred = set(rank_categories(predicted).order[:k].tolist())
    top_true = set(rank_categories(truth).order[:k].tolist())
    return len(top_pred & top_true) / k


def accuracy(predicted_labels, true_labels) -> float:
    """Fraction of positions where the predicted label equals the true one."""
    predicted_labels = np.atleast_1d(np.asarray(predicted_labels, dtype=np.int64))
    true_labels = np.atleast_1d(np.asarray(true_labels, dtype=np.int64))
    if predicted_labels.shape != true_labels.shape:
        raise LengthMismatch(
            f"{predicted_labels.size} predictions vs {true_labels.size} labels"
        )
    if predicted_labels.size == 0:
        raise EmptyInput("accuracy of empty label lists")
    return float(np.mean(predicted_labels == true_labels))


def argmax_labels(y) -> np.ndarray:
    """Row-wise argmax with ties resolved to the lowest category index."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    return np.argmax(y, axis=1)
