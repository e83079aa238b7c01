"""Brute-force Tunstall builders used to cross-check the queue-based ones.

Each step scans every current leaf for the one to split.  Node creation and
priority arithmetic are shared with :mod:`tunstall.builder`; the selection
logic is not.
"""
from __future__ import annotations

from typing import Optional

from .builder import check_leaf_target
from .errors import BadLeafTarget
from .forest import ParseForest
from .model import PriorityScheme, SourceModel, bernoulli


def _pop_min(leaves: list) -> tuple:
    i = min(range(len(leaves)), key=leaves.__getitem__)
    leaves[i], leaves[-1] = leaves[-1], leaves[i]
    return leaves.pop()


def naive_build(p0: float, n: int) -> ParseForest:
    """Split the most probable leaf until the tree has ``n`` leaves."""
    if n < 2:
        raise BadLeafTarget(f"binary tree needs n >= 2 leaves, got {n}")
    model = bernoulli(p0)
    probs = [em.prob for em in model.emissions[0]]
    forest = ParseForest.with_roots(model)
    prob = {0: 1.0}
    leaves = [(-1.0, 0)]
    while len(leaves) < n:
        _, v = _pop_min(leaves)
        first = forest.split(v, model)
        for i, p in enumerate(probs):
            prob[first + i] = prob[v] * p
            leaves.append((-prob[first + i], first + i))
    return forest


def naive_build_general(
    model: SourceModel, scheme: Optional[PriorityScheme] = None, n: int = 0
) -> ParseForest:
    """Split the leaf of least ``(priority, id)`` across all trees."""
    if scheme is None:
        scheme = PriorityScheme.zeros(model.state_count)
    scheme.check_model(model)
    check_leaf_target(model, n)
    D = model.alphabet_size
    forest = ParseForest.with_roots(model)
    c = scheme.offsets
    leaves: list[tuple[float, int]] = []

    def split(v: int) -> None:
        first = forest.split(v, model)
        j = forest.tree[v]
        for child in range(first, first + D):
            leaves.append((c[j][forest.state[child]] + forest.neg_log_prob[child], child))

    for root in range(model.state_count):
        split(root)
    while len(leaves) + D - 1 <= n:
        _, v = _pop_min(leaves)
        split(v)
    return forest
