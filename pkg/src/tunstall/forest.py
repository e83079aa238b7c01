"""Parse forests: one D-ary parsing tree per source state.

Nodes are stored column-wise and numbered globally in creation order.  The
roots are nodes ``0..s-1`` (root ``j`` starts tree ``j`` in state ``j``) and a
split appends the node's D children as consecutive ids in symbol order, so a
node's children are ``first_child[v] + symbol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

from .model import SourceModel

LEAF = -1


class ParseNode(NamedTuple):
    id: int
    tree: int
    parent: Optional[int]
    symbol_from_parent: Optional[int]
    state: int
    neg_log_prob: float
    children: tuple[int, ...]

    @property
    def prob(self) -> float:
        return math.exp(-self.neg_log_prob)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=True)
class ParseForest:
    alphabet_size: int
    state_count: int
    tree: list[int] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    symbol: list[int] = field(default_factory=list)
    state: list[int] = field(default_factory=list)
    neg_log_prob: list[float] = field(default_factory=list)
    first_child: list[int] = field(default_factory=list)

    @classmethod
    def with_roots(cls, model: SourceModel) -> ParseForest:
        forest = cls(model.alphabet_size, model.state_count)
        for j in range(model.state_count):
            forest.tree.append(j)
            forest.parent.append(LEAF)
            forest.symbol.append(LEAF)
            forest.state.append(j)
            forest.neg_log_prob.append(0.0)
            forest.first_child.append(LEAF)
        return forest

    def __len__(self) -> int:
        return len(self.tree)

    def split(self, v: int, model: SourceModel) -> int:
        """Give leaf ``v`` its D children; return the id of the first one."""
        if self.first_child[v] != LEAF:
            raise ValueError(f"node {v} is already internal")
        first = len(self.tree)
        j, k, base = self.tree[v], self.state[v], self.neg_log_prob[v]
        D = self.alphabet_size
        self.tree.extend([j] * D)
        self.parent.extend([v] * D)
        self.symbol.extend(range(D))
        self.state.extend(model.next_states[k])
        self.neg_log_prob.extend([base + nl for nl in model.neg_log[k]])
        self.first_child.extend([LEAF] * D)
        self.first_child[v] = first
        return first

    def node(self, v: int) -> ParseNode:
        fc = self.first_child[v]
        parent = self.parent[v]
        return ParseNode(
            id=v,
            tree=self.tree[v],
            parent=None if parent == LEAF else parent,
            symbol_from_parent=None if parent == LEAF else self.symbol[v],
            state=self.state[v],
            neg_log_prob=self.neg_log_prob[v],
            children=() if fc == LEAF else tuple(range(fc, fc + self.alphabet_size)),
        )

    def nodes(self) -> Iterator[ParseNode]:
        return (self.node(v) for v in range(len(self)))

    def is_leaf(self, v: int) -> bool:
        return self.first_child[v] == LEAF

    def leaves(self, tree: Optional[int] = None) -> list[int]:
        fc, tr = self.first_child, self.tree
        return [v for v in range(len(fc)) if fc[v] == LEAF and (tree is None or tr[v] == tree)]

    def leaf_count(self, tree: Optional[int] = None) -> int:
        return len(self.leaves(tree))

    def internal_nodes(self, tree: Optional[int] = None) -> list[int]:
        fc, tr = self.first_child, self.tree
        return [v for v in range(len(fc)) if fc[v] != LEAF and (tree is None or tr[v] == tree)]

    def path(self, v: int) -> tuple[int, ...]:
        """Symbols read from the root of ``v``'s tree down to ``v``."""
        out = []
        while self.parent[v] != LEAF:
            out.append(self.symbol[v])
            v = self.parent[v]
        return tuple(reversed(out))

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] != LEAF:
            v = self.parent[v]
            d += 1
        return d

    def leaf_paths(self, tree: int) -> dict[str, float]:
        """Map of leaf path (as a digit string, for D <= 10) to leaf probability."""
        return {
            "".join(map(str, self.path(v))): math.exp(-self.neg_log_prob[v])
            for v in self.leaves(tree)
        }

    def expected_length(self, tree: int) -> float:
        """Expected parse length, summed over leaves as probability times depth."""
        return math.fsum(math.exp(-self.neg_log_prob[v]) * self.depth(v) for v in self.leaves(tree))
