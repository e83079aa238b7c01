"""Linear-time Tunstall tree construction.

``build_binary`` is the two-queue algorithm for Bernoulli sources: the left
children created by successive splits have nonincreasing probability, and so
do the right children, so the most probable leaf is always at the head of one
of two FIFO queues.

``build_general`` extends this to D-ary Markov sources with one FIFO per
queue class (tree, parent state, conditional probability, child state) and a
binary heap over the queue heads.  Nodes are split in order of the smallest
``(priority, node id)``.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .errors import BadLeafTarget
from .forest import ParseForest
from .model import PriorityScheme, SourceModel, bernoulli


def build_binary(p0: float, n: int) -> ParseForest:
    """Optimal ``n``-leaf Tunstall tree for a Bernoulli(``p0``) source."""
    if n < 2:
        raise BadLeafTarget(f"binary tree needs n >= 2 leaves, got {n}")
    model = bernoulli(p0)
    p0, p1 = (em.prob for em in model.emissions[0])
    forest = ParseForest.with_roots(model)
    prob = [1.0]
    left: deque[int] = deque()
    right: deque[int] = deque()

    def split(v: int) -> None:
        first = forest.split(v, model)
        pv = prob[v]
        prob.append(pv * p0)
        prob.append(pv * p1)
        left.append(first)
        right.append(first + 1)

    split(0)
    z = 2
    # Every split takes one node from a queue and puts one in each, so
    # neither queue ever runs dry.
    while z < n:
        lh, rh = left[0], right[0]
        if prob[lh] > prob[rh] or (prob[lh] == prob[rh] and lh < rh):
            split(left.popleft())
        else:
            split(right.popleft())
        z += 1
    return forest


@dataclass
class BuildStats:
    splits: int = 0
    root_splits: int = 0
    pq_removals: int = 0
    pq_inserts: int = 0
    fifo_enqueues: int = 0
    # Inserts that landed ahead of the queue tail.  Zero for admissible
    # schemes up to rounding; see model.is_admissible.
    reordered_inserts: int = 0
    stale_entries: int = 0
    max_fifo_inversion: float = 0.0
    max_order_drop: float = 0.0


class BuilderState:
    """Queues, heap and partial forest of one generalized build.

    Construction splits every root.  Each :meth:`step` then splits the head
    of the queue at the top of the heap.
    """

    def __init__(self, model: SourceModel, scheme: PriorityScheme):
        scheme.check_model(model)
        self.model = model
        self.scheme = scheme
        self.forest = ParseForest.with_roots(model)
        self.prio: list[float] = [scheme.offsets[j][j] for j in range(model.state_count)]
        self.queues: list[deque[int]] = [deque() for _ in range(model.g)]
        self.heap: list[tuple[float, int, int]] = []
        self.stats = BuildStats()
        self._last_split: Optional[float] = None

        for root in range(model.state_count):
            self._expand(root)
            self.stats.root_splits += 1
        self.size = model.alphabet_size * model.state_count
        self.heap = [(self.prio[q[0]], q[0], c) for c, q in enumerate(self.queues) if q]
        heapq.heapify(self.heap)
        self.stats.pq_inserts += len(self.heap)

    def _expand(self, v: int) -> list[int]:
        """Split ``v`` and route its children; return classes whose head changed."""
        forest, prio, queues = self.forest, self.prio, self.queues
        first = forest.split(v, self.model)
        j, k = forest.tree[v], forest.state[v]
        offsets = self.scheme.offsets[j]
        classes = self.model.class_index[j][k]
        changed = []
        stats = self.stats
        for i, c in enumerate(classes):
            child = first + i
            f = offsets[forest.state[child]] + forest.neg_log_prob[child]
            prio.append(f)
            q = queues[c]
            stats.fifo_enqueues += 1
            if not q:
                q.append(child)
                if c not in changed:
                    changed.append(c)
            elif f >= prio[q[-1]]:
                q.append(child)
            else:
                stats.max_fifo_inversion = max(stats.max_fifo_inversion, prio[q[-1]] - f)
                stats.reordered_inserts += 1
                # child has the largest id, so it goes after every equal key
                pos = len(q)
                while pos and prio[q[pos - 1]] > f:
                    pos -= 1
                q.insert(pos, child)
                if pos == 0 and c not in changed:
                    changed.append(c)
        stats.splits += 1
        return changed

    def _push(self, c: int) -> None:
        head = self.queues[c][0]
        heapq.heappush(self.heap, (self.prio[head], head, c))
        self.stats.pq_inserts += 1

    def head_entry(self) -> tuple[float, int, int]:
        """``(priority, node, class)`` of the next node to split."""
        heap, queues = self.heap, self.queues
        while True:
            f, head, c = heap[0]
            q = queues[c]
            if q and q[0] == head:
                return f, head, c
            heapq.heappop(heap)
            self.stats.pq_removals += 1
            self.stats.stale_entries += 1

    def step(self) -> int:
        """Split the minimum-priority leaf; return its id."""
        f, head, c = self.head_entry()
        heapq.heappop(self.heap)
        self.stats.pq_removals += 1
        q = self.queues[c]
        q.popleft()
        if self._last_split is not None and f < self._last_split:
            self.stats.max_order_drop = max(self.stats.max_order_drop, self._last_split - f)
        self._last_split = f
        for c2 in self._expand(head):
            if c2 != c:
                self._push(c2)
        if q:
            self._push(c)
        self.size += self.model.alphabet_size - 1
        return head

    def run(self, n: int) -> ParseForest:
        D = self.model.alphabet_size
        while self.size + D - 1 <= n:
            self.step()
        return self.forest

    def live_heads(self) -> list[tuple[float, int, int]]:
        """Valid heap entries ``(priority, head node, class)`` in priority order."""
        return sorted(
            (f, h, c) for f, h, c in self.heap if self.queues[c] and self.queues[c][0] == h
        )


def check_leaf_target(model: SourceModel, n: int) -> None:
    floor = model.alphabet_size * model.state_count
    if n < floor:
        raise BadLeafTarget(f"n must be at least D*s = {floor}, got {n}")


def build_general(
    model: SourceModel, scheme: Optional[PriorityScheme] = None, n: int = 0
) -> ParseForest:
    """Forest of ``s`` trees with between ``n-D+2`` and ``n`` leaves in total."""
    if scheme is None:
        scheme = PriorityScheme.zeros(model.state_count)
    check_leaf_target(model, n)
    return BuilderState(model, scheme).run(n)


def split_node(state: BuilderState, node: int) -> BuilderState:
    """Split ``node``, which must be the leaf the policy picks next."""
    _, head, _ = state.head_entry()
    if head != node:
        raise ValueError(f"node {node} is not the minimum-priority leaf (that is {head})")
    state.step()
    return state
