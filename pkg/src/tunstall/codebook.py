"""Frozen codebooks: leaf index assignment, statistics, ``.tvfc`` format.

Leaves of each tree are numbered ``0..n_j-1`` in pre-order, children in
symbol order, and every parse through tree ``j`` is emitted in
``w_j = max(1, ceil(log2 n_j))`` bits.

Binary layout (little-endian)::

    "TVFC" | version u16 | D u16 | s u16 | model crc32 u32
    per tree: n_j u32 | node count u32 | node count x
        (parent u32, symbol u8, state u16, leaf index u32)

``parent`` and ``leaf index`` use 0xFFFFFFFF for "none"; parents are
tree-local positions.  Probabilities are not stored; attach a model to
recompute them.
"""
from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass, field
from typing import Optional

from .errors import BadMagic, ChecksumMismatch, CorruptCodebook, TruncatedInput, VersionMismatch
from .forest import LEAF, ParseForest
from .model import PriorityScheme, SourceModel, format_model

MAGIC = b"TVFC"
VERSION = 1
NONE32 = 0xFFFFFFFF
_HEADER = struct.Struct("<4sHHHI")
_TREE = struct.Struct("<II")
_NODE = struct.Struct("<IBHI")


def model_checksum(model: SourceModel, scheme: Optional[PriorityScheme] = None) -> int:
    return zlib.crc32(format_model(model, scheme).encode("utf-8"))


def width_for(leaf_count: int) -> int:
    return max(1, (leaf_count - 1).bit_length())


@dataclass(frozen=True)
class TreeTable:
    """One parsing tree, nodes in creation order; position 0 is the root."""

    parent: tuple[int, ...]
    symbol: tuple[int, ...]
    state: tuple[int, ...]
    leaf_index: tuple[int, ...]
    # derived tables, rebuilt from the columns above
    first_child: tuple[int, ...] = field(init=False, compare=False, repr=False)
    leaf_node: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        first_child = [LEAF] * len(self.parent)
        for v in range(len(self.parent) - 1, 0, -1):
            first_child[self.parent[v]] = v
        leaf_node = [0] * sum(1 for li in self.leaf_index if li != LEAF)
        for v, li in enumerate(self.leaf_index):
            if li != LEAF:
                leaf_node[li] = v
        object.__setattr__(self, "first_child", tuple(first_child))
        object.__setattr__(self, "leaf_node", tuple(leaf_node))

    @property
    def leaf_count(self) -> int:
        return len(self.leaf_node)

    @property
    def width(self) -> int:
        return width_for(self.leaf_count)

    def path(self, v: int) -> tuple[int, ...]:
        out = []
        while v:
            out.append(self.symbol[v])
            v = self.parent[v]
        return tuple(reversed(out))

    def leaf_path(self, index: int) -> tuple[int, ...]:
        return self.path(self.leaf_node[index])


@dataclass(frozen=True)
class TreeStats:
    leaf_count: int
    width: int
    expected_length: float
    ratio: float
    ideal_ratio: float


@dataclass(frozen=True)
class Codebook:
    alphabet_size: int
    state_count: int
    checksum: int
    trees: tuple[TreeTable, ...]
    # per tree, per node -ln p; only present when a model is attached
    neg_log_prob: Optional[tuple[tuple[float, ...], ...]] = field(default=None, compare=False, repr=False)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(t.width for t in self.trees)

    def attach(self, model: SourceModel, scheme: Optional[PriorityScheme] = None) -> Codebook:
        """Return a copy carrying node probabilities recomputed from ``model``."""
        if model_checksum(model, scheme) != self.checksum:
            raise ChecksumMismatch("codebook was built for a different model")
        tables = []
        for t in self.trees:
            nlp = [0.0] * len(t.parent)
            for v in range(1, len(t.parent)):
                u = t.parent[v]
                nlp[v] = nlp[u] + model.neg_log[t.state[u]][t.symbol[v]]
            tables.append(tuple(nlp))
        return Codebook(self.alphabet_size, self.state_count, self.checksum, self.trees, tuple(tables))

    def _probs(self, j: int) -> tuple[float, ...]:
        if self.neg_log_prob is None:
            raise ValueError("statistics need a model; call attach() first")
        return self.neg_log_prob[j]

    def expected_length(self, j: int) -> float:
        t, nlp = self.trees[j], self._probs(j)
        return math.fsum(math.exp(-nlp[v]) * len(t.path(v)) for v in t.leaf_node)

    def internal_mass(self, j: int) -> float:
        """Total probability of internal nodes, root included.

        Each split adds the split node's probability to the expected parse
        length, so this equals :meth:`expected_length`.
        """
        t, nlp = self.trees[j], self._probs(j)
        return math.fsum(math.exp(-nlp[v]) for v in range(len(t.parent)) if t.leaf_index[v] == LEAF)

    def stats(self, j: int) -> TreeStats:
        t = self.trees[j]
        el = self.expected_length(j)
        log2d = math.log2(self.alphabet_size)
        ideal = log2d * el / math.log2(t.leaf_count) if t.leaf_count > 1 else math.inf
        return TreeStats(t.leaf_count, t.width, el, log2d * el / t.width, ideal)


def freeze(
    forest: ParseForest, model: SourceModel, scheme: Optional[PriorityScheme] = None
) -> Codebook:
    by_tree: list[list[int]] = [[] for _ in range(forest.state_count)]
    for v, j in enumerate(forest.tree):
        by_tree[j].append(v)
    trees, tables = [], []
    for nodes in by_tree:
        local = {v: i for i, v in enumerate(nodes)}
        leaf_index = [LEAF] * len(nodes)
        counter = 0
        stack = [nodes[0]]
        while stack:
            v = stack.pop()
            fc = forest.first_child[v]
            if fc == LEAF:
                leaf_index[local[v]] = counter
                counter += 1
            else:
                stack.extend(range(fc + forest.alphabet_size - 1, fc - 1, -1))
        trees.append(
            TreeTable(
                parent=tuple(LEAF if forest.parent[v] == LEAF else local[forest.parent[v]] for v in nodes),
                symbol=tuple(0 if forest.parent[v] == LEAF else forest.symbol[v] for v in nodes),
                state=tuple(forest.state[v] for v in nodes),
                leaf_index=tuple(leaf_index),
            )
        )
        tables.append(tuple(forest.neg_log_prob[v] for v in nodes))
    return Codebook(
        forest.alphabet_size, forest.state_count, model_checksum(model, scheme), tuple(trees), tuple(tables)
    )


def compression_ratio(book: Codebook, tree: int, ideal: bool = False) -> float:
    """Expected input bits per output bit of ``tree``.

    By default the output side is the emitted block width; ``ideal=True``
    uses ``log2`` of the leaf count instead.
    """
    st = book.stats(tree)
    return st.ideal_ratio if ideal else st.ratio


def serialize(book: Codebook) -> bytes:
    out = [_HEADER.pack(MAGIC, VERSION, book.alphabet_size, book.state_count, book.checksum)]
    for t in book.trees:
        out.append(_TREE.pack(t.leaf_count, len(t.parent)))
        out.extend(
            _NODE.pack(
                NONE32 if p == LEAF else p,
                sym,
                st,
                NONE32 if li == LEAF else li,
            )
            for p, sym, st, li in zip(t.parent, t.symbol, t.state, t.leaf_index)
        )
    return b"".join(out)


def deserialize(
    data: bytes, model: Optional[SourceModel] = None, scheme: Optional[PriorityScheme] = None
) -> Codebook:
    if len(data) < _HEADER.size:
        if not MAGIC.startswith(bytes(data[:4])):
            raise BadMagic("not a codebook")
        raise TruncatedInput("codebook header is truncated")
    magic, version, D, s, checksum = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad codebook magic {magic!r}")
    if version != VERSION:
        raise VersionMismatch(f"codebook version {version}, expected {VERSION}")
    pos = _HEADER.size
    trees = []
    for j in range(s):
        if len(data) < pos + _TREE.size:
            raise TruncatedInput(f"tree {j} header is truncated")
        leaf_count, count = _TREE.unpack_from(data, pos)
        pos += _TREE.size
        end = pos + count * _NODE.size
        if len(data) < end:
            raise TruncatedInput(f"tree {j} node records are truncated")
        parent, symbol, state, leaf_index = [], [], [], []
        for p, sym, st, li in _NODE.iter_unpack(data[pos:end]):
            parent.append(LEAF if p == NONE32 else p)
            symbol.append(sym)
            state.append(st)
            leaf_index.append(LEAF if li == NONE32 else li)
        pos = end
        _check_tree(j, D, s, leaf_count, parent, symbol, state, leaf_index)
        trees.append(TreeTable(tuple(parent), tuple(symbol), tuple(state), tuple(leaf_index)))
    if pos != len(data):
        raise CorruptCodebook(f"{len(data) - pos} trailing bytes after last tree")
    book = Codebook(D, s, checksum, tuple(trees))
    if model is not None:
        book = book.attach(model, scheme)
    return book


def _check_tree(j, D, s, leaf_count, parent, symbol, state, leaf_index) -> None:
    if not parent or parent[0] != LEAF or state[0] != j:
        raise CorruptCodebook(f"tree {j}: bad root record")
    children = [0] * len(parent)
    first = [LEAF] * len(parent)
    for v in range(1, len(parent)):
        p = parent[v]
        if not 0 <= p < v or symbol[v] >= D or state[v] >= s:
            raise CorruptCodebook(f"tree {j}: bad node record {v}")
        if first[p] == LEAF:
            first[p] = v
        # children must be contiguous and in symbol order
        if v != first[p] + symbol[v] or symbol[v] != children[p]:
            raise CorruptCodebook(f"tree {j}: node {v} is out of order")
        children[p] += 1
    leaves = sorted(li for li in leaf_index if li != LEAF)
    if leaves != list(range(leaf_count)):
        raise CorruptCodebook(f"tree {j}: leaf indices are not 0..{leaf_count - 1}")
    for v, li in enumerate(leaf_index):
        expected = D if li == LEAF else 0
        if children[v] != expected:
            raise CorruptCodebook(f"tree {j}: node {v} has {children[v]} children")
