"""Encoding symbol streams into fixed-width blocks and back.

Container layout (little-endian header, then the payload)::

    "TVFE" | version u16 | codebook crc32 u32 | initial state u16 | symbol count u64

The payload is the concatenation of one block per parse, each the leaf index
written MSB-first in the width of the tree used for that parse.  The last
parse, if the input ends inside it, is completed with symbol 0; the header's
symbol count tells the decoder where the real data stops.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Sequence

from .bitio import BitReader, BitWriter
from .codebook import Codebook, model_checksum
from .errors import (
    BadMagic,
    BadStateIndex,
    ChecksumMismatch,
    IndexOutOfRange,
    SymbolOutOfRange,
    TruncatedInput,
    VersionMismatch,
)
from .forest import LEAF
from .model import PriorityScheme, SourceModel

MAGIC = b"TVFE"
VERSION = 1
_HEADER = struct.Struct("<4sHIHQ")


@dataclass(frozen=True)
class EncodedContainer:
    checksum: int
    initial_state: int
    symbol_count: int
    payload: bytes
    payload_bits: Optional[int] = None

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(MAGIC, VERSION, self.checksum, self.initial_state, self.symbol_count)
        return header + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> EncodedContainer:
        if len(data) < _HEADER.size:
            if not MAGIC.startswith(bytes(data[:4])):
                raise BadMagic("not an encoded container")
            raise TruncatedInput("container header is truncated")
        magic, version, checksum, state, count = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise BadMagic(f"bad container magic {magic!r}")
        if version != VERSION:
            raise VersionMismatch(f"container version {version}, expected {VERSION}")
        return cls(checksum, state, count, bytes(data[_HEADER.size :]))


def encode(
    book: Codebook,
    symbols: Sequence[int],
    initial_state: int = 0,
    model: Optional[SourceModel] = None,
    scheme: Optional[PriorityScheme] = None,
) -> EncodedContainer:
    """Parse ``symbols`` with the codebook's trees, starting in ``initial_state``."""
    if model is not None and model_checksum(model, scheme) != book.checksum:
        raise ChecksumMismatch("codebook does not match the given model")
    if not 0 <= initial_state < book.state_count:
        raise BadStateIndex(f"initial state {initial_state} out of range")
    D = book.alphabet_size
    if len(symbols) and (min(symbols) < 0 or max(symbols) >= D):
        bad = next(x for x in symbols if not 0 <= x < D)
        raise SymbolOutOfRange(f"symbol {bad} outside 0..{D - 1}")

    tables = [(t.first_child, t.leaf_index, t.state, t.width) for t in book.trees]
    writer = BitWriter()
    write = writer.write
    first_child, leaf_index, leaf_state, width = tables[initial_state]
    node = 0
    for sym in symbols:
        node = first_child[node] + sym
        li = leaf_index[node]
        if li != LEAF:
            write(li, width)
            first_child, leaf_index, leaf_state, width = tables[leaf_state[node]]
            node = 0
    if node:
        while leaf_index[node] == LEAF:
            node = first_child[node]
        write(leaf_index[node], width)
    return EncodedContainer(
        book.checksum, initial_state, len(symbols), writer.getvalue(), writer.bits_written
    )


def _read_block(book: Codebook, reader: BitReader, state: int) -> tuple[tuple[int, ...], int]:
    t = book.trees[state]
    index = reader.read(t.width)
    if index >= t.leaf_count:
        raise IndexOutOfRange(f"block value {index} but tree {state} has {t.leaf_count} leaves")
    node = t.leaf_node[index]
    return t.path(node), t.state[node]


def decode(book: Codebook, container: EncodedContainer) -> list[int]:
    if container.checksum != book.checksum:
        raise ChecksumMismatch("container was encoded with a different codebook")
    if not 0 <= container.initial_state < book.state_count:
        raise BadStateIndex(f"initial state {container.initial_state} out of range")
    # leaf index -> (symbol path, next state), per tree
    lookup = [
        [(t.path(v), t.state[v]) for v in t.leaf_node] for t in book.trees
    ]
    widths = book.widths
    reader = BitReader(container.payload)
    read = reader.read
    out: list[int] = []
    state = container.initial_state
    count = container.symbol_count
    while len(out) < count:
        table = lookup[state]
        index = read(widths[state])
        if index >= len(table):
            raise IndexOutOfRange(f"block value {index} but tree {state} has {len(table)} leaves")
        path, state = table[index]
        out.extend(path)
    del out[count:]
    return out


def decode_block_at(
    book: Codebook, container: EncodedContainer, bit_offset: int, state: int = 0
) -> tuple[tuple[int, ...], int, int]:
    """Decode the single block starting at ``bit_offset``.

    Only single-tree codebooks have block boundaries at fixed multiples of the
    width; with several trees the offset of a block depends on every earlier
    parse.
    """
    if container.checksum != book.checksum:
        raise ChecksumMismatch("container was encoded with a different codebook")
    if book.state_count != 1:
        raise ValueError("random access needs a single-tree codebook")
    if bit_offset % book.trees[0].width:
        raise ValueError(f"bit offset {bit_offset} is not a block boundary")
    reader = BitReader(container.payload, bit_offset)
    symbols, next_state = _read_block(book, reader, state)
    return symbols, next_state, reader.bit_position
