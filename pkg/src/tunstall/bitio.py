"""MSB-first bit packing for fixed-width output blocks."""
from __future__ import annotations

from .errors import TruncatedPayload


class BitWriter:
    __slots__ = ("_buf", "_acc", "_nbits", "bits_written")

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0
        self.bits_written = 0

    def write(self, value: int, width: int) -> None:
        self._acc = (self._acc << width) | value
        self._nbits += width
        self.bits_written += width
        if self._nbits >= 32:
            keep = self._nbits & 7
            nbytes = self._nbits >> 3
            self._buf += (self._acc >> keep).to_bytes(nbytes, "big")
            self._acc &= (1 << keep) - 1
            self._nbits = keep

    def getvalue(self) -> bytes:
        """Packed bytes so far, the last one zero-padded on the right."""
        tail = b""
        if self._nbits:
            pad = -self._nbits % 8
            tail = (self._acc << pad).to_bytes((self._nbits + pad) // 8, "big")
        return bytes(self._buf) + tail


class BitReader:
    __slots__ = ("_data", "_pos", "_acc", "_nbits")

    def __init__(self, data: bytes, bit_offset: int = 0) -> None:
        self._data = data
        self._pos = bit_offset >> 3
        self._acc = 0
        self._nbits = 0
        skip = bit_offset & 7
        if skip:
            self.read(skip)

    @property
    def bit_position(self) -> int:
        return self._pos * 8 - self._nbits

    def read(self, width: int) -> int:
        while self._nbits < width:
            if self._pos >= len(self._data):
                raise TruncatedPayload(f"payload ended while reading a {width}-bit block")
            chunk = self._data[self._pos : self._pos + 4]
            self._acc = (self._acc << (8 * len(chunk))) | int.from_bytes(chunk, "big")
            self._nbits += 8 * len(chunk)
            self._pos += len(chunk)
        self._nbits -= width
        value = self._acc >> self._nbits
        self._acc &= (1 << self._nbits) - 1
        return value
