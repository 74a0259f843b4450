"""Packed validity bitmaps and sorted active lists."""
from __future__ import annotations

import numpy as np


class Bitmap:
    """One bit per vertex or block, packed little-endian into bytes.

    ``count`` is kept up to date by every mutating call, so it is exact whenever
    no writer is mid-call (in practice: at iteration barriers).
    """

    __slots__ = ("length", "bits", "count")

    def __init__(self, length: int):
        self.length = int(length)
        self.bits = np.zeros(-(-self.length // 8), dtype=np.uint8)
        self.count = 0

    @classmethod
    def from_mask(cls, mask) -> "Bitmap":
        mask = np.asarray(mask, dtype=bool)
        bm = cls(len(mask))
        bm.bits[:] = np.packbits(mask, bitorder="little")
        bm.count = int(np.count_nonzero(mask))
        return bm

    @classmethod
    def from_ids(cls, length, ids) -> "Bitmap":
        bm = cls(length)
        bm.set_many(ids)
        return bm

    @classmethod
    def full(cls, length) -> "Bitmap":
        return cls.from_mask(np.ones(length, dtype=bool))

    def _check(self, i):
        assert 0 <= i < self.length, f"bit {i} out of range [0, {self.length})"

    def set(self, i: int) -> None:
        self._check(i)
        byte, bit = divmod(i, 8)
        m = np.uint8(1 << bit)
        if not self.bits[byte] & m:
            self.bits[byte] |= m
            self.count += 1

    def clear(self, i: int) -> None:
        self._check(i)
        byte, bit = divmod(i, 8)
        m = np.uint8(1 << bit)
        if self.bits[byte] & m:
            self.bits[byte] &= ~m
            self.count -= 1

    def test(self, i: int) -> bool:
        self._check(i)
        byte, bit = divmod(i, 8)
        return bool(self.bits[byte] >> bit & 1)

    def __contains__(self, i):
        return self.test(i)

    def __len__(self):
        return self.length

    def popcount(self) -> int:
        return self.count

    def set_many(self, ids) -> None:
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            return
        assert ids.min() >= 0 and ids.max() < self.length
        mask = self.to_mask()
        mask[ids] = True
        self._store(mask)

    def clear_many(self, ids) -> None:
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            return
        mask = self.to_mask()
        mask[ids] = False
        self._store(mask)

    def _store(self, mask):
        self.bits[:] = np.packbits(mask, bitorder="little")
        self.count = int(np.count_nonzero(mask))

    def to_mask(self) -> np.ndarray:
        return np.unpackbits(self.bits, count=self.length, bitorder="little").astype(bool)

    def to_active_list(self) -> np.ndarray:
        return np.flatnonzero(self.to_mask())

    def any(self) -> bool:
        return self.count > 0

    def copy(self) -> "Bitmap":
        bm = Bitmap(self.length)
        bm.bits[:] = self.bits
        bm.count = self.count
        return bm

    @property
    def nbytes(self) -> int:
        return len(self.bits)

    def __eq__(self, other):
        return (isinstance(other, Bitmap) and self.length == other.length
                and np.array_equal(self.bits, other.bits))

    def __repr__(self):
        return f"Bitmap(length={self.length}, set={self.count})"


def to_active_list(bitmap: Bitmap) -> np.ndarray:
    """Ascending ids of the set bits."""
    return bitmap.to_active_list()


class FrontierPair:
    """Current/next bitmaps swapped at the iteration barrier."""

    def __init__(self, length: int, initial=None):
        self.current = initial if initial is not None else Bitmap(length)
        self.next = Bitmap(length)

    def swap(self):
        self.current, self.next = self.next, Bitmap(self.current.length)
        return self.current
