"""Dense d-dimensional binary arrays with a single canonical cell order.

Every array in this package is cubic (``side`` cells along each of ``ndim``
axes) and is stored flat in *vectorized order*: position ``(i_1, ..., i_d)``
lives at flat index ``i_1 + i_2*side + ... + i_d*side**(d-1)``, i.e. the
first coordinate varies fastest.  All scans, serializations, and "first
match" decisions in the package use ascending flat index, so there is
exactly one notion of order everywhere.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundsError, StructuralError

Position = tuple[int, ...]
Shape = tuple[int, ...]


def volume(shape: Shape) -> int:
    """Number of cells in a box of the given extents."""
    check_shape(shape)
    return math.prod(shape)


def check_shape(shape: Shape, side: int | None = None) -> None:
    if len(shape) < 1:
        raise BoundsError("shape needs at least one extent")
    for extent in shape:
        if extent < 1:
            raise BoundsError(f"shape extents must be positive, got {shape}")
        if side is not None and extent > side:
            raise BoundsError(f"shape {shape} does not fit in side {side}")


def check_position(pos: Position, side: int, ndim: int) -> None:
    if len(pos) != ndim:
        raise BoundsError(f"position {pos} has {len(pos)} coordinates, expected {ndim}")
    for coord in pos:
        if coord < 0 or coord >= side:
            raise BoundsError(f"position {pos} out of bounds for side {side}")


def check_region(start: Position, shape: Shape, side: int, ndim: int) -> None:
    """Validate that the box at ``start`` with ``shape`` lies inside the array."""
    check_position(start, side, ndim)
    if len(shape) != ndim:
        raise BoundsError(f"shape {shape} has {len(shape)} extents, expected {ndim}")
    for coord, extent in zip(start, shape):
        if extent < 1 or coord + extent > side:
            raise BoundsError(
                f"sub-array at {start} with shape {shape} exceeds side {side}"
            )


def vectorize(pos: Position, side: int) -> int:
    """Flat index of a position; first coordinate is least significant."""
    check_position(pos, side, len(pos))
    index = 0
    for coord in reversed(pos):
        index = index * side + coord
    return index


def devectorize(index: int, side: int, ndim: int) -> Position:
    """Inverse of :func:`vectorize`."""
    if index < 0 or index >= side**ndim:
        raise BoundsError(f"flat index {index} out of range for side {side}, ndim {ndim}")
    coords = []
    for _ in range(ndim):
        index, coord = divmod(index, side)
        coords.append(coord)
    return tuple(coords)


def subarray_cells(start: Position, shape: Shape, side: int) -> np.ndarray:
    """Ascending flat indices of every cell in the box at ``start``."""
    ndim = len(start)
    check_region(start, shape, side, ndim)
    idx = np.zeros(1, dtype=np.int64)
    # Build the index set axis by axis, most significant coordinate outermost,
    # so the result comes out already sorted.
    for axis in range(ndim - 1, -1, -1):
        offs = (start[axis] + np.arange(shape[axis], dtype=np.int64)) * side**axis
        idx = (idx[:, None] + offs[None, :]).ravel()
    return idx


class BitArray:
    """Immutable cubic binary array, stored flat in vectorized order."""

    __slots__ = ("side", "ndim", "bits")

    def __init__(self, side: int, ndim: int, bits: np.ndarray | Sequence[int]):
        if side < 1 or ndim < 1:
            raise BoundsError(f"side and ndim must be positive, got {side}, {ndim}")
        data = np.asarray(bits, dtype=np.uint8).copy()
        if data.shape != (side**ndim,):
            raise StructuralError(
                f"expected {side**ndim} bits for side {side}, ndim {ndim}, got {data.size}"
            )
        if not np.isin(data, (0, 1)).all():
            raise StructuralError("array cells must be 0 or 1")
        data.setflags(write=False)
        self.side = side
        self.ndim = ndim
        self.bits = data

    def __setattr__(self, name, value):
        if hasattr(self, "bits"):
            raise AttributeError("BitArray is immutable")
        super().__setattr__(name, value)

    @classmethod
    def zeros(cls, side: int, ndim: int) -> "BitArray":
        return cls(side, ndim, np.zeros(side**ndim, dtype=np.uint8))

    @classmethod
    def from_int(cls, side: int, ndim: int, value: int) -> "BitArray":
        """Array whose flat bit ``i`` is bit ``i`` of ``value`` (LSB first)."""
        size = side**ndim
        if value < 0 or value >> size:
            raise BoundsError(f"value does not fit in {size} bits")
        bits = (value >> np.arange(size, dtype=np.int64)) & 1
        return cls(side, ndim, bits.astype(np.uint8))

    @property
    def size(self) -> int:
        return self.bits.size

    def bit(self, pos: Position) -> int:
        return int(self.bits[vectorize(pos, self.side)])

    def to_ndarray(self) -> np.ndarray:
        """d-dimensional read-only view; axis ``j`` is coordinate ``j``."""
        view = self.bits.reshape((self.side,) * self.ndim, order="F")
        view.setflags(write=False)
        return view

    def to_int(self) -> int:
        out = 0
        for i in np.flatnonzero(self.bits):
            out |= 1 << int(i)
        return out

    def key(self) -> bytes:
        """Hashable identity, for visited-sets and injectivity audits."""
        return self.bits.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitArray):
            return NotImplemented
        return (
            self.side == other.side
            and self.ndim == other.ndim
            and np.array_equal(self.bits, other.bits)
        )

    def __hash__(self):
        return hash((self.side, self.ndim, self.key()))

    def __repr__(self) -> str:
        return f"BitArray(side={self.side}, ndim={self.ndim}, bits={self.bits.tolist()})"


class CompactedArray:
    """What remains after one sub-array deletion.

    The surviving bits are packed at the front of vectorized order and the
    last ``gap`` slots (one per deleted cell) are empty.  The deleted region
    is recorded so the deletion can be reversed.
    """

    __slots__ = ("side", "ndim", "survivors", "start", "shape")

    def __init__(
        self,
        side: int,
        ndim: int,
        survivors: np.ndarray | Sequence[int],
        start: Position,
        shape: Shape,
    ):
        check_region(start, shape, side, ndim)
        data = np.asarray(survivors, dtype=np.uint8).copy()
        expected = side**ndim - volume(shape)
        if data.shape != (expected,):
            raise StructuralError(
                f"expected {expected} survivors, got {data.size}"
            )
        data.setflags(write=False)
        self.side = side
        self.ndim = ndim
        self.survivors = data
        self.start = tuple(start)
        self.shape = tuple(shape)

    @property
    def gap(self) -> int:
        return volume(self.shape)

    @property
    def size(self) -> int:
        return self.side**self.ndim

    def __repr__(self) -> str:
        return (
            f"CompactedArray(side={self.side}, ndim={self.ndim}, "
            f"deleted={self.start}+{self.shape}, gap={self.gap})"
        )


class PartialArray:
    """A cubic array with a hole: one recorded box of undefined cells.

    Used while reversing a deletion whose contents must be recomputed
    cell by cell.  ``defined`` tracks which cells currently hold a value.
    """

    __slots__ = ("side", "ndim", "bits", "defined", "hole_start", "hole_shape")

    def __init__(self, side: int, ndim: int, bits: np.ndarray, defined: np.ndarray,
                 hole_start: Position, hole_shape: Shape):
        self.side = side
        self.ndim = ndim
        self.bits = bits
        self.defined = defined
        self.hole_start = tuple(hole_start)
        self.hole_shape = tuple(hole_shape)

    @property
    def undefined_count(self) -> int:
        return int(self.defined.size - np.count_nonzero(self.defined))

    def to_bitarray(self) -> BitArray:
        if self.undefined_count:
            raise StructuralError(
                f"{self.undefined_count} cells are still undefined"
            )
        return BitArray(self.side, self.ndim, self.bits)


def extract_subarray(array: BitArray, start: Position, shape: Shape) -> np.ndarray:
    """The bits of a box, in ascending cell order."""
    cells = subarray_cells(start, shape, array.side)
    return array.bits[cells].copy()


def delete_subarray(array: BitArray, start: Position, shape: Shape) -> CompactedArray:
    """Remove one box and compact the remaining bits to the front.

    Two linear passes: mark the doomed cells, then gather the survivors in
    vectorized order.  The ``volume(shape)`` flat indices at the very end
    of the array become the empty region.
    """
    cells = subarray_cells(start, shape, array.side)
    keep = np.ones(array.size, dtype=bool)
    keep[cells] = False
    return CompactedArray(array.side, array.ndim, array.bits[keep], start, shape)


def reinsert_subarray(
    compacted: CompactedArray, fill: Sequence[int] | Iterable[int] | None
) -> BitArray | PartialArray:
    """Reverse a deletion.

    Survivors are spread back over every cell outside the deleted region,
    preserving order.  The deleted cells receive ``fill`` (in ascending cell
    order), or stay undefined when ``fill`` is None, yielding a
    :class:`PartialArray` whose hole is exactly the deleted region.
    """
    size = compacted.size
    cells = subarray_cells(compacted.start, compacted.shape, compacted.side)
    outside = np.ones(size, dtype=bool)
    outside[cells] = False
    bits = np.zeros(size, dtype=np.uint8)
    bits[outside] = compacted.survivors
    if fill is None:
        return PartialArray(
            compacted.side, compacted.ndim, bits, outside,
            compacted.start, compacted.shape,
        )
    fill_arr = np.asarray(list(fill) if not isinstance(fill, np.ndarray) else fill,
                          dtype=np.uint8)
    if fill_arr.shape != (compacted.gap,):
        raise StructuralError(
            f"fill must supply {compacted.gap} bits, got {fill_arr.size}"
        )
    bits[cells] = fill_arr
    return BitArray(compacted.side, compacted.ndim, bits)
