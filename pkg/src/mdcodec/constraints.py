"""The four built-in constraint codecs.

Each codec supplies three things: a validity test, a *collapse* that maps an
invalid array to an array with the reserved slot free (deleting the first
offending box and writing enough metadata to undo the deletion), and the
inverse *expand*.  "First" always means the lowest flat index, with the
tie-break orders fixed below, so collapse is a function and the whole
pipeline is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .arrays import (
    BitArray,
    CompactedArray,
    PartialArray,
    Position,
    Shape,
    delete_subarray,
    devectorize,
    reinsert_subarray,
    subarray_cells,
    vectorize,
    volume,
)
from .errors import (
    ContractViolation,
    CorruptStreamError,
    ParameterError,
)
from .framework import (
    AlmostArray,
    ConstraintConfig,
    read_payload,
    write_payload,
)


@dataclass(frozen=True)
class Violation:
    """The first constraint violation in scan order.

    position      the offending box start (or the earlier of a pair)
    partner       second box start, for the pairwise constraints
    shape_index   which minimal shape was matched (volume-threshold kind)
    diff_offsets  in-box offsets where a near-repeat pair differs (ascending)
    """

    position: Position
    partner: Position | None = None
    shape_index: int | None = None
    diff_offsets: tuple[int, ...] | None = None


@dataclass(frozen=True)
class MinimalShapeSet:
    """All boxes that meet a volume threshold but cannot shrink and still meet it."""

    min_volume: int
    side: int
    ndim: int
    shapes: tuple[Shape, ...]

    def __len__(self) -> int:
        return len(self.shapes)

    def __iter__(self):
        return iter(self.shapes)

    def __getitem__(self, index: int) -> Shape:
        return self.shapes[index]

    def index(self, shape: Shape) -> int:
        return self.shapes.index(tuple(shape))


@lru_cache(maxsize=None)
def minimal_shape_set(min_volume: int, side: int, ndim: int) -> MinimalShapeSet:
    """Enumerate the minimal shapes of volume >= min_volume, lexicographically.

    A shape is minimal when decrementing any extent above 1 drops the volume
    below the threshold.  That forces the last extent to be the exact ceiling
    ``min_volume / prod(rest)``, so candidate prefixes over the first ndim-1
    extents enumerate every minimal shape exactly once.  No extent of a
    minimal shape can exceed min_volume, which bounds the search.
    """
    if min_volume < 1:
        raise ParameterError(f"volume threshold must be positive, got {min_volume}")
    if side < 1 or ndim < 1:
        raise ParameterError("side and ndim must be positive")
    if min_volume > side**ndim:
        raise ParameterError(
            f"no shape of volume {min_volume} fits in an array of side {side}"
        )
    limit = min(side, min_volume)
    found = []
    for prefix in product(range(1, limit + 1), repeat=ndim - 1):
        prefix_volume = math.prod(prefix)
        last = -(-min_volume // prefix_volume)
        if last > side:
            continue
        shape = prefix + (last,)
        total = prefix_volume * last
        if all(
            extent == 1 or (total // extent) * (extent - 1) < min_volume
            for extent in shape
        ):
            found.append(shape)
    found.sort()
    return MinimalShapeSet(min_volume, side, ndim, tuple(found))


def _scan_positions(side: int, shape: Shape) -> list[Position]:
    """Box starts that keep the box in bounds, ascending by flat index."""
    axes = [range(side - extent + 1) for extent in shape]
    return [pos[::-1] for pos in product(*axes[::-1])]


def reconstruct_repeat(
    partial: PartialArray,
    source: Position,
    hole: Position,
    shape: Shape,
    flip_offsets: frozenset[int] | set[int] = frozenset(),
) -> BitArray:
    """Refill a deleted box from its (near-)copy at ``source``.

    Every cell of the hole equals the corresponding cell of the source box,
    XOR 1 at the offsets listed in ``flip_offsets``.  When the two boxes
    overlap, a filled hole cell can itself be a source cell for another
    offset, so we sweep until no cell is undefined; each sweep fills at
    least one cell whenever the boxes are distinct, so this terminates.
    """
    if tuple(source) == tuple(hole):
        raise ParameterError("source and hole positions must differ")
    side = partial.side
    source_cells = subarray_cells(source, shape, side)
    hole_cells = subarray_cells(hole, shape, side)
    bits = partial.bits
    defined = partial.defined
    pending = [
        (int(hole_cells[off]), int(source_cells[off]), 1 if off in flip_offsets else 0)
        for off in range(len(hole_cells))
        if not defined[hole_cells[off]]
    ]
    while pending:
        stalled = []
        progressed = False
        for dst, src, flip in pending:
            if defined[src]:
                bits[dst] = bits[src] ^ flip
                defined[dst] = True
                progressed = True
            else:
                stalled.append((dst, src, flip))
        if stalled and not progressed:
            raise ContractViolation(
                "repeat reconstruction stalled with undefined cells"
            )
        pending = stalled
    return partial.to_bitarray()


class _CodecBase:
    """Shared collapse/expand driver; subclasses fix the scan and the fields."""

    def __init__(self, config: ConstraintConfig):
        self.config = config

    def is_valid(self, array: BitArray) -> bool:
        return self.find_violation(array) is None

    def find_violation(self, array: BitArray) -> Violation | None:
        raise NotImplementedError

    def collapse(self, array: BitArray) -> AlmostArray:
        witness = self.find_violation(array)
        if witness is None:
            raise ContractViolation("collapse called on a valid array")
        start, shape = self._deleted_region(witness)
        compacted = delete_subarray(array, start, shape)
        return write_payload(compacted, self._field_values(witness), self.config)

    def expand(self, almost: AlmostArray) -> BitArray:
        raise NotImplementedError

    def _deleted_region(self, witness: Violation) -> tuple[Position, Shape]:
        raise NotImplementedError

    def _field_values(self, witness: Violation) -> list[int]:
        raise NotImplementedError

    def _check_region(self, start: Position, shape: Shape) -> None:
        for coord, extent in zip(start, shape):
            if coord + extent > self.config.side:
                raise CorruptStreamError(
                    f"decoded box at {start} with shape {shape} exceeds "
                    f"side {self.config.side}"
                )


class ZrcfCodec(_CodecBase):
    """No all-zero box of the configured shape anywhere in the array."""

    def __init__(self, config: ConstraintConfig):
        if config.kind != "zrcf":
            raise ParameterError(f"expected a zrcf config, got {config.kind}")
        super().__init__(config)
        self.shape = config.shape
        self._windows = [
            (pos, tuple(int(c) for c in subarray_cells(pos, self.shape, config.side)))
            for pos in _scan_positions(config.side, self.shape)
        ]

    def find_violation(self, array: BitArray) -> Violation | None:
        data = array.bits.tolist()
        for pos, cells in self._windows:
            for cell in cells:
                if data[cell]:
                    break
            else:
                return Violation(position=pos)
        return None

    def _deleted_region(self, witness):
        return witness.position, self.shape

    def _field_values(self, witness):
        return [vectorize(witness.position, self.config.side)]

    def expand(self, almost: AlmostArray) -> BitArray:
        (index,) = read_payload(almost, self.config)
        start = devectorize(index, self.config.side, self.config.ndim)
        self._check_region(start, self.shape)
        survivors = almost.bits[: self.config.size - volume(self.shape)]
        compacted = CompactedArray(
            self.config.side, self.config.ndim, survivors, start, self.shape
        )
        # The deleted box was all-zero by definition.
        return reinsert_subarray(compacted, np.zeros(volume(self.shape), np.uint8))


class VzrcfCodec(_CodecBase):
    """No all-zero box of volume >= min_volume, whatever its shape.

    Scanning only the minimal shapes is enough: any larger all-zero box can
    be shrunk extent by extent, staying all-zero and above threshold, until
    it is minimal.  Ties at one start position break by the lexicographic
    order of the minimal-shape list, whose index is written to the payload.
    """

    def __init__(self, config: ConstraintConfig):
        if config.kind != "vzrcf":
            raise ParameterError(f"expected a vzrcf config, got {config.kind}")
        super().__init__(config)
        self.shapes = minimal_shape_set(config.min_volume, config.side, config.ndim)
        by_position: dict[Position, list[tuple[int, tuple[int, ...]]]] = {}
        for shape_index, shape in enumerate(self.shapes):
            for pos in _scan_positions(config.side, shape):
                cells = tuple(int(c) for c in subarray_cells(pos, shape, config.side))
                by_position.setdefault(pos, []).append((shape_index, cells))
        order = sorted(by_position, key=lambda pos: vectorize(pos, config.side))
        self._plans = [
            (pos, sorted(by_position[pos], key=lambda item: item[0])) for pos in order
        ]

    def find_violation(self, array: BitArray) -> Violation | None:
        data = array.bits.tolist()
        for pos, candidates in self._plans:
            for shape_index, cells in candidates:
                for cell in cells:
                    if data[cell]:
                        break
                else:
                    return Violation(position=pos, shape_index=shape_index)
        return None

    def _deleted_region(self, witness):
        return witness.position, self.shapes[witness.shape_index]

    def _field_values(self, witness):
        return [witness.shape_index, vectorize(witness.position, self.config.side)]

    def expand(self, almost: AlmostArray) -> BitArray:
        shape_index, index = read_payload(almost, self.config)
        shape = self.shapes[shape_index]
        start = devectorize(index, self.config.side, self.config.ndim)
        self._check_region(start, shape)
        survivors = almost.bits[: self.config.size - volume(shape)]
        compacted = CompactedArray(
            self.config.side, self.config.ndim, survivors, start, shape
        )
        return reinsert_subarray(compacted, np.zeros(volume(shape), np.uint8))


class RfCodec(_CodecBase):
    """All boxes of the configured shape are pairwise distinct.

    The scan groups equal windows by content (exact, byte-keyed), which
    finds the same witness as the naive pairwise scan: the first position
    involved in any repeat, then its first equal partner.
    """

    def __init__(self, config: ConstraintConfig):
        if config.kind != "rf":
            raise ParameterError(f"expected an rf config, got {config.kind}")
        super().__init__(config)
        self.shape = config.shape
        self._positions = _scan_positions(config.side, self.shape)
        self._cells = [
            subarray_cells(pos, self.shape, config.side) for pos in self._positions
        ]

    def find_violation(self, array: BitArray) -> Violation | None:
        bits = array.bits
        groups: dict[bytes, list[int]] = {}
        for at, cells in enumerate(self._cells):
            groups.setdefault(bits[cells].tobytes(), []).append(at)
        # The witness anchors at the first position involved in ANY repeat,
        # not at the first collision met while scanning.
        best: list[int] | None = None
        for members in groups.values():
            if len(members) > 1 and (best is None or members[0] < best[0]):
                best = members
        if best is None:
            return None
        return Violation(
            position=self._positions[best[0]], partner=self._positions[best[1]]
        )

    def _deleted_region(self, witness):
        return witness.partner, self.shape

    def _field_values(self, witness):
        side = self.config.side
        return [vectorize(witness.position, side), vectorize(witness.partner, side)]

    def expand(self, almost: AlmostArray) -> BitArray:
        first_index, second_index = read_payload(almost, self.config)
        if first_index == second_index:
            raise CorruptStreamError("decoded repeat positions coincide")
        side, ndim = self.config.side, self.config.ndim
        first = devectorize(first_index, side, ndim)
        second = devectorize(second_index, side, ndim)
        self._check_region(first, self.shape)
        self._check_region(second, self.shape)
        survivors = almost.bits[: self.config.size - volume(self.shape)]
        compacted = CompactedArray(side, ndim, survivors, second, self.shape)
        partial = reinsert_subarray(compacted, None)
        return reconstruct_repeat(partial, first, second, self.shape)


class HdrfCodec(_CodecBase):
    """Every pair of boxes of the configured shape differs in >= min_distance cells.

    A violating pair differs at fewer than min_distance offsets; those
    offsets (1-based, ascending, zero-padded) travel in the payload so the
    deleted box can be rebuilt from its near-copy.  With min_distance 1 this
    is exactly the repeat-free codec and no offset fields exist.
    """

    def __init__(self, config: ConstraintConfig):
        if config.kind != "hdrf":
            raise ParameterError(f"expected an hdrf config, got {config.kind}")
        super().__init__(config)
        self.shape = config.shape
        self.min_distance = config.min_distance
        self._positions = _scan_positions(config.side, self.shape)
        self._cells = [
            subarray_cells(pos, self.shape, config.side) for pos in self._positions
        ]

    def find_violation(self, array: BitArray) -> Violation | None:
        bits = array.bits
        windows = [bits[cells].tolist() for cells in self._cells]
        count = len(windows)
        cap = self.min_distance
        span = volume(self.shape)
        for first in range(count):
            left = windows[first]
            for second in range(first + 1, count):
                right = windows[second]
                diffs = []
                for off in range(span):
                    if left[off] != right[off]:
                        diffs.append(off)
                        if len(diffs) >= cap:
                            break
                if len(diffs) < cap:
                    return Violation(
                        position=self._positions[first],
                        partner=self._positions[second],
                        diff_offsets=tuple(diffs),
                    )
        return None

    def _deleted_region(self, witness):
        return witness.partner, self.shape

    def _field_values(self, witness):
        side = self.config.side
        values = [vectorize(witness.position, side), vectorize(witness.partner, side)]
        offsets = list(witness.diff_offsets)
        values.extend(off + 1 for off in offsets)
        values.extend([0] * (self.min_distance - 1 - len(offsets)))
        return values

    def expand(self, almost: AlmostArray) -> BitArray:
        values = read_payload(almost, self.config)
        first_index, second_index = values[0], values[1]
        if first_index == second_index:
            raise CorruptStreamError("decoded repeat positions coincide")
        side, ndim = self.config.side, self.config.ndim
        first = devectorize(first_index, side, ndim)
        second = devectorize(second_index, side, ndim)
        self._check_region(first, self.shape)
        self._check_region(second, self.shape)
        span = volume(self.shape)
        flips = set()
        seen_dummy = False
        previous = 0
        for raw in values[2:]:
            if raw == 0:
                seen_dummy = True
                continue
            if seen_dummy:
                raise CorruptStreamError("difference offsets appear after padding")
            if raw > span:
                raise CorruptStreamError(
                    f"difference offset {raw} out of range (<= {span})"
                )
            if raw <= previous:
                raise CorruptStreamError("difference offsets must be ascending")
            previous = raw
            flips.add(raw - 1)
        survivors = almost.bits[: self.config.size - span]
        compacted = CompactedArray(side, ndim, survivors, second, self.shape)
        partial = reinsert_subarray(compacted, None)
        return reconstruct_repeat(partial, first, second, self.shape, flips)


def make_codec(config: ConstraintConfig):
    """Build the codec matching a config's kind."""
    cls = {
        "zrcf": ZrcfCodec,
        "vzrcf": VzrcfCodec,
        "rf": RfCodec,
        "hdrf": HdrfCodec,
    }[config.kind]
    return cls(config)
