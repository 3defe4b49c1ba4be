"""Generic one-redundancy-bit encoder/decoder over a pluggable constraint codec.

A message of ``side**ndim - 1`` bits is embedded into an array with a zero
in the reserved slot (the last vectorized cell).  While the array violates
the constraint, the codec collapses one violation into an array with the
reserved slot free, a ``1`` is written there, and the test repeats.  The
decoder runs the loop backwards, popping the reserved slot until it reads
a ``0``.  Termination is structural: the initial state is the only one
with marker 0, every collapse step is injective, so no state can repeat.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from .arrays import (
    BitArray,
    CompactedArray,
    Shape,
    check_shape,
    volume,
)
from .errors import (
    BoundsError,
    ContractViolation,
    CorruptStreamError,
    FeasibilityError,
    IterationCapError,
    ParameterError,
    StructuralError,
)

KINDS = ("zrcf", "vzrcf", "rf", "hdrf")


def _ceil_log2(value: int) -> int:
    """ceil(log2(value)) computed exactly on integers."""
    if value < 1:
        raise ParameterError(f"ceil_log2 needs a positive argument, got {value}")
    return (value - 1).bit_length()


@dataclass(frozen=True)
class ConstraintConfig:
    """Identity and parameters of one constraint instance.

    kind          one of "zrcf", "vzrcf", "rf", "hdrf"
    side, ndim    ambient array is side**ndim cells
    shape         forbidden-box extents (all kinds except vzrcf)
    min_volume    volume threshold V (vzrcf only)
    min_distance  Hamming-distance threshold p (hdrf only)
    """

    kind: str
    side: int
    ndim: int
    shape: Shape | None = None
    min_volume: int | None = None
    min_distance: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown constraint kind {self.kind!r}")
        if self.side < 2:
            raise ParameterError(f"side must be at least 2, got {self.side}")
        if self.ndim < 1:
            raise ParameterError(f"ndim must be at least 1, got {self.ndim}")
        if self.kind == "vzrcf":
            if self.shape is not None:
                raise ParameterError("vzrcf takes min_volume, not a fixed shape")
            if self.min_volume is None or self.min_volume < 1:
                raise ParameterError("vzrcf needs min_volume >= 1")
            if self.min_volume > self.size:
                raise ParameterError(
                    f"min_volume {self.min_volume} exceeds array size {self.size}"
                )
        else:
            if self.shape is None:
                raise ParameterError(f"{self.kind} needs a shape")
            object.__setattr__(self, "shape", tuple(self.shape))
            if len(self.shape) != self.ndim:
                raise ParameterError(
                    f"shape {self.shape} has {len(self.shape)} extents, expected {self.ndim}"
                )
            try:
                check_shape(self.shape, self.side)
            except BoundsError as exc:
                raise ParameterError(str(exc)) from None
        if self.kind == "hdrf":
            if self.min_distance is None or self.min_distance < 1:
                raise ParameterError("hdrf needs min_distance >= 1")
        elif self.min_distance is not None:
            raise ParameterError("min_distance only applies to hdrf")
        if self.kind != "vzrcf" and self.min_volume is not None:
            raise ParameterError("min_volume only applies to vzrcf")

    @property
    def size(self) -> int:
        return self.side**self.ndim

    @property
    def message_bits(self) -> int:
        """Message length: one less than the cell count."""
        return self.size - 1

    @property
    def position_width(self) -> int:
        """Bits needed for one flat cell index: ceil(ndim * log2(side))."""
        return _ceil_log2(self.size)

    @property
    def diff_width(self) -> int:
        """Bits per difference-offset field (hdrf): ceil(log2(volume+1))."""
        if self.kind != "hdrf":
            raise ParameterError("diff_width only applies to hdrf")
        return _ceil_log2(volume(self.shape) + 1)

    def shape_count(self) -> int:
        """Number of candidate deletion shapes (vzrcf: the minimal shapes)."""
        if self.kind != "vzrcf":
            return 1
        from .constraints import minimal_shape_set

        return len(minimal_shape_set(self.min_volume, self.side, self.ndim))


@lru_cache(maxsize=None)
def payload_widths(config: ConstraintConfig) -> tuple[int, ...]:
    """Ordered fixed bit widths of the metadata fields for one collapse."""
    w_pos = config.position_width
    if config.kind == "zrcf":
        return (w_pos,)
    if config.kind == "vzrcf":
        return (_ceil_log2(config.shape_count()), w_pos)
    if config.kind == "rf":
        return (w_pos, w_pos)
    widths = [w_pos, w_pos]
    widths.extend([config.diff_width] * (config.min_distance - 1))
    return tuple(widths)


def payload_length(config: ConstraintConfig) -> int:
    return sum(payload_widths(config))


@dataclass(frozen=True)
class Feasibility:
    """Outcome of the payload-fits-in-one-deletion check."""

    ok: bool
    payload_bits: int
    slots_needed: int  # payload_bits + 1 reserved slot
    slots_available: int  # smallest deletable volume
    reason: str | None = None


def check_feasibility(config: ConstraintConfig) -> Feasibility:
    """Can every collapse fit its metadata into the emptied cells?

    The deletion frees ``volume(shape)`` slots; one stays reserved, the rest
    must hold the payload.  For the volume-threshold constraint every
    deletable box is one of the minimal shapes, so the budget is the
    smallest of their volumes (at least ``min_volume``, and strictly more
    when no box of exactly that volume fits the array).
    """
    bits = payload_length(config)
    needed = bits + 1
    if config.kind == "vzrcf":
        from .constraints import minimal_shape_set

        shapes = minimal_shape_set(config.min_volume, config.side, config.ndim)
        if len(shapes) == 0:
            return Feasibility(
                False, bits, needed, 0,
                f"no shape of volume >= {config.min_volume} fits in side {config.side}",
            )
        budget = min(volume(shape) for shape in shapes)
        name = f"smallest deletable volume {budget} (threshold {config.min_volume})"
    else:
        budget = volume(config.shape)
        name = f"volume {budget} of shape {config.shape}"
    if needed > budget:
        return Feasibility(
            False, bits, needed, budget,
            f"payload needs {bits}+1 emptied cells but {name} provides only {budget}",
        )
    return Feasibility(True, bits, needed, budget)


def require_feasible(config: ConstraintConfig) -> None:
    result = check_feasibility(config)
    if not result.ok:
        raise FeasibilityError(result.reason)


def encode_field(value: int, width: int) -> list[int]:
    """Fixed-width big-endian bits of a non-negative integer."""
    if value < 0 or value >> width:
        raise ParameterError(f"value {value} does not fit in {width} bits")
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def decode_field(bits: Sequence[int]) -> int:
    value = 0
    for bit in bits:
        value = (value << 1) | int(bit)
    return value


class AlmostArray:
    """A cubic array whose reserved slot (last vectorized cell) is empty.

    Carried as the ``side**ndim - 1`` defined bits in vectorized order.
    """

    __slots__ = ("side", "ndim", "bits")

    def __init__(self, side: int, ndim: int, bits: np.ndarray | Sequence[int]):
        data = np.asarray(bits, dtype=np.uint8).copy()
        if data.shape != (side**ndim - 1,):
            raise StructuralError(
                f"expected {side**ndim - 1} defined bits, got {data.size}"
            )
        data.setflags(write=False)
        self.side = side
        self.ndim = ndim
        self.bits = data

    @classmethod
    def strip_reserved(cls, array: BitArray) -> tuple["AlmostArray", int]:
        """Split a full array into (rest, value of the reserved slot)."""
        return (
            cls(array.side, array.ndim, array.bits[:-1]),
            int(array.bits[-1]),
        )

    def attach_marker(self, marker: int) -> BitArray:
        """Fill the reserved slot and return the full array."""
        full = np.empty(self.bits.size + 1, dtype=np.uint8)
        full[:-1] = self.bits
        full[-1] = marker
        return BitArray(self.side, self.ndim, full)

    def key(self) -> bytes:
        return self.bits.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlmostArray):
            return NotImplemented
        return (
            self.side == other.side
            and self.ndim == other.ndim
            and np.array_equal(self.bits, other.bits)
        )

    def __repr__(self) -> str:
        return f"AlmostArray(side={self.side}, ndim={self.ndim}, bits={self.bits.tolist()})"


def write_payload(
    compacted: CompactedArray, values: Sequence[int], config: ConstraintConfig
) -> AlmostArray:
    """Fill the emptied region: zeros, then the fields, reserved slot last.

    The fields always end at the next-to-last flat index, so their location
    does not depend on how large the deleted box was; any emptied slots in
    front of them are zeroed.
    """
    widths = payload_widths(config)
    total = sum(widths)
    if total + 1 > compacted.gap:
        raise FeasibilityError(
            f"payload of {total} bits plus reserved slot exceeds gap {compacted.gap}"
        )
    if len(values) != len(widths):
        raise ParameterError(f"expected {len(widths)} field values, got {len(values)}")
    field_bits: list[int] = []
    for value, width in zip(values, widths):
        field_bits.extend(encode_field(value, width))
    pad = compacted.gap - 1 - total
    bits = np.concatenate(
        [
            compacted.survivors,
            np.zeros(pad, dtype=np.uint8),
            np.array(field_bits, dtype=np.uint8),
        ]
    )
    return AlmostArray(compacted.side, compacted.ndim, bits)


def read_payload(almost: AlmostArray, config: ConstraintConfig) -> tuple[int, ...]:
    """Read the field values back out of an almost-full array.

    Splits the fixed payload window into the configured widths and checks
    each value against its universe (cell count, shape count).  Geometric
    checks (box in bounds, distinct positions) belong to the codec that
    knows what the fields mean.
    """
    widths = payload_widths(config)
    total = sum(widths)
    size = config.size
    window = almost.bits[size - 1 - total : size - 1].tolist()
    values = []
    at = 0
    for width in widths:
        values.append(decode_field(window[at : at + width]))
        at += width
    # Universe checks that do not need geometry.
    if config.kind == "zrcf":
        limit_names = [("cell index", size)]
    elif config.kind == "vzrcf":
        limit_names = [("shape index", config.shape_count()), ("cell index", size)]
    else:
        limit_names = [("cell index", size), ("cell index", size)]
    for value, (name, limit) in zip(values, limit_names):
        if value >= limit:
            raise CorruptStreamError(f"decoded {name} {value} out of range (< {limit})")
    return tuple(values)


class ConstraintCodec(Protocol):
    """What the generic encoder/decoder needs from a constraint."""

    config: ConstraintConfig

    def is_valid(self, array: BitArray) -> bool: ...

    def collapse(self, array: BitArray) -> AlmostArray: ...

    def expand(self, almost: AlmostArray) -> BitArray: ...


def encode(
    message: Sequence[int] | np.ndarray,
    codec: ConstraintCodec,
    *,
    max_iterations: int | None = None,
    forbid_revisit: bool = False,
) -> tuple[BitArray, int]:
    """Map a message of ``size - 1`` bits to a valid array of ``size`` bits.

    Returns the array and the number of collapse steps taken.  Unbounded by
    default; ``max_iterations`` is a diagnostic only (the loop provably
    terminates).  ``forbid_revisit`` keeps a visited-set and raises if any
    state repeats, which would contradict injectivity of the step map.
    """
    config = codec.config
    require_feasible(config)
    bits = np.asarray(message, dtype=np.uint8)
    if bits.shape != (config.message_bits,):
        raise ParameterError(
            f"message must be {config.message_bits} bits, got {bits.size}"
        )
    array = AlmostArray(config.side, config.ndim, bits).attach_marker(0)
    seen: set[bytes] | None = set() if forbid_revisit else None
    iterations = 0
    while not codec.is_valid(array):
        if seen is not None:
            key = array.key()
            if key in seen:
                raise ContractViolation("encoder revisited a state")
            seen.add(key)
        if max_iterations is not None and iterations >= max_iterations:
            raise IterationCapError(
                f"diagnostic iteration cap {max_iterations} exceeded"
            )
        array = codec.collapse(array).attach_marker(1)
        iterations += 1
    return array, iterations


def decode(
    array: BitArray,
    codec: ConstraintCodec,
    *,
    require_valid: bool = False,
    max_iterations: int | None = None,
) -> np.ndarray:
    """Recover the message: pop the reserved slot until it reads 0."""
    config = codec.config
    if array.size != config.size:
        raise ParameterError(
            f"array has {array.size} cells, config expects {config.size}"
        )
    if require_valid and not codec.is_valid(array):
        raise CorruptStreamError("array does not satisfy the constraint")
    iterations = 0
    while True:
        almost, marker = AlmostArray.strip_reserved(array)
        if marker == 0:
            return almost.bits.copy()
        if max_iterations is not None and iterations >= max_iterations:
            raise IterationCapError(
                f"diagnostic iteration cap {max_iterations} exceeded"
            )
        array = codec.expand(almost)
        iterations += 1


def decode_iterations(array: BitArray, codec: ConstraintCodec) -> int:
    """Number of expand steps a decode of this array performs."""
    count = 0
    while True:
        almost, marker = AlmostArray.strip_reserved(array)
        if marker == 0:
            return count
        array = codec.expand(almost)
        count += 1


def minimal_square_side(
    kind: str, side: int, ndim: int, *, min_distance: int | None = None
) -> int:
    """Smallest square box extent that makes the constraint encodable.

    Searches the payload-fits inequality directly, so the answer may exceed
    ``side`` (meaning no square box works inside this array at all); when it
    does not, a config with that square shape passes check_feasibility and
    any smaller square fails it.
    """
    if kind not in ("zrcf", "rf", "hdrf"):
        raise ParameterError(f"no square-side bound for kind {kind!r}")
    if side < 2 or ndim < 1:
        raise ParameterError("side must be >= 2 and ndim >= 1")
    w_pos = _ceil_log2(side**ndim)
    if kind == "hdrf" and (min_distance is None or min_distance < 1):
        raise ParameterError("hdrf needs min_distance >= 1")
    extent = 1
    while True:
        cells = extent**ndim
        if kind == "zrcf":
            needed = w_pos + 1
        elif kind == "rf":
            needed = 2 * w_pos + 1
        else:
            needed = 2 * w_pos + (min_distance - 1) * _ceil_log2(cells + 1) + 1
        if needed <= cells:
            return extent
        extent += 1


def minimal_volume_threshold(side: int, ndim: int) -> int | None:
    """Smallest volume threshold the volume-bounded codec can support.

    None when even the full array's volume cannot hold the payload.
    """
    if side < 2 or ndim < 1:
        raise ParameterError("side must be >= 2 and ndim >= 1")
    for threshold in range(1, side**ndim + 1):
        config = ConstraintConfig("vzrcf", side, ndim, min_volume=threshold)
        if check_feasibility(config).ok:
            return threshold
    return None
