"""Deliberately naive validators and audit harnesses.

Everything here evaluates constraint definitions directly: nested loops
over every position, shape, or pair, with no pruning and no code shared
with the production codecs beyond the array primitives.  Slow on purpose;
the point is to have an independent second opinion at desk scale.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import numpy as np

from .arrays import BitArray, check_region, subarray_cells, volume
from .errors import MdcodecError, ParameterError
from .framework import ConstraintConfig, decode, encode
from .constraints import Violation, make_codec, minimal_shape_set


def _window(nd: np.ndarray, start, shape) -> np.ndarray:
    return nd[tuple(slice(c, c + e) for c, e in zip(start, shape))]


def _starts(side: int, shape) -> Iterable[tuple[int, ...]]:
    return product(*[range(side - e + 1) for e in shape])


def brute_valid(array: BitArray, config: ConstraintConfig) -> bool:
    """Evaluate the constraint definition literally, with no shortcuts."""
    nd = array.to_ndarray()
    side, ndim = array.side, array.ndim
    if config.kind == "zrcf":
        for start in _starts(side, config.shape):
            if not _window(nd, start, config.shape).any():
                return False
        return True
    if config.kind == "vzrcf":
        for shape in product(range(1, side + 1), repeat=ndim):
            if math.prod(shape) < config.min_volume:
                continue
            for start in _starts(side, shape):
                if not _window(nd, start, shape).any():
                    return False
        return True
    if config.kind == "rf":
        starts = list(_starts(side, config.shape))
        for i, a in enumerate(starts):
            wa = _window(nd, a, config.shape)
            for b in starts[i + 1 :]:
                if np.array_equal(wa, _window(nd, b, config.shape)):
                    return False
        return True
    if config.kind == "hdrf":
        starts = list(_starts(side, config.shape))
        for i, a in enumerate(starts):
            wa = _window(nd, a, config.shape)
            for b in starts[i + 1 :]:
                wb = _window(nd, b, config.shape)
                if int(np.count_nonzero(wa != wb)) < config.min_distance:
                    return False
        return True
    raise ParameterError(f"unknown constraint kind {config.kind!r}")


@dataclass
class AuditReport:
    """Outcome of one audit sweep over a message or array population."""

    label: str
    population: int = 0
    failures: list[tuple] = field(default_factory=list)
    iteration_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record_iterations(self, count: int) -> None:
        self.iteration_histogram[count] = self.iteration_histogram.get(count, 0) + 1

    def summary(self) -> str:
        lines = [
            f"audit: {self.label}",
            f"population: {self.population}",
            f"result: {'PASS' if self.passed else f'FAIL ({len(self.failures)} failures)'}",
        ]
        if self.iteration_histogram:
            hist = " ".join(
                f"{k}:{v}" for k, v in sorted(self.iteration_histogram.items())
            )
            lines.append(f"iterations: {hist}")
        for failure in self.failures[:10]:
            lines.append(f"failure: {failure}")
        return "\n".join(lines)


EXHAUSTIVE_MESSAGE_BITS = 16  # full enumeration up to 2^16 inputs


def _message_bits(value: int, length: int) -> np.ndarray:
    return ((value >> np.arange(length, dtype=np.int64)) & 1).astype(np.uint8)


def exhaustive_roundtrip(
    config: ConstraintConfig,
    *,
    samples: int = 100_000,
    seed: int = 0,
    exhaustive: bool | None = None,
    codec=None,
) -> AuditReport:
    """Check decode(encode(x)) == x and validity of encode(x) over messages.

    Exhausts the whole message space when it has at most 2^16 members,
    otherwise draws seeded random messages; pass ``exhaustive`` to override.
    Every encoding also runs the revisit assertion, so a
    terminating-but-cycling encoder cannot hide.
    """
    codec = codec if codec is not None else make_codec(config)
    k = config.message_bits
    if exhaustive is None:
        exhaustive = k <= EXHAUSTIVE_MESSAGE_BITS
    elif exhaustive and k > EXHAUSTIVE_MESSAGE_BITS:
        raise ParameterError(
            f"message space 2^{k} is too large to exhaust"
        )
    label = f"roundtrip {config.kind} side={config.side} ndim={config.ndim} " + (
        "exhaustive" if exhaustive else f"{samples} samples seed={seed}"
    )
    report = AuditReport(label)
    if exhaustive:
        messages: Iterable[np.ndarray] = (
            _message_bits(v, k) for v in range(2**k)
        )
    else:
        rng = np.random.default_rng(seed)
        messages = (rng.integers(0, 2, size=k, dtype=np.uint8) for _ in range(samples))
    for message in messages:
        report.population += 1
        encoded, iterations = encode(message, codec, forbid_revisit=True)
        report.record_iterations(iterations)
        if not brute_valid(encoded, config):
            report.failures.append((message.tolist(), "valid output", "invalid"))
            continue
        recovered = decode(encoded, codec)
        if not np.array_equal(recovered, message):
            report.failures.append(
                (message.tolist(), message.tolist(), recovered.tolist())
            )
    return report


def injectivity_audit(config: ConstraintConfig, *, codec=None) -> AuditReport:
    """Collapse every invalid array; images must be distinct and invertible.

    Exhausts all arrays of the configured size, so the array can hold at
    most 16 cells.  The invalid set is chosen by the naive validator, not
    by the codec under test.
    """
    codec = codec if codec is not None else make_codec(config)
    size = config.size
    if size > EXHAUSTIVE_MESSAGE_BITS:
        raise ParameterError(
            f"exhaustive audit limited to {EXHAUSTIVE_MESSAGE_BITS} cells, got {size}"
        )
    report = AuditReport(
        f"injectivity {config.kind} side={config.side} ndim={config.ndim}"
    )
    images: dict[bytes, int] = {}
    for value in range(2**size):
        array = BitArray.from_int(config.side, config.ndim, value)
        if brute_valid(array, config):
            continue
        report.population += 1
        # A collapse or expansion that errors out is itself an audit failure,
        # so broken codecs under test get reported instead of crashing the sweep.
        try:
            collapsed = codec.collapse(array)
        except MdcodecError as exc:
            report.failures.append((value, "collapse", f"error: {exc}"))
            continue
        key = collapsed.key()
        if key in images:
            report.failures.append((value, "distinct image", images[key]))
        else:
            images[key] = value
        try:
            recovered = codec.expand(collapsed)
        except MdcodecError as exc:
            report.failures.append((value, "identity", f"error: {exc}"))
            continue
        if recovered != array:
            report.failures.append((value, "identity", recovered.to_int()))
    return report


class _ParityClasses:
    """Union-find with XOR weights: cells forced equal or forced opposite."""

    def __init__(self, count: int):
        self.parent = list(range(count))
        self.parity = [0] * count  # bit relative to the root

    def find(self, cell: int) -> tuple[int, int]:
        path = []
        while self.parent[cell] != cell:
            path.append(cell)
            cell = self.parent[cell]
        offset = 0
        for node in reversed(path):
            offset ^= self.parity[node]
            self.parent[node] = cell
            self.parity[node] = offset
        return cell, offset

    def union(self, a: int, b: int, flip: int) -> bool:
        """Impose bits[a] ^ bits[b] == flip; False on contradiction."""
        root_a, par_a = self.find(a)
        root_b, par_b = self.find(b)
        if root_a == root_b:
            return (par_a ^ par_b) == flip
        self.parent[root_b] = root_a
        self.parity[root_b] = par_a ^ par_b ^ flip
        return True


def plant_instance(
    config: ConstraintConfig, witness: Violation, seed: int = 0
) -> BitArray:
    """A seeded random array that contains the requested violation.

    For the zero-box kinds the witness box is zeroed.  For the pairwise
    kinds, the two boxes are made equal (XOR the requested difference
    offsets), honoring every equality the overlap forces; a difference
    pattern the overlap contradicts raises a parameter error.
    """
    rng = random.Random(seed)
    side, ndim, size = config.side, config.ndim, config.size

    if config.kind in ("zrcf", "vzrcf"):
        if config.kind == "zrcf":
            shape = config.shape
        else:
            shapes = minimal_shape_set(config.min_volume, side, ndim)
            shape = shapes[witness.shape_index or 0]
        check_region(witness.position, shape, side, ndim)
        bits = [rng.randrange(2) for _ in range(size)]
        for cell in subarray_cells(witness.position, shape, side):
            bits[cell] = 0
        return BitArray(side, ndim, bits)

    if config.kind in ("rf", "hdrf"):
        shape = config.shape
        if witness.partner is None or tuple(witness.partner) == tuple(witness.position):
            raise ParameterError("pairwise witness needs two distinct positions")
        check_region(witness.position, shape, side, ndim)
        check_region(witness.partner, shape, side, ndim)
        offsets = set(witness.diff_offsets or ())
        if any(off < 0 or off >= volume(shape) for off in offsets):
            raise ParameterError("difference offsets must index cells of the box")
        if config.kind == "hdrf" and len(offsets) >= config.min_distance:
            raise ParameterError(
                "a violating pair differs in fewer than min_distance cells"
            )
        if config.kind == "rf" and offsets:
            raise ParameterError("repeat-free witness pairs are identical")
        first_cells = subarray_cells(witness.position, shape, side)
        second_cells = subarray_cells(witness.partner, shape, side)
        classes = _ParityClasses(size)
        for off in range(len(first_cells)):
            flip = 1 if off in offsets else 0
            if not classes.union(int(first_cells[off]), int(second_cells[off]), flip):
                raise ParameterError(
                    "difference pattern is inconsistent with the overlap"
                )
        root_bits = {}
        bits = []
        for cell in range(size):
            root, parity = classes.find(cell)
            if root not in root_bits:
                root_bits[root] = rng.randrange(2)
            bits.append(root_bits[root] ^ parity)
        return BitArray(side, ndim, bits)

    raise ParameterError(f"unknown constraint kind {config.kind!r}")
