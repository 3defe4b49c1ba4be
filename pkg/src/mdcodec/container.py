"""Bit-exact file container for streams of encoded arrays.

Layout (all multi-byte integers big-endian):

    magic    4 bytes  b"MDC1"
    version  1 byte   (1)
    kind     1 byte   1=zrcf 2=vzrcf 3=rf 4=hdrf
    ndim     1 byte
    side     4 bytes
    params   zrcf/rf: ndim x 4-byte shape extents
             hdrf:    ndim x 4-byte shape extents, then 4-byte min_distance
             vzrcf:   8-byte min_volume
    bits     8 bytes  original message length in bits
    blocks   ceil(bits / k) arrays of side**ndim bits each, k = side**ndim - 1,
             packed back to back MSB-first in vectorized order; the final
             byte is zero-padded

The message stream is chopped into k-bit chunks (last chunk zero-padded),
each chunk is encoded independently, and the header's bit count says where
the payload ends, so framing needs no terminator.
"""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass, field

import numpy as np

from .arrays import BitArray
from .constraints import make_codec
from .errors import CorruptStreamError, MdcodecError, ParameterError
from .framework import (
    ConstraintConfig,
    decode,
    decode_iterations,
    encode,
    require_feasible,
)
from .oracle import brute_valid

MAGIC = b"MDC1"
VERSION = 1
KIND_IDS = {"zrcf": 1, "vzrcf": 2, "rf": 3, "hdrf": 4}
KIND_NAMES = {v: k for k, v in KIND_IDS.items()}


def write_header(config: ConstraintConfig, payload_bit_length: int) -> bytes:
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(KIND_IDS[config.kind])
    out.append(config.ndim)
    out += struct.pack(">I", config.side)
    if config.kind == "vzrcf":
        out += struct.pack(">Q", config.min_volume)
    else:
        for extent in config.shape:
            out += struct.pack(">I", extent)
        if config.kind == "hdrf":
            out += struct.pack(">I", config.min_distance)
    out += struct.pack(">Q", payload_bit_length)
    return bytes(out)


def read_header(blob: bytes) -> tuple[ConstraintConfig, int, int]:
    """Parse and validate a header; returns (config, payload bits, header size)."""

    def take(count: int, what: str) -> bytes:
        nonlocal at
        if at + count > len(blob):
            raise CorruptStreamError(f"truncated header while reading {what}")
        piece = blob[at : at + count]
        at += count
        return piece

    at = 0
    if take(4, "magic") != MAGIC:
        raise CorruptStreamError("bad magic; not a container")
    version = take(1, "version")[0]
    if version != VERSION:
        raise CorruptStreamError(f"unsupported container version {version}")
    kind_id = take(1, "constraint id")[0]
    if kind_id not in KIND_NAMES:
        raise CorruptStreamError(f"unknown constraint id {kind_id}")
    kind = KIND_NAMES[kind_id]
    ndim = take(1, "ndim")[0]
    side = struct.unpack(">I", take(4, "side"))[0]
    shape = None
    min_volume = None
    min_distance = None
    if kind == "vzrcf":
        min_volume = struct.unpack(">Q", take(8, "min_volume"))[0]
    else:
        shape = tuple(
            struct.unpack(">I", take(4, f"shape[{j}]"))[0] for j in range(ndim)
        )
        if kind == "hdrf":
            min_distance = struct.unpack(">I", take(4, "min_distance"))[0]
    payload_bits = struct.unpack(">Q", take(8, "bit length"))[0]
    try:
        config = ConstraintConfig(
            kind, side, ndim,
            shape=shape, min_volume=min_volume, min_distance=min_distance,
        )
        require_feasible(config)
    except MdcodecError as exc:
        raise CorruptStreamError(f"header declares an unusable config: {exc}") from None
    return config, payload_bits, at


def encode_file(
    data: bytes, config: ConstraintConfig, *, max_iterations: int | None = None
) -> bytes:
    """Encode a byte stream into a container; deterministic for a given input."""
    require_feasible(config)
    codec = make_codec(config)
    k = config.message_bits
    message_bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    block_count = -(-len(message_bits) // k) if len(message_bits) else 0
    padded = np.zeros(block_count * k, dtype=np.uint8)
    padded[: len(message_bits)] = message_bits
    stream = np.empty(block_count * config.size, dtype=np.uint8)
    for index in range(block_count):
        array, _ = encode(
            padded[index * k : (index + 1) * k], codec, max_iterations=max_iterations
        )
        stream[index * config.size : (index + 1) * config.size] = array.bits
    return write_header(config, len(message_bits)) + np.packbits(stream).tobytes()


def decode_file(blob: bytes, *, max_iterations: int | None = None) -> bytes:
    """Recover the exact byte stream a container was built from."""
    config, payload_bits, header_size = read_header(blob)
    codec = make_codec(config)
    k = config.message_bits
    block_count = -(-payload_bits // k) if payload_bits else 0
    stream_bits = block_count * config.size
    body = blob[header_size:]
    if len(body) != (stream_bits + 7) // 8:
        raise CorruptStreamError(
            f"body has {len(body)} bytes, expected {(stream_bits + 7) // 8} "
            f"for {block_count} blocks"
        )
    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8))
    if bits[stream_bits:].any():
        raise CorruptStreamError("trailing padding bits must be zero")
    message = np.empty(block_count * k, dtype=np.uint8)
    for index in range(block_count):
        block = bits[index * config.size : (index + 1) * config.size]
        array = BitArray(config.side, config.ndim, block)
        try:
            message[index * k : (index + 1) * k] = decode(
                array, codec, max_iterations=max_iterations
            )
        except MdcodecError as exc:
            raise CorruptStreamError(f"block {index} failed to decode: {exc}") from None
    return np.packbits(message[:payload_bits]).tobytes()


@dataclass
class CheckReport:
    """Validity sweep over a container's blocks."""

    config: ConstraintConfig
    payload_bits: int
    blocks: int = 0
    invalid_blocks: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.invalid_blocks

    def summary(self) -> str:
        lines = [
            f"constraint: {describe_config(self.config)}",
            f"payload bits: {self.payload_bits}",
            f"blocks: {self.blocks}",
            f"result: {'PASS' if self.passed else 'FAIL'}",
        ]
        for index in self.invalid_blocks[:10]:
            lines.append(f"invalid block: {index}")
        return "\n".join(lines)


def check_container(blob: bytes) -> CheckReport:
    """Every block must satisfy the naive validator for the declared config."""
    config, payload_bits, header_size = read_header(blob)
    k = config.message_bits
    block_count = -(-payload_bits // k) if payload_bits else 0
    report = CheckReport(config, payload_bits, block_count)
    body = blob[header_size:]
    if len(body) != (block_count * config.size + 7) // 8:
        raise CorruptStreamError("body length inconsistent with declared bit length")
    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8))
    for index in range(block_count):
        block = bits[index * config.size : (index + 1) * config.size]
        if not brute_valid(BitArray(config.side, config.ndim, block), config):
            report.invalid_blocks.append(index)
    return report


@dataclass
class StatsReport:
    """Iteration-count distribution and timing over encoded or decoded blocks."""

    label: str
    blocks: int = 0
    iteration_histogram: dict[int, int] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def mean_iterations(self) -> float:
        if not self.blocks:
            return 0.0
        total = sum(count * times for count, times in self.iteration_histogram.items())
        return total / self.blocks

    def record(self, iterations: int) -> None:
        self.blocks += 1
        self.iteration_histogram[iterations] = (
            self.iteration_histogram.get(iterations, 0) + 1
        )

    def summary(self) -> str:
        hist = " ".join(
            f"{k}:{v}" for k, v in sorted(self.iteration_histogram.items())
        )
        per_block = self.seconds / self.blocks if self.blocks else 0.0
        return "\n".join(
            [
                f"stats: {self.label}",
                f"blocks: {self.blocks}",
                f"iterations histogram: {hist or '(empty)'}",
                f"mean iterations: {self.mean_iterations:.4f}",
                f"wall time: {self.seconds:.3f}s total, {per_block * 1e3:.3f}ms per block",
            ]
        )


def container_stats(blob: bytes) -> StatsReport:
    """Decode every block of a container, counting expansion steps."""
    config, payload_bits, header_size = read_header(blob)
    codec = make_codec(config)
    k = config.message_bits
    block_count = -(-payload_bits // k) if payload_bits else 0
    report = StatsReport(f"container {describe_config(config)}")
    bits = np.unpackbits(np.frombuffer(blob[header_size:], dtype=np.uint8))
    begin = time.perf_counter()
    for index in range(block_count):
        block = bits[index * config.size : (index + 1) * config.size]
        array = BitArray(config.side, config.ndim, block)
        report.record(decode_iterations(array, codec))
    report.seconds = time.perf_counter() - begin
    return report


def trial_stats(
    config: ConstraintConfig,
    trials: int,
    seed: int = 0,
    *,
    max_iterations: int | None = None,
) -> StatsReport:
    """Encode seeded random messages and histogram the iteration counts."""
    if trials < 1:
        raise ParameterError("need at least one trial")
    require_feasible(config)
    codec = make_codec(config)
    rng = np.random.default_rng(seed)
    report = StatsReport(
        f"{trials} random messages, {describe_config(config)}, seed {seed}"
    )
    begin = time.perf_counter()
    for _ in range(trials):
        message = rng.integers(0, 2, size=config.message_bits, dtype=np.uint8)
        _, iterations = encode(message, codec, max_iterations=max_iterations)
        report.record(iterations)
    report.seconds = time.perf_counter() - begin
    return report


def describe_config(config: ConstraintConfig) -> str:
    base = f"{config.kind} side={config.side} ndim={config.ndim}"
    if config.kind == "vzrcf":
        return f"{base} min_volume={config.min_volume}"
    base += f" shape={'x'.join(str(e) for e in config.shape)}"
    if config.kind == "hdrf":
        base += f" min_distance={config.min_distance}"
    return base
