"""Zero-box avoidance by VOLUME: forbid any all-zero box of v >= V cells.

Scanning every shape of volume >= V would be wasteful: any such all-zero
box can be shrunk, extent by extent, down to a MINIMAL shape (one that
cannot lose a step without dropping below V).  So the codec scans only the
minimal shapes, and the collapse payload stores which minimal shape was
deleted (a small index) plus where.
"""

import math

import numpy as np

from mdcodec import (
    BitArray,
    ConstraintConfig,
    brute_valid,
    decode,
    encode,
    make_codec,
    minimal_shape_set,
)

print("minimal shapes for a few thresholds (2-D, generous side):")
for threshold in (4, 5, 6, 12):
    shapes = minimal_shape_set(threshold, side=16, ndim=2)
    print(f"  V={threshold}: {list(shapes)}")
print()

print("their count grows like sqrt(V) in 2-D:")
for threshold in (16, 64, 256, 1024, 4096):
    count = len(minimal_shape_set(threshold, side=threshold, ndim=2))
    print(f"  V={threshold}: {count} minimal shapes, ratio {count / math.sqrt(threshold):.2f}")
print()

config = ConstraintConfig("vzrcf", side=4, ndim=2, min_volume=5)
codec = make_codec(config)
print("constraint: no all-zero box of volume >= 5 in a 4x4 array")
print("minimal shapes that fit side 4:", list(codec.shapes))
print("(volume-5 strips like 1x5 do not fit, so every deletion frees 6 cells)")
print()

witness = codec.find_violation(BitArray.zeros(4, 2))
print(
    "all-zero array: first witness is shape", codec.shapes[witness.shape_index],
    "at", witness.position,
)

message = np.zeros(config.message_bits, dtype=np.uint8)
array, iterations = encode(message, codec)
print(f"worst-case message encodes in {iterations} rounds")
print("valid:", brute_valid(array, config))
print("roundtrip:", bool(np.array_equal(decode(array, codec), message)))
