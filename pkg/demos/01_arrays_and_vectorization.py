"""Tour of the array primitives: positions, flat order, deletion, reinsertion.

Every d-dimensional array here is cubic and lives flat in "vectorized"
order: position (i1, ..., id) sits at flat index i1 + i2*n + ... + id*n^(d-1),
so the first coordinate ticks fastest.  Deleting a box compacts the
survivors to the front of that order and leaves the empty region at the end.
"""

import numpy as np

from mdcodec import (
    BitArray,
    delete_subarray,
    devectorize,
    extract_subarray,
    reinsert_subarray,
    subarray_cells,
    vectorize,
    volume,
)

side, ndim = 5, 3
print(f"A {side}^{ndim} array has {side**ndim} cells.")
print("position (0, 2, 2) lives at flat index", vectorize((0, 2, 2), side))
print("flat index 60 maps back to", devectorize(60, side, ndim))
print()

start, shape = (0, 2, 2), (1, 3, 2)
print(f"A box at {start} with extents {shape} covers {volume(shape)} cells:")
print("  flat indices:", subarray_cells(start, shape, side).tolist())
print()

rng = np.random.default_rng(0)
array = BitArray(side, ndim, rng.integers(0, 2, side**ndim, dtype=np.uint8))
saved = extract_subarray(array, start, shape)
print("bits inside the box, in ascending cell order:", saved.tolist())

compacted = delete_subarray(array, start, shape)
print(f"after deletion: {compacted.survivors.size} survivors, {compacted.gap} empty slots")
print("the empty slots are the LAST flat indices, so the survivors start aligned.")

rebuilt = reinsert_subarray(compacted, saved)
print("reinserting the saved bits restores the array exactly:", rebuilt == array)
print()

partial = reinsert_subarray(compacted, None)
print(
    "reinserting with no fill leaves a hole of", partial.undefined_count,
    "cells, exactly the deleted box; codecs recompute those cells instead.",
)
