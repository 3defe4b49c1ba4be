"""How large must the forbidden box be for one redundancy bit to suffice?

One collapse must fit its whole payload, plus the reserved slot, into the
cells the deletion frees.  That lower-bounds the box volume by the payload
width + 1, and for square boxes gives a closed-form minimal extent that
grows only with log(side).
"""

from mdcodec import ConstraintConfig, check_feasibility
from mdcodec.framework import minimal_square_side, minimal_volume_threshold

print("minimal square extent per constraint (2-D):")
print(f"{'side':>8} {'zero-box':>9} {'repeat':>7} {'near-repeat p=2':>16}")
for side in (4, 16, 256, 4096, 65536, 2**20):
    zero_box = minimal_square_side("zrcf", side, 2)
    repeat = minimal_square_side("rf", side, 2)
    near = minimal_square_side("hdrf", side, 2, min_distance=2)
    print(f"{side:>8} {zero_box:>9} {repeat:>7} {near:>16}")
print()
print("a million-cell-wide array only needs a 7x7 repeat-free box: the cost")
print("of one redundancy bit is logarithmic in the array size.")
print()

print("dimension matters too (zero-box, side 256):")
for ndim in (1, 2, 3, 4):
    extent = minimal_square_side("zrcf", 256, ndim)
    config = ConstraintConfig("zrcf", 256, ndim, shape=(extent,) * ndim)
    result = check_feasibility(config)
    print(
        f"  {ndim}-D: extent {extent} "
        f"(payload {result.payload_bits}+1 in volume {result.slots_available})"
    )
print()

print("volume-threshold constraint: smallest supportable V (2-D):")
for side in (4, 16, 256, 4096):
    print(f"  side {side:>5}: V >= {minimal_volume_threshold(side, 2)}")
