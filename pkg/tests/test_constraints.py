import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdcodec import (
    AlmostArray,
    BitArray,
    ConstraintConfig,
    ContractViolation,
    CorruptStreamError,
    ParameterError,
    Violation,
    brute_valid,
    decode,
    delete_subarray,
    encode,
    make_codec,
    minimal_shape_set,
    plant_instance,
    reconstruct_repeat,
    reinsert_subarray,
    vectorize,
)

ZRCF = ConstraintConfig("zrcf", 4, 2, shape=(2, 3))
RF = ConstraintConfig("rf", 4, 2, shape=(3, 3))
HDRF = ConstraintConfig("hdrf", 5, 2, shape=(4, 4), min_distance=2)
VZRCF = ConstraintConfig("vzrcf", 4, 2, min_volume=5)


def array_of(side, ndim, one_positions):
    bits = np.zeros(side**ndim, dtype=np.uint8)
    for pos in one_positions:
        bits[vectorize(pos, side)] = 1
    return BitArray(side, ndim, bits)


class TestZrcfIndicator:
    def test_all_ones_valid(self):
        codec = make_codec(ZRCF)
        assert codec.is_valid(BitArray(4, 2, [1] * 16))

    def test_all_zeros_witness_origin(self):
        codec = make_codec(ZRCF)
        witness = codec.find_violation(BitArray.zeros(4, 2))
        assert witness == Violation(position=(0, 0))

    def test_single_one_outside_windows(self):
        codec = make_codec(ZRCF)
        witness = codec.find_violation(array_of(4, 2, [(3, 3)]))
        assert witness.position == (0, 0)

    def test_witness_is_first_in_flat_order(self):
        codec = make_codec(ZRCF)
        # kill the origin window, leave one at (1, 0) zeroed too; the
        # origin must win because its flat index is smaller
        array = array_of(4, 2, [(3, 0), (3, 1), (3, 2), (0, 3), (1, 3), (2, 3), (3, 3)])
        witness = codec.find_violation(array)
        naive = min(
            (
                pos
                for pos in itertools.product(range(3), range(2))
                if not any(
                    array.bit((pos[0] + a, pos[1] + b))
                    for a in range(2)
                    for b in range(3)
                )
            ),
            key=lambda pos: vectorize(pos, 4),
        )
        assert witness.position == naive


class TestZrcfRoundtrip:
    def test_all_zero_collapse_trace(self):
        codec = make_codec(ZRCF)
        almost = codec.collapse(BitArray.zeros(4, 2))
        # ten zero survivors, one zero pad, payload 0000; fifteen zeros total
        assert almost.bits.tolist() == [0] * 15

    def test_collapse_expand_identity(self):
        codec = make_codec(ZRCF)
        array = array_of(4, 2, [(3, 3), (0, 0)])
        if codec.is_valid(array):
            pytest.skip("not a violation")
        assert codec.expand(codec.collapse(array)) == array

    def test_collapse_on_valid_array_refused(self):
        codec = make_codec(ZRCF)
        with pytest.raises(ContractViolation):
            codec.collapse(BitArray(4, 2, [1] * 16))

    def test_expand_bounds_check(self):
        codec = make_codec(ZRCF)
        # position (3, 3) cannot start a 2x3 box at side 4
        bad = AlmostArray(4, 2, [0] * 11 + [1, 1, 1, 1])
        with pytest.raises(CorruptStreamError):
            codec.expand(bad)


class TestMinimalShapes:
    def test_examples(self):
        assert minimal_shape_set(4, 8, 2).shapes == ((1, 4), (2, 2), (4, 1))
        assert minimal_shape_set(5, 4, 2).shapes == ((2, 3), (3, 2))
        assert minimal_shape_set(3, 8, 1).shapes == ((3,),)

    def test_too_large_threshold(self):
        with pytest.raises(ParameterError):
            minimal_shape_set(17, 4, 2)

    def test_matches_definition_brute_force(self):
        # reference: test every shape in the box against the definition
        for ndim in (1, 2, 3):
            for side in (2, 3, 4):
                for threshold in range(1, side**ndim + 1):
                    expected = []
                    for shape in itertools.product(range(1, side + 1), repeat=ndim):
                        vol = math.prod(shape)
                        if vol < threshold:
                            continue
                        if all(
                            e == 1 or (vol // e) * (e - 1) < threshold for e in shape
                        ):
                            expected.append(shape)
                    got = minimal_shape_set(threshold, side, ndim)
                    assert got.shapes == tuple(sorted(expected)), (threshold, side, ndim)

    def test_every_member_is_minimal_and_fits(self):
        shapes = minimal_shape_set(12, 6, 3)
        for shape in shapes:
            vol = math.prod(shape)
            assert vol >= 12
            assert all(e <= 6 for e in shape)
            for j, extent in enumerate(shape):
                if extent > 1:
                    shrunk = vol // extent * (extent - 1)
                    assert shrunk < 12


class TestVzrcf:
    def test_all_zero_witness(self):
        codec = make_codec(VZRCF)
        witness = codec.find_violation(BitArray.zeros(4, 2))
        assert witness == Violation(position=(0, 0), shape_index=0)
        assert codec.shapes[0] == (2, 3)

    def test_all_ones_valid(self):
        codec = make_codec(VZRCF)
        assert codec.is_valid(BitArray(4, 2, [1] * 16))

    def test_indicator_equivalent_to_volume_definition_exhaustive(self):
        # scanning only minimal shapes equals scanning every shape >= V
        config = ConstraintConfig("vzrcf", 3, 2, min_volume=6)
        codec = make_codec(config)
        for value in range(2**9):
            array = BitArray.from_int(3, 2, value)
            assert codec.is_valid(array) == brute_valid(array, config)

    def test_collapse_expand_identity(self):
        codec = make_codec(VZRCF)
        array = BitArray.zeros(4, 2)
        assert codec.expand(codec.collapse(array)) == array

    def test_shape_index_out_of_range(self):
        codec = make_codec(VZRCF)
        # widths (1, 4): shape_index 1 is legal (two shapes), and the
        # position must leave room for that shape
        bad = AlmostArray(4, 2, [0] * 10 + [1, 1, 1, 1, 1])  # position 15
        with pytest.raises(CorruptStreamError):
            codec.expand(bad)


class TestRfIndicator:
    def test_all_zero_witness(self):
        codec = make_codec(RF)
        witness = codec.find_violation(BitArray.zeros(4, 2))
        assert witness.position == (0, 0)
        assert witness.partner == (1, 0)

    def test_found_valid_array(self):
        # smallest integer whose four 3x3 windows are pairwise distinct
        codec = make_codec(RF)
        array = BitArray.from_int(4, 2, 20)
        assert codec.is_valid(array)
        assert brute_valid(array, RF)

    def test_single_window_always_valid(self):
        config = ConstraintConfig("rf", 3, 2, shape=(3, 3))
        codec = make_codec(config)
        assert codec.is_valid(BitArray.zeros(3, 2))

    def test_witness_anchors_first_participant_not_first_collision(self):
        # checkerboard: windows at (0,0) and (1,1) are equal, and so are
        # (1,0) and (0,1); a scan that stops at the first repeated content
        # would report ((1,0), (0,1)) and disagree with the naive witness
        bits = [(x + y) % 2 for y in range(4) for x in range(4)]
        array = BitArray(4, 2, bits)
        codec = make_codec(RF)
        witness = codec.find_violation(array)
        assert witness.position == (0, 0)
        assert witness.partner == (1, 1)

    def test_witness_matches_naive_scan_randomized(self):
        codec = make_codec(RF)
        positions = sorted(
            itertools.product(range(2), repeat=2), key=lambda p: vectorize(p, 4)
        )

        def naive(array):
            windows = {
                pos: tuple(
                    array.bit((pos[0] + a, pos[1] + b))
                    for b in range(3)
                    for a in range(3)
                )
                for pos in positions
            }
            for i, first in enumerate(positions):
                for second in positions[i + 1 :]:
                    if windows[first] == windows[second]:
                        return first, second
            return None

        rng = np.random.default_rng(11)
        checked = 0
        for trial in range(3000):
            # bias towards sparse arrays, which actually contain repeats
            density = (0.1, 0.25, 0.5)[trial % 3]
            array = BitArray(
                4, 2, (rng.random(16) < density).astype(np.uint8)
            )
            expected = naive(array)
            witness = codec.find_violation(array)
            if expected is None:
                assert witness is None
            else:
                checked += 1
                assert (witness.position, witness.partner) == expected
        assert checked > 300


class TestReconstructRepeat:
    def test_non_overlapping_copy(self):
        config = ConstraintConfig("rf", 4, 2, shape=(2, 2))
        planted = plant_instance(
            config, Violation(position=(0, 0), partner=(2, 2)), seed=5
        )
        partial = reinsert_subarray(delete_subarray(planted, (2, 2), (2, 2)), None)
        rebuilt = reconstruct_repeat(partial, (0, 0), (2, 2), (2, 2))
        assert rebuilt == planted

    def test_overlap_proof_pattern(self):
        # equal 3x3 boxes at (0,0) and (1,0) force rows to repeat along the
        # first axis; reconstruction sweeps column by column
        planted = plant_instance(
            RF, Violation(position=(0, 0), partner=(1, 0)), seed=9
        )
        nd = planted.to_ndarray()
        for a in range(3):
            for b in range(3):
                assert nd[a, b] == nd[a + 1, b]
        partial = reinsert_subarray(delete_subarray(planted, (1, 0), (3, 3)), None)
        rebuilt = reconstruct_repeat(partial, (0, 0), (1, 0), (3, 3))
        assert rebuilt == planted

    def test_overlap_with_flip(self):
        config = ConstraintConfig("hdrf", 5, 2, shape=(3, 3), min_distance=2)
        witness = Violation(position=(0, 0), partner=(1, 0), diff_offsets=(4,))
        planted = plant_instance(config, witness, seed=3)
        partial = reinsert_subarray(delete_subarray(planted, (1, 0), (3, 3)), None)
        rebuilt = reconstruct_repeat(partial, (0, 0), (1, 0), (3, 3), {4})
        assert rebuilt == planted

    def test_same_positions_rejected(self):
        partial = reinsert_subarray(
            delete_subarray(BitArray.zeros(4, 2), (0, 0), (2, 2)), None
        )
        with pytest.raises(ParameterError):
            reconstruct_repeat(partial, (0, 0), (0, 0), (2, 2))

    @settings(max_examples=120, deadline=None)
    @given(st.data())
    def test_planted_overlap_random_geometry(self, data):
        ndim = data.draw(st.sampled_from([2, 3]), label="ndim")
        side = data.draw(st.integers(3, 8 if ndim == 2 else 5), label="side")
        shape = tuple(
            data.draw(st.integers(2, side), label=f"extent{j}") for j in range(ndim)
        )
        first = tuple(
            data.draw(st.integers(0, side - shape[j]), label=f"first{j}")
            for j in range(ndim)
        )
        # overlapping distinct partner: offset by less than the extent
        second = tuple(
            data.draw(
                st.integers(
                    max(0, first[j] - shape[j] + 1),
                    min(side - shape[j], first[j] + shape[j] - 1),
                ),
                label=f"second{j}",
            )
            for j in range(ndim)
        )
        if first == second:
            return
        config = ConstraintConfig("rf", side, ndim, shape=shape)
        planted = plant_instance(
            config, Violation(position=first, partner=second), seed=data.draw(
                st.integers(0, 2**16), label="seed"
            )
        )
        partial = reinsert_subarray(delete_subarray(planted, second, shape), None)
        rebuilt = reconstruct_repeat(partial, first, second, shape)
        assert rebuilt == planted


class TestRfRoundtrip:
    def test_all_zero_collapse_trace(self):
        codec = make_codec(RF)
        almost = codec.collapse(BitArray.zeros(4, 2))
        # seven zero survivors, no pad, fields 0000 then 0001
        assert almost.bits.tolist() == [0] * 7 + [0, 0, 0, 0, 0, 0, 0, 1]

    def test_expand_equal_positions_rejected(self):
        codec = make_codec(RF)
        bad = AlmostArray(4, 2, [0] * 7 + [0, 0, 1, 0, 0, 0, 1, 0])
        with pytest.raises(CorruptStreamError):
            codec.expand(bad)

    def test_expand_out_of_bounds_rejected(self):
        codec = make_codec(RF)
        # second position 3 -> (3, 0) cannot start a 3x3 box
        bad = AlmostArray(4, 2, [0] * 7 + [0, 0, 0, 0, 0, 0, 1, 1])
        with pytest.raises(CorruptStreamError):
            codec.expand(bad)


class TestHdrf:
    def test_identical_pair_uses_dummy_offset(self):
        codec = make_codec(HDRF)
        planted = plant_instance(
            HDRF, Violation(position=(0, 0), partner=(1, 0)), seed=2
        )
        witness = codec.find_violation(planted)
        assert witness is not None
        assert witness.diff_offsets == ()
        values = codec._field_values(witness)
        assert values[2] == 0  # dummy

    def test_distance_one_pair_roundtrips(self):
        witness = Violation(position=(0, 0), partner=(1, 1), diff_offsets=(7,))
        planted = plant_instance(HDRF, witness, seed=4)
        codec = make_codec(HDRF)
        found = codec.find_violation(planted)
        assert found is not None
        almost = codec.collapse(planted)
        assert codec.expand(almost) == planted

    def test_offsets_encoded_one_based_ascending(self):
        codec = make_codec(HDRF)
        witness = Violation(position=(0, 0), partner=(1, 0), diff_offsets=(3,))
        assert codec._field_values(witness) == [0, 1, 4]

    def test_degenerates_to_rf_at_distance_one(self):
        config_h = ConstraintConfig("hdrf", 4, 2, shape=(3, 3), min_distance=1)
        config_r = ConstraintConfig("rf", 4, 2, shape=(3, 3))
        codec_h, codec_r = make_codec(config_h), make_codec(config_r)
        from mdcodec import payload_widths

        assert payload_widths(config_h) == payload_widths(config_r)
        rng = np.random.default_rng(3)
        for _ in range(500):
            array = BitArray(4, 2, rng.integers(0, 2, 16, dtype=np.uint8))
            wh, wr = codec_h.find_violation(array), codec_r.find_violation(array)
            assert (wh is None) == (wr is None)
            if wh is not None:
                assert (wh.position, wh.partner) == (wr.position, wr.partner)
                assert codec_h.collapse(array) == codec_r.collapse(array)

    def test_expand_rejects_bad_offsets(self):
        codec = make_codec(HDRF)
        size = 25

        def almost_with(values):
            bits = [0] * (size - 1)
            window = []
            for value in values:
                window.extend((value >> (4 - i)) & 1 for i in range(5))
            bits[size - 1 - 15 : size - 1] = window
            return AlmostArray(5, 2, bits)

        with pytest.raises(CorruptStreamError):
            codec.expand(almost_with([0, 1, 17]))  # offset > volume
        # non-ascending / dummy-before-offset patterns need p >= 3 to exist;
        # build a 3-field payload by hand for a p=3 config
        config3 = ConstraintConfig("hdrf", 5, 2, shape=(4, 4), min_distance=3)
        codec3 = make_codec(config3)
        widths = (5, 5, 5, 5)

        def almost3(values):
            bits = [0] * (size - 1)
            window = []
            for value, width in zip(values, widths):
                window.extend((value >> (width - 1 - i)) & 1 for i in range(width))
            bits[size - 1 - 20 : size - 1] = window
            return AlmostArray(5, 2, bits)

        with pytest.raises(CorruptStreamError):
            codec3.expand(almost3([0, 1, 5, 5]))  # not strictly ascending
        with pytest.raises(CorruptStreamError):
            codec3.expand(almost3([0, 1, 0, 5]))  # offset after dummy

    def test_roundtrip_sample(self):
        codec = make_codec(HDRF)
        rng = np.random.default_rng(12)
        for _ in range(400):
            message = rng.integers(0, 2, 24, dtype=np.uint8)
            array, _ = encode(message, codec)
            assert np.array_equal(decode(array, codec), message)


class TestHdrfFeasibilityLandscape:
    def test_no_nontrivial_p2_config_at_side4(self):
        # shape (3,3): 13 payload slots needed, 9 available; (4,4) is the
        # whole array, which has one window and no pairs
        from mdcodec import check_feasibility

        assert not check_feasibility(
            ConstraintConfig("hdrf", 4, 2, shape=(3, 3), min_distance=2)
        ).ok
        full = ConstraintConfig("hdrf", 4, 2, shape=(4, 4), min_distance=2)
        assert check_feasibility(full).ok
        codec = make_codec(full)
        assert codec.find_violation(BitArray.zeros(4, 2)) is None
