"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from mdcodec import AlmostArray, delete_subarray, make_codec, vectorize
from mdcodec.framework import encode_field, payload_widths


class PadSkippingCodec:
    """Broken collapse for negative controls: emits the metadata fields
    directly after the survivors and the zero padding last, so whenever the
    emptied region is larger than fields + reserved slot, everything
    downstream reads shifted bits."""

    def __init__(self, config):
        self._inner = make_codec(config)
        self.config = config

    def is_valid(self, array):
        return self._inner.is_valid(array)

    def find_violation(self, array):
        return self._inner.find_violation(array)

    def expand(self, almost):
        return self._inner.expand(almost)

    def collapse(self, array):
        witness = self._inner.find_violation(array)
        compacted = delete_subarray(array, witness.position, self.config.shape)
        field_bits = []
        for value, width in zip(
            [vectorize(witness.position, self.config.side)],
            payload_widths(self.config),
        ):
            field_bits.extend(encode_field(value, width))
        pad = compacted.gap - 1 - len(field_bits)
        bits = np.concatenate(
            [
                compacted.survivors,
                np.array(field_bits, dtype=np.uint8),
                np.zeros(pad, dtype=np.uint8),
            ]
        )
        return AlmostArray(self.config.side, self.config.ndim, bits)


@pytest.fixture
def pad_skipping_codec():
    """The broken-collapse class, for negative-control audits."""
    return PadSkippingCodec
