"""Single-redundancy-bit codecs for multi-dimensional constrained binary arrays.

The package turns any message of ``side**ndim - 1`` bits into a cubic binary
array of ``side**ndim`` bits that satisfies one of four constraints (no
all-zero box of a fixed shape, no all-zero box above a volume threshold, no
repeated box, no near-repeated box), and back, losslessly.
"""

from .arrays import (
    BitArray,
    CompactedArray,
    PartialArray,
    Position,
    Shape,
    delete_subarray,
    devectorize,
    extract_subarray,
    reinsert_subarray,
    subarray_cells,
    vectorize,
    volume,
)
from .constraints import (
    HdrfCodec,
    MinimalShapeSet,
    RfCodec,
    Violation,
    VzrcfCodec,
    ZrcfCodec,
    make_codec,
    minimal_shape_set,
    reconstruct_repeat,
)
from .container import decode_file, encode_file
from .errors import (
    BoundsError,
    ContractViolation,
    CorruptStreamError,
    FeasibilityError,
    IterationCapError,
    MdcodecError,
    ParameterError,
    StructuralError,
)
from .framework import (
    AlmostArray,
    ConstraintConfig,
    Feasibility,
    check_feasibility,
    decode,
    decode_field,
    encode,
    encode_field,
    payload_length,
    payload_widths,
    read_payload,
    require_feasible,
    write_payload,
)
from .oracle import (
    AuditReport,
    brute_valid,
    exhaustive_roundtrip,
    injectivity_audit,
    plant_instance,
)

__version__ = "0.1.0"

__all__ = [
    "AlmostArray",
    "AuditReport",
    "BitArray",
    "BoundsError",
    "CompactedArray",
    "ConstraintConfig",
    "ContractViolation",
    "CorruptStreamError",
    "Feasibility",
    "FeasibilityError",
    "HdrfCodec",
    "IterationCapError",
    "MdcodecError",
    "MinimalShapeSet",
    "ParameterError",
    "PartialArray",
    "Position",
    "RfCodec",
    "Shape",
    "StructuralError",
    "Violation",
    "VzrcfCodec",
    "ZrcfCodec",
    "brute_valid",
    "check_feasibility",
    "decode",
    "decode_field",
    "decode_file",
    "delete_subarray",
    "devectorize",
    "encode",
    "encode_field",
    "encode_file",
    "exhaustive_roundtrip",
    "extract_subarray",
    "injectivity_audit",
    "make_codec",
    "minimal_shape_set",
    "payload_length",
    "payload_widths",
    "plant_instance",
    "read_payload",
    "reconstruct_repeat",
    "reinsert_subarray",
    "require_feasible",
    "subarray_cells",
    "vectorize",
    "volume",
    "write_payload",
]
