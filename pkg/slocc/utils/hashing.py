import hashlib
import json
from typing import Optional

from slocc.core.exact import format_scalar
from slocc.core.state import StateTensor


def compute_sha256(content: bytes) -> str:
    """Compute SHA256 hash of content."""
    return hashlib.sha256(content).hexdigest()


def canonical_serialization(tensor: StateTensor, qubit_axis: Optional[int] = None,
                            single_axis: Optional[int] = None) -> bytes:
    """Sorted-term JSON of a state; equal states with equal axis choices serialize identically."""
    payload = {
        "shape": list(tensor.shape.dims),
        "qubit_axis": qubit_axis,
        "single_axis": single_axis,
        "terms": [[list(index), format_scalar(amp)] for index, amp in sorted(tensor.amplitudes.items())],
    }
    return json.dumps(payload, separators=(",", ":"), sort_keys=True).encode("utf-8")


def state_digest(tensor: StateTensor, qubit_axis: Optional[int] = None,
                 single_axis: Optional[int] = None) -> str:
    return compute_sha256(canonical_serialization(tensor, qubit_axis, single_axis))
