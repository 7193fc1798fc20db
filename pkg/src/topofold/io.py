"""Raw volume files with a JSON sidecar header, and output writers.

A volume is a headerless little-endian payload in C order (axis 0 slowest)
next to a JSON document such as::

    {"dims": [33, 33], "type": "f32", "byteOrder": "little", "name": "demo"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .field import FieldState
from .grid import MAX_DEPTH, GridHierarchy, build_hierarchy

TYPE_TAGS = {
    "f32": "<f4",
    "f64": "<f8",
    "i8": "i1",
    "i16": "<i2",
    "i32": "<i4",
    "i64": "<i8",
    "u8": "u1",
    "u16": "<u2",
    "u32": "<u4",
    "u64": "<u8",
}
_TAG_OF = {np.dtype(v).newbyteorder("=").str[1:]: k for k, v in TYPE_TAGS.items()}


class VolumeError(ValueError):
    """Raised for malformed volume files or headers."""


@dataclass(frozen=True)
class VolumeHeader:
    dims: tuple[int, ...]
    scalar_type: str
    name: str | None = None

    def __post_init__(self):
        if self.scalar_type not in TYPE_TAGS:
            raise VolumeError(
                f"unknown scalar type tag {self.scalar_type!r}; expected one of {sorted(TYPE_TAGS)}"
            )
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(TYPE_TAGS[self.scalar_type])

    @property
    def payload_bytes(self) -> int:
        return int(np.prod(self.dims)) * self.dtype.itemsize

    def to_json(self) -> str:
        doc = {"dims": list(self.dims), "type": self.scalar_type, "byteOrder": "little"}
        if self.name is not None:
            doc["name"] = self.name
        return json.dumps(doc) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VolumeHeader":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise VolumeError(f"header is not valid JSON: {exc}") from exc
        if doc.get("byteOrder", "little") != "little":
            raise VolumeError("only little-endian payloads are supported")
        if "dims" not in doc or "type" not in doc:
            raise VolumeError("header needs 'dims' and 'type'")
        return cls(tuple(doc["dims"]), doc["type"], doc.get("name"))


def scalar_tag(dtype) -> str:
    key = np.dtype(dtype).newbyteorder("=").str[1:]
    try:
        return _TAG_OF[key]
    except KeyError:
        raise VolumeError(f"no scalar type tag for dtype {np.dtype(dtype)}")


def default_header_path(path) -> Path:
    return Path(str(path) + ".json")


def read_header(path) -> VolumeHeader:
    return VolumeHeader.from_json(Path(path).read_text())


def load_volume(path, header: VolumeHeader) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) != header.payload_bytes:
        raise VolumeError(
            f"{path}: payload has {len(raw)} bytes, header {header.dims} x "
            f"{header.scalar_type} needs {header.payload_bytes}"
        )
    data = np.frombuffer(raw, dtype=header.dtype).reshape(header.dims)
    return data.astype(header.dtype.newbyteorder("="))


def ingest(path, header=None, max_levels: int = MAX_DEPTH) -> tuple[FieldState, GridHierarchy]:
    """Load a volume and build its field state and hierarchy.

    ``header`` may be a :class:`VolumeHeader`, a path to the sidecar, or
    ``None`` for ``<path>.json``.
    """
    if header is None:
        header = default_header_path(path)
    if not isinstance(header, VolumeHeader):
        header = read_header(header)
    data = load_volume(path, header)
    try:
        state = FieldState.from_values(data)
    except ValueError as exc:
        raise VolumeError(f"{path}: {exc}") from exc
    return state, build_hierarchy(header.dims, max_levels)


def write_volume(path, values, name: str | None = None) -> VolumeHeader:
    """Write ``values`` as a raw payload plus ``<path>.json``."""
    arr = np.asarray(values)
    header = VolumeHeader(arr.shape, scalar_tag(arr.dtype), name)
    Path(path).write_bytes(np.ascontiguousarray(arr, dtype=header.dtype).tobytes())
    default_header_path(path).write_text(header.to_json())
    return header
