"""Parameter-space model ensembling and flat binary serialisation.

A parameter set is an ordered mapping from entry name to a flat float array.
Ensembling forms the weighted sum sum_i w_i * theta_i with weights that must
sum to one; it is computed in the anchored form

    theta_0 + sum_i w_i * (theta_i - theta_0)

which is algebraically identical but makes the average of n identical sets
bit-identical to the input, returns exact zero for {theta, -theta} with
equal weights, and is exactly the identity for a single model with w = 1.

Serialisation: a little-endian container holding 32-bit reals.

    bytes 0..3    magic "SBP1"
    bytes 4..7    uint32 LE header length
    header        UTF-8 JSON {"byte_order": "little", "dtype": "float32",
                   "entries": [{"name", "length", "offset"}, ...]}
                  offsets are byte offsets into the payload
    payload       concatenated float32 little-endian entry data

In-memory arrays are float64 (the math domain); the container is the 32-bit
interchange format, so saving is lossy for values outside float32.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import BadWeights, SchemaMismatch

MAGIC = b"SBP1"
WEIGHT_SUM_TOL = 1e-9


class ModelParams:
    """Ordered name -> flat float64 array mapping."""

    def __init__(self, entries):
        items = entries.items() if hasattr(entries, "items") else entries
        self.entries: dict[str, np.ndarray] = {}
        for name, arr in items:
            a = np.asarray(arr, dtype=np.float64).ravel()
            if a.size == 0:
                raise SchemaMismatch(f"entry {name!r} is empty")
            if name in self.entries:
                raise SchemaMismatch(f"duplicate entry name {name!r}")
            self.entries[str(name)] = a

    def schema(self) -> tuple[tuple[str, int], ...]:
        return tuple((name, arr.size) for name, arr in self.entries.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return self.schema() == other.schema() and all(
            np.array_equal(a, other.entries[n]) for n, a in self.entries.items()
        )

    def __repr__(self) -> str:  # pragma: no cover
        total = sum(a.size for a in self.entries.values())
        return f"ModelParams({len(self.entries)} entries, {total} values)"


def ensemble_params(models, weights) -> ModelParams:
    """Weighted parameter-space combination of models with equal schemas."""
    models = list(models)
    weights = [float(w) for w in weights]
    if not models:
        raise BadWeights("need at least one model")
    if len(weights) != len(models):
        raise BadWeights(f"{len(models)} models but {len(weights)} weights")
    if not all(np.isfinite(weights)):
        raise BadWeights(f"weights must be finite, got {weights}")
    total = sum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise BadWeights(f"weights sum to {total!r}, expected 1 within {WEIGHT_SUM_TOL}")
    ref = models[0].schema()
    for i, m in enumerate(models[1:], start=1):
        if m.schema() != ref:
            raise SchemaMismatch(f"model {i} schema differs from model 0")
    out = {}
    for name, anchor in models[0].entries.items():
        acc = anchor.copy()
        for w, m in zip(weights, models):
            acc += w * (m.entries[name] - anchor)
        out[name] = acc
    return ModelParams(out)


def save_params(params: ModelParams, path: str | Path) -> None:
    entries = []
    chunks = []
    offset = 0
    for name, arr in params.entries.items():
        data = arr.astype("<f4").tobytes()
        entries.append({"name": name, "length": int(arr.size), "offset": offset})
        chunks.append(data)
        offset += len(data)
    header = json.dumps(
        {"byte_order": "little", "dtype": "float32", "entries": entries},
        separators=(",", ":"),
    ).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(len(header).to_bytes(4, "little"))
        f.write(header)
        for c in chunks:
            f.write(c)


def load_params(path: str | Path) -> ModelParams:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != MAGIC:
        raise SchemaMismatch(f"{path}: not a parameter container (bad magic)")
    header_len = int.from_bytes(blob[4:8], "little")
    header = json.loads(blob[8:8 + header_len].decode("utf-8"))
    if header.get("dtype") != "float32" or header.get("byte_order") != "little":
        raise SchemaMismatch(f"{path}: unsupported container layout {header}")
    payload = blob[8 + header_len:]
    entries = []
    for e in header["entries"]:
        start = e["offset"]
        end = start + 4 * e["length"]
        if end > len(payload):
            raise SchemaMismatch(f"{path}: entry {e['name']!r} overruns the payload")
        arr = np.frombuffer(payload[start:end], dtype="<f4").astype(np.float64)
        entries.append((e["name"], arr))
    return ModelParams(entries)
