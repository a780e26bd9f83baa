"""Versioned CSV weight dumps.

Layout:
    format,asat-weights-v1
    model,<name>
    meta,<key>,<value>        (zero or more)
    array,<name>,<rows>,<cols>
    <rows lines of comma-separated repr() floats>
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

FORMAT_TAG = "asat-weights-v1"


class CheckpointError(ValueError):
    pass


def save_weights(path: str | Path, model: str, arrays: dict[str, np.ndarray],
                 meta: dict[str, str] | None = None) -> None:
    lines = [f"format,{FORMAT_TAG}", f"model,{model}"]
    for key in sorted(meta or {}):
        lines.append(f"meta,{key},{(meta or {})[key]}")
    for name in arrays:
        arr = np.atleast_2d(np.asarray(arrays[name], dtype=float))
        lines.append(f"array,{name},{arr.shape[0]},{arr.shape[1]}")
        for row in arr:
            lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_weights(path: str | Path) -> tuple[str, dict[str, np.ndarray], dict[str, str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != f"format,{FORMAT_TAG}":
        raise CheckpointError(f"{path}: not a {FORMAT_TAG} checkpoint")
    if not lines[1].startswith("model,"):
        raise CheckpointError(f"{path}: missing model line")
    model = lines[1].split(",", 1)[1]
    arrays: dict[str, np.ndarray] = {}
    meta: dict[str, str] = {}
    i = 2
    while i < len(lines):
        parts = lines[i].split(",")
        if parts[0] == "meta":
            meta[parts[1]] = ",".join(parts[2:])
            i += 1
        elif parts[0] == "array":
            name, rows, cols = parts[1], int(parts[2]), int(parts[3])
            block = [
                [float(v) for v in lines[i + 1 + r].split(",")] for r in range(rows)
            ]
            arr = np.array(block)
            if arr.shape != (rows, cols):
                raise CheckpointError(f"{path}: array {name} shape mismatch")
            arrays[name] = arr
            i += 1 + rows
        elif not lines[i]:
            i += 1
        else:
            raise CheckpointError(f"{path}: unexpected line {i + 1}: {lines[i]!r}")
    return model, arrays, meta
