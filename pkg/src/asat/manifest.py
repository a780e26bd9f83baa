"""Flat key=value manifest recording pipeline inputs and stage checksums.

A rerun against the same manifest reproduces every artifact byte for byte;
the recorded checksums make drift detectable.
"""

from __future__ import annotations

import hashlib
from pathlib import Path


def read_manifest(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    p = Path(path)
    if not p.exists():
        return out
    for line in p.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key] = value
    return out


def write_manifest(path: str | Path, entries: dict[str, str]) -> None:
    lines = [f"{key}={entries[key]}" for key in sorted(entries)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def record_stage(manifest_path: str | Path | None, stage: str,
                 params: dict[str, str], outputs: str | Path) -> None:
    """Merge stage parameters and output checksums into the manifest."""
    if manifest_path is None:
        return
    entries = read_manifest(manifest_path)
    for key, value in params.items():
        entries[f"{stage}.{key}"] = value
    out_dir = Path(outputs)
    for file in sorted(out_dir.rglob("*")):
        if file.is_file():
            rel = file.relative_to(out_dir)
            entries[f"checksum.{stage}.{rel}"] = sha256_file(file)
    write_manifest(manifest_path, entries)
