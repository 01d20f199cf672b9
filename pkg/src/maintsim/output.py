"""Byte-deterministic CSV and run-manifest writers.

Every experiment output starts with a ``# key=value`` metadata block
capturing the full resolved configuration and seed, so a file plus the tool
version pins down exactly how to regenerate it.  Floats are serialized with
``repr`` (shortest round-trip form) and nothing time- or host-dependent is
ever written.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def write_csv(path, header: list[str], rows, metadata: dict | None = None) -> int:
    """Write metadata comments, a header row, and data rows; returns the
    number of data rows."""
    count = 0
    with open(path, "w", newline="") as fh:
        if metadata:
            for key in sorted(metadata):
                fh.write(f"# {key}={_fmt(metadata[key])}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
            count += 1
    return count


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of write_csv, with values left as strings."""
    metadata: dict = {}
    header: list[str] = []
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                metadata[key] = value
            elif not header:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return metadata, header, rows


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce an experiment's outputs byte for byte."""

    experiment: str
    seed: int
    config: dict
    outputs: tuple[str, ...]
    tool_version: str


def write_manifest(path, manifest: RunManifest) -> None:
    with open(path, "w") as fh:
        json.dump(asdict(manifest), fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_manifest(path) -> RunManifest:
    with open(path) as fh:
        data = json.load(fh)
    data["outputs"] = tuple(data["outputs"])
    return RunManifest(**data)
