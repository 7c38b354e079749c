"""Sample batches and reports on disk: CSV with a metadata header, JSON reports."""
from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

REPORT_SCHEMA_VERSION = 1


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class SampleBatch:
    """Replicates on rows; ``metadata`` must be JSON-serializable and deterministic."""

    data: np.ndarray
    columns: list[str]
    master_seed: int
    config: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def header(self) -> dict:
        return {
            "version": __version__,
            "config_hash": config_hash(self.config),
            "master_seed": self.master_seed,
            "config": self.config,
            **self.metadata,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header(), sort_keys=True, default=str) + "\n")
        buf.write(",".join(self.columns) + "\n")
        data = np.asarray(self.data)
        fmt = "%d" if np.issubdtype(data.dtype, np.integer) else "%.17g"
        np.savetxt(buf, data, fmt=fmt, delimiter=",")
        return buf.getvalue()

    def to_json(self) -> str:
        body = {"metadata": self.header(), "columns": self.columns, "rows": np.asarray(self.data).tolist()}
        return json.dumps(body, sort_keys=True, default=str)

    def write(self, path: str | Path, fmt: str = "csv") -> None:
        text = self.to_csv() if fmt == "csv" else self.to_json()
        Path(path).write_text(text)


def read_csv(path: str | Path) -> tuple[dict, list[str], np.ndarray]:
    lines = Path(path).read_text().splitlines()
    meta = json.loads(lines[0][2:])
    columns = lines[1].split(",")
    data = np.loadtxt(lines[2:], delimiter=",", ndmin=2) if len(lines) > 2 else np.empty((0, len(columns)))
    return meta, columns, data


def report_json(suite: str, config: dict, results: list, master_seed: int) -> str:
    body = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "version": __version__,
        "suite": suite,
        "config_hash": config_hash(config),
        "master_seed": master_seed,
        "config": config,
        "pass": all(r.passed for r in results),
        "results": [r.to_dict() for r in results],
    }
    return json.dumps(body, indent=2, sort_keys=True, default=str)
