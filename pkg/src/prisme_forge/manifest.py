"""Run manifests: per-stage records of config hash, file digests, counters.

A stage whose config hash, input digests, and output digests all match the
previous run is skipped. Timestamps live only here, never in data files,
so stage outputs stay byte-identical across re-runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

MANIFEST_DIR = "manifests"

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"


@dataclass
class RunManifest:
    stage: str
    timestamp: str = ""
    config_hash: str = ""
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    counters: dict[str, object] = field(default_factory=dict)
    status: str = STATUS_OK


def file_digest(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def digest_map(paths, base: Path) -> dict[str, str]:
    """Relative-path -> sha256 for every existing file in ``paths``."""
    digests: dict[str, str] = {}
    for path in paths:
        path = Path(path)
        if not path.is_file():
            continue
        try:
            key = str(path.resolve().relative_to(base.resolve()))
        except ValueError:
            key = str(path.resolve())
        digests[key] = file_digest(path)
    return dict(sorted(digests.items()))


def manifest_path(out_root: Path, stage: str) -> Path:
    return Path(out_root) / MANIFEST_DIR / f"{stage}.json"


def load_manifest(out_root: Path, stage: str) -> RunManifest | None:
    path = manifest_path(out_root, stage)
    if not path.is_file():
        return None
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return RunManifest(**raw)
    except (ValueError, TypeError):
        return None


def write_manifest(manifest: RunManifest, out_root: Path) -> Path:
    if not manifest.timestamp:
        manifest.timestamp = datetime.now(timezone.utc).isoformat()
    path = manifest_path(out_root, manifest.stage)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(asdict(manifest), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return path


def outputs_unchanged(previous: RunManifest, out_root: Path) -> bool:
    for relative, digest in previous.outputs.items():
        path = Path(relative)
        if not path.is_absolute():
            path = Path(out_root) / relative
        if not path.is_file() or file_digest(path) != digest:
            return False
    return True


def should_skip(
    previous: RunManifest | None, config_hash: str, inputs: dict[str, str], out_root: Path
) -> bool:
    """True when re-running would reproduce the previous outputs bit for bit."""
    return (
        previous is not None
        and previous.status in (STATUS_OK, STATUS_SKIPPED)
        and previous.config_hash == config_hash
        and previous.inputs == inputs
        and outputs_unchanged(previous, out_root)
    )
