from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from ..errors import DatasetError, InputReadError


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: Optional[int] = None


def parse_manifest(text: str, base_dir: Path, require_labels: bool = False, source: str = "<manifest>") -> list[ManifestEntry]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, label_text = line.rpartition(",")
        if not sep:
            name, label_text = line, ""
        name, label_text = name.strip(), label_text.strip()
        if not name:
            raise DatasetError(f"{source}:{lineno}: missing image path")

        label = None
        if label_text:
            if label_text not in ("0", "1"):
                raise DatasetError(f"{source}:{lineno}: label must be 0 or 1, got {label_text!r}")
            label = int(label_text)
        elif require_labels:
            raise DatasetError(f"{source}:{lineno}: missing label for {name}")

        p = Path(name)
        entries.append(ManifestEntry(p if p.is_absolute() else base_dir / p, label))
    return entries


def read_manifest(path: str | Path, require_labels: bool = False) -> list[ManifestEntry]:
    """Read "path,label" lines; paths are relative to the manifest's directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputReadError(f"cannot read manifest {path}: {e}") from e
    return parse_manifest(text, path.parent, require_labels, source=str(path))


def write_manifest(path: str | Path, entries: Iterable[ManifestEntry]) -> None:
    path = Path(path)
    lines = ["# path,label"]
    for e in entries:
        try:
            name = e.path.relative_to(path.parent).as_posix()
        except ValueError:
            name = str(e.path)
        lines.append(name if e.label is None else f"{name},{e.label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
