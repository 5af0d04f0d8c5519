# ============================================================================
# EWP-SCS - RUN MANIFEST
# ============================================================================
"""
Reproducibility record written next to every command's outputs.

A manifest captures the command, every parameter and seed, the sha256 of
every input file and the tool version. Re-running a command with the same
manifest reproduces the same outputs; only the timestamps differ.

An output directory belongs to the command that first wrote a manifest
there. Commands claim their directory before producing any output.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

from . import __version__
from .errors import InputError, InvariantError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class OutputDirError(InputError):
    """Raised when an output directory belongs to another command."""
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def file_digest(path: Union[str, Path]) -> str:
    """sha256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Execution record for one command invocation."""
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)
    version: str = __version__
    started_at: str = field(default_factory=_now)
    completed_at: Optional[str] = None
    duration_seconds: Optional[float] = None
    outputs: list = field(default_factory=list)

    def add_input(self, path: Union[str, Path]) -> None:
        """Record an input file by its sha256."""
        self.inputs[str(path)] = file_digest(path)

    def complete(self) -> None:
        self.completed_at = _now()
        start = datetime.fromisoformat(self.started_at)
        end = datetime.fromisoformat(self.completed_at)
        self.duration_seconds = (end - start).total_seconds()

    def reproducible_view(self) -> Dict[str, Any]:
        """Everything except timestamps and duration."""
        data = asdict(self)
        for key in ("started_at", "completed_at", "duration_seconds"):
            data.pop(key)
        return data

    def claim(self, out_dir: Union[str, Path]) -> None:
        """
        Take `out_dir` for this command before any output is written.

        Raises:
            OutputDirError: If the directory holds another command's manifest
        """
        previous = _previous_manifest(Path(out_dir) / MANIFEST_NAME)
        if previous is not None and previous.command != self.command:
            raise OutputDirError(
                f"{out_dir} belongs to command {previous.command!r}; "
                f"use a separate output directory for {self.command!r}"
            )

    def write(self, out_dir: Union[str, Path]) -> Path:
        """
        Write manifest.json into `out_dir`, completing the record if needed.

        Raises:
            InvariantError: If the directory changed hands after `claim`
        """
        if self.completed_at is None:
            self.complete()
        path = Path(out_dir) / MANIFEST_NAME
        previous = _previous_manifest(path)
        if previous is not None:
            if previous.command != self.command:
                raise InvariantError(
                    f"{path} belongs to command {previous.command!r}; "
                    f"outputs of {self.command!r} were written into it"
                )
            if previous.reproducible_view() == self.reproducible_view():
                logger.info(f"Run reproduces {path}")
            else:
                logger.info(f"Replacing the previous {self.command} run recorded in {path}")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def load_manifest(path: Union[str, Path]) -> RunManifest:
    """
    Raises:
        OutputDirError: If the file is not a manifest
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return RunManifest(**data)
    except (json.JSONDecodeError, TypeError) as e:
        raise OutputDirError(f"{path} is not an EWP-SCS manifest: {e}") from None


def _previous_manifest(path: Path) -> Optional[RunManifest]:
    return load_manifest(path) if path.exists() else None
