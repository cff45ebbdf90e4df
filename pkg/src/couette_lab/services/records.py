"""The run record: what a run did, where its artifacts are and what it found."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from couette_lab.core.exceptions import CheckpointError
from couette_lab.services.persistence import read_checkpoint, read_csv, write_json

logger = logging.getLogger(__name__)

RECORD_NAME = "record.json"


class RunRecord(BaseModel):
    """Summary of one run (or sweep) written as record.json.

    Artifact paths are relative to output_dir.
    """

    config: Dict[str, Any]
    content_hash: str
    mode: str
    status: Literal["completed", "diverged"] = "completed"
    output_dir: str
    seed: int = 0

    energy_csv: Optional[str] = None
    per_k_csv: Optional[str] = None
    norms_csv: Optional[str] = None
    operator_audit_csv: Optional[str] = None
    sweep_csv: Optional[str] = None
    diagnostics_csv: Optional[str] = None
    checkpoints: List[str] = Field(default_factory=list)

    rates: Dict[str, float] = Field(default_factory=dict)
    rate_r2: Dict[str, float] = Field(default_factory=dict)
    budget: Dict[str, Any] = Field(default_factory=dict)
    budget_passed: Optional[bool] = None
    sweep: Dict[str, Any] = Field(default_factory=dict)
    children: List[str] = Field(default_factory=list)

    summary: Dict[str, float] = Field(default_factory=dict)
    diverged_at: Optional[float] = None
    message: Optional[str] = None
    wall_clock: Dict[str, float] = Field(default_factory=dict)

    def artifact(self, name: Optional[str]) -> Optional[Path]:
        return Path(self.output_dir) / name if name else None

    def verify_artifacts(self) -> List[str]:
        """Check that every referenced file exists and parses.

        Returns:
            List of problems; empty when all artifacts are readable
        """
        problems: List[str] = []
        for name in (
            self.energy_csv,
            self.per_k_csv,
            self.norms_csv,
            self.diagnostics_csv,
            self.operator_audit_csv,
            self.sweep_csv,
        ):
            path = self.artifact(name)
            if path is None:
                continue
            if not path.exists():
                problems.append(f"missing {path}")
                continue
            try:
                read_csv(path)
            except (OSError, ValueError) as exc:
                problems.append(f"unreadable {path}: {exc}")
        for name in self.checkpoints:
            try:
                read_checkpoint(self.artifact(name), self.content_hash)
            except CheckpointError as exc:
                problems.append(str(exc))
        for child in self.children:
            path = Path(child)
            if not path.exists():
                problems.append(f"missing child record {path}")
        return problems

    def save(self) -> Path:
        path = Path(self.output_dir) / RECORD_NAME
        write_json(path, self.model_dump(mode="json"))
        logger.info(f"Run record written to {path} (status={self.status})")
        return path

    @classmethod
    def load(cls, path: Path) -> "RunRecord":
        path = Path(path)
        if path.is_dir():
            path = path / RECORD_NAME
        return cls.model_validate(json.loads(path.read_text()))

    def __repr__(self) -> str:
        return f"RunRecord(mode={self.mode}, status={self.status}, hash={self.content_hash[:12]})"
