"""Run artifacts on disk: CSV series, binary checkpoints and JSON records.

Floats are written with %.17g so two runs with the same seed produce
byte-identical files.
"""

import csv
import hashlib
import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from couette_lab.core.exceptions import CheckpointError

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"CLABCKPT"
CHECKPOINT_VERSION = 2
# magic, version, dtype code, n_blocks, n_y, nu, t, sha256 of the payload,
# sha256 of the run config (zeros when the writer had none)
CHECKPOINT_HEADER = struct.Struct("<8sHHiidd32s32s")
NO_CONFIG_HASH = bytes(32)
DTYPE_CODES = {"complex128": 1, "complex64": 2}
DTYPES = {1: np.dtype("<c16"), 2: np.dtype("<c8")}


def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    """Write rows as CSV with a header line.

    Args:
        path: Destination (parent directories are created)
        columns: Column order
        rows: Mappings containing at least the columns

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[name]) for name in columns])
    logger.debug(f"Wrote {path}")
    return path


def read_csv(path: Path) -> Dict[str, np.ndarray]:
    """Read a numeric CSV written by write_csv into column arrays.

    Raises:
        ValueError: For an empty file or non-numeric cells
    """
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise ValueError(f"{path} is empty") from exc
        data = [[float(cell) for cell in row] for row in reader if row]
    table = np.array(data, dtype=float).reshape(len(data), len(header))
    return {name: table[:, i] for i, name in enumerate(header)}


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


class Checkpoint(NamedTuple):
    blocks: np.ndarray
    wavenumbers: List[int]
    nu: float
    t: float
    config_hash: Optional[str] = None


def sidecar_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _config_digest(config_hash: Optional[str]) -> bytes:
    if config_hash is None:
        return NO_CONFIG_HASH
    try:
        digest = bytes.fromhex(config_hash)
    except ValueError as exc:
        raise CheckpointError(f"config hash is not hexadecimal: {config_hash!r}") from exc
    if len(digest) != 32:
        raise CheckpointError(f"config hash must be a sha256 digest, got {len(digest)} bytes")
    return digest


def write_checkpoint(
    path: Path,
    blocks: np.ndarray,
    wavenumbers: Sequence[int],
    nu: float,
    t: float,
    precision: str = "complex128",
    config_hash: Optional[str] = None,
) -> Path:
    """Write coefficient blocks (one row per wavenumber) and a JSON sidecar.

    Args:
        path: Binary checkpoint path; the sidecar is path + ".json"
        blocks: Complex array of shape (n_blocks, n_y)
        wavenumbers: Wavenumber of each block
        nu: Viscosity
        t: Time of the snapshot
        precision: "complex128" or "complex64"
        config_hash: Hex sha256 of the run config that produced the blocks

    Raises:
        CheckpointError: Unknown precision, shape mismatch or malformed config hash
    """
    if precision not in DTYPE_CODES:
        raise CheckpointError(f"unknown checkpoint precision '{precision}'")
    blocks = np.atleast_2d(np.asarray(blocks))
    if blocks.shape[0] != len(wavenumbers):
        raise CheckpointError(f"{blocks.shape[0]} blocks but {len(wavenumbers)} wavenumbers")
    config_digest = _config_digest(config_hash)

    code = DTYPE_CODES[precision]
    payload = np.ascontiguousarray(blocks, dtype=DTYPES[code]).tobytes()
    digest = hashlib.sha256(payload).digest()
    header = CHECKPOINT_HEADER.pack(
        CHECKPOINT_MAGIC,
        CHECKPOINT_VERSION,
        code,
        blocks.shape[0],
        blocks.shape[1],
        float(nu),
        float(t),
        digest,
        config_digest,
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + payload)
    write_json(
        sidecar_path(path),
        {
            "format": "couette-lab checkpoint",
            "version": CHECKPOINT_VERSION,
            "precision": precision,
            "wavenumbers": [int(k) for k in wavenumbers],
            "n_y": int(blocks.shape[1]),
            "nu": float(nu),
            "t": float(t),
            "sha256": digest.hex(),
            "config_hash": config_hash,
        },
    )
    logger.debug(f"Checkpoint t={t:.6g} written to {path}")
    return path


def read_checkpoint(path: Path, expected_config_hash: Optional[str] = None) -> Checkpoint:
    """Read and verify a checkpoint written by write_checkpoint.

    Args:
        path: Binary checkpoint path
        expected_config_hash: When given, a checkpoint stamped with a different
            config hash is rejected; unstamped checkpoints are accepted

    Raises:
        CheckpointError: Missing file, bad magic, truncated payload, digest
            mismatch or a checkpoint from another config
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < CHECKPOINT_HEADER.size:
        raise CheckpointError(f"{path} is shorter than the checkpoint header")

    magic, version, code, n_blocks, n_y, nu, t, digest, config_digest = CHECKPOINT_HEADER.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path} is not a couette-lab checkpoint")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if code not in DTYPES:
        raise CheckpointError(f"unknown dtype code {code}")

    payload = raw[CHECKPOINT_HEADER.size :]
    expected = n_blocks * n_y * DTYPES[code].itemsize
    if len(payload) != expected:
        raise CheckpointError(f"{path}: payload has {len(payload)} bytes, header promises {expected}")
    if hashlib.sha256(payload).digest() != digest:
        raise CheckpointError(f"{path}: payload digest mismatch")

    config_hash = None if config_digest == NO_CONFIG_HASH else config_digest.hex()
    if expected_config_hash is not None and config_hash is not None and config_hash != expected_config_hash.lower():
        raise CheckpointError(f"{path}: written by config {config_hash[:12]}, expected {expected_config_hash[:12]}")

    blocks = np.frombuffer(payload, dtype=DTYPES[code]).reshape(n_blocks, n_y).astype(complex)
    try:
        sidecar = json.loads(sidecar_path(path).read_text())
        wavenumbers = [int(k) for k in sidecar["wavenumbers"]]
    except (OSError, ValueError, KeyError) as exc:
        raise CheckpointError(f"{path}: unreadable sidecar: {exc}") from exc
    if len(wavenumbers) != n_blocks:
        raise CheckpointError(f"{path}: sidecar lists {len(wavenumbers)} wavenumbers for {n_blocks} blocks")
    return Checkpoint(blocks=blocks, wavenumbers=wavenumbers, nu=float(nu), t=float(t), config_hash=config_hash)
