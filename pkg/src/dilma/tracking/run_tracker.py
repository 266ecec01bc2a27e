import hashlib
import json
import time
from collections.abc import Mapping
from pathlib import Path

from dilma.logger import get_run_logger

MANIFEST_SUFFIX = ".manifest.json"


def hash_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(artifact: Path) -> Path:
    return artifact.with_name(artifact.name + MANIFEST_SUFFIX)


class RunTracker:
    """
    RunTracker fingerprints the inputs and outputs of a subcommand and writes a manifest next to each artifact.

    Events are emitted through the pinned "run" logger, so they are always
    logged regardless of LOG_LEVEL. Fields are flat, snake_case top-level keys.
    Wall time lives only in manifests; artifacts themselves stay byte-identical
    across reruns.
    """

    def __init__(self, subcommand: str, *, seed: int, config_hash: str):
        self.subcommand = subcommand
        self.seed = seed
        self.config_hash = config_hash
        self.inputs: dict[str, str] = {}
        self._started = time.perf_counter()
        self._logger = get_run_logger()

    def record_input(self, path: Path) -> None:
        self.inputs[str(path)] = hash_file(path)

    def artifact_written(self, artifact: Path, **extra: str | int | float | bool | None) -> Path:
        """
        Writes `<artifact>.manifest.json` and logs an "artifact_written" event.

        The manifest holds the subcommand, input hashes, seed, config hash, output
        hash and wall time, plus any extra fields.
        """
        wall_time = round(time.perf_counter() - self._started, 3)
        output_hash = hash_file(artifact)
        manifest: Mapping[str, object] = {
            "subcommand": self.subcommand,
            "artifact": str(artifact),
            "inputs": dict(sorted(self.inputs.items())),
            "seed": self.seed,
            "config_hash": self.config_hash,
            "output_hash": output_hash,
            "wall_time_seconds": wall_time,
            **extra,
        }
        path = manifest_path(artifact)
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self._logger.info(
            "artifact_written",
            subcommand=self.subcommand,
            artifact=str(artifact),
            output_hash=output_hash,
            wall_time_seconds=wall_time,
            **extra,
        )
        return path
