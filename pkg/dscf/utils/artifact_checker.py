from pathlib import Path
from typing import Dict

from dscf.exceptions import MissingArtifactError


class ArtifactChecker:
    """
    Guard for commands that depend on artifacts produced by earlier commands.

    Configured with a mapping of artifact file name to the command producing
    it; calling it with an output directory raises for the first missing one.
    """
    def __init__(self, required: Dict[str, str]) -> None:
        self.required = required

    def __call__(self, out_dir) -> None:
        for name, command in self.required.items():
            path = Path(out_dir) / name
            if not path.exists():
                raise MissingArtifactError(path, command)
