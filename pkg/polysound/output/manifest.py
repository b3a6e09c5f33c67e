import hashlib
from dataclasses import dataclass, field, asdict

from polysound.utils import JSON, log


def config_hash(config_text):
    """
    SHA-256 of the config file contents ("" when no config file was used).
    """
    return hashlib.sha256((config_text or "").encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """
    Record of a successful run: version, resolved parameters, config hash, outputs and duration.
    """

    version: str
    subcommand: str
    parameters: dict
    config_hash: str
    outputs: list = field(default_factory=list)
    duration_seconds: float = 0.0

    @staticmethod
    def path_for(out_path):
        return f"{out_path}.manifest.json"

    def to_dict(self):
        return asdict(self)

    def write(self, path):
        JSON(path).write(self.to_dict())
        log(f"Manifest - Wrote {path}")
        return path

    @classmethod
    def read(cls, path):
        return cls(**JSON(path).load(allow_empty=False))
