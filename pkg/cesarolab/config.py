import logging
import os
from typing import Any, Optional

import yaml  # type: ignore

logger = logging.getLogger(__name__)

THREADS_ENV = "CESARO_LAB_THREADS"

RUN_KEYS = {
    "seed",
    "dim",
    "nodes",
    "format",
    "out",
    "sampler",
    "stamp",
    "radii",
    "k_values",
    "expect",
    "literal_prefactor",
}
"""Keys accepted at the top level of a run config file."""


def worker_count() -> int:
    """Number of worker threads, capped by CESARO_LAB_THREADS (default: CPU count)."""
    default = os.cpu_count() or 1
    raw = os.getenv(THREADS_ENV, "")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}")
        return default
    return max(1, min(value, default))


class RunConfig:
    """RunConfig collects everything a CLI command needs besides the function specs.

    Values are layered: built-in defaults, then a YAML config file, then CLI flags.
    """

    def __init__(
        self,
        /,
        seed: int = 0,
        dim: int = 1,
        nodes: int = 64,
        format: str = "json",
        out: Optional[str] = None,
        sampler: Optional[dict] = None,
        stamp: bool = False,
        radii: Optional[list[float]] = None,
        k_values: Optional[list[int]] = None,
        expect: Optional[str] = None,
        literal_prefactor: bool = False,
    ):
        if format not in ("csv", "json"):
            raise ValueError(f"Unknown output format: {format}")
        self.seed = int(seed)
        self.dim = int(dim)
        self.nodes = int(nodes)
        self.format = format
        self.out = out
        self.sampler = dict(sampler or {})
        self.stamp = bool(stamp)
        self.radii = None if radii is None else [float(r) for r in radii]
        self.k_values = None if k_values is None else [int(k) for k in k_values]
        self.expect = expect
        self.literal_prefactor = bool(literal_prefactor)

    @classmethod
    def from_yaml(cls, yml: dict):
        """Create a run config from a parsed YAML dictionary; unknown keys are rejected."""
        if not isinstance(yml, dict):
            raise ValueError("Run config must be a mapping")
        unknown = sorted(set(yml) - RUN_KEYS)
        if unknown:
            raise ValueError(f"Unknown run config keys: {', '.join(unknown)}")
        return cls(**yml)

    @classmethod
    def from_file(cls, path: str):
        """Load a run config from a YAML file."""
        yml = load_yaml_file(path)
        if yml is None:
            yml = {}
        logger.debug(f"Loaded run config from {path}")
        return cls.from_yaml(yml)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with every non-None override applied; sampler overrides merge key by key."""
        values = self.to_dict()
        for k, v in overrides.items():
            if v is None:
                continue
            if k not in RUN_KEYS:
                raise ValueError(f"Unknown run config key: {k}")
            if k == "sampler":
                values["sampler"] = {**values["sampler"], **{sk: sv for sk, sv in v.items() if sv is not None}}
            else:
                values[k] = v
        return RunConfig(**values)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "dim": self.dim,
            "nodes": self.nodes,
            "format": self.format,
            "out": self.out,
            "sampler": dict(self.sampler),
            "stamp": self.stamp,
            "radii": self.radii,
            "k_values": self.k_values,
            "expect": self.expect,
            "literal_prefactor": self.literal_prefactor,
        }


def load_yaml_file(yaml_file: str) -> Any:
    with open(yaml_file, "r") as f:
        data = yaml.safe_load(f)
    return data
