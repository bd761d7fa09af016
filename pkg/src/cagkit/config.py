"""Engine configuration and the key=value config file format."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import FileMissing

__all__ = ["EngineConfig", "load_config"]


@dataclass
class EngineConfig:
    # aggregation
    belief_policy: str = "max"  # max | mean
    # search / nested view
    edge_limit: int = 2000
    # merge
    near_duplicate_threshold: float = 0.9
    # suggestions
    min_cluster_size: int = 3
    # layout
    layer_gap: int = 120
    node_gap: int = 40
    spacing_threshold: int = 50
    spacing_reduction: float = 0.25
    grid_step: int = 10
    turn_penalty: int = 2
    # service
    host: str = "127.0.0.1"
    port: int = 8787
    api_token: str = ""

    def validate(self) -> None:
        if self.belief_policy not in ("max", "mean"):
            raise ValueError(f"belief_policy must be max or mean, got {self.belief_policy!r}")
        if self.edge_limit < 1:
            raise ValueError("edge_limit must be >= 1")
        if not 0.0 <= self.near_duplicate_threshold <= 1.0:
            raise ValueError("near_duplicate_threshold must be within [0, 1]")


def load_config(path: str | Path | None) -> EngineConfig:
    """Parse a flat ``key = value`` file; missing path means defaults."""
    config = EngineConfig()
    if path is None:
        return config
    path = Path(path)
    if not path.exists():
        raise FileMissing(f"config file not found: {path}")
    known = {f.name: f.type for f in fields(EngineConfig)}
    for line_no, raw in enumerate(path.read_text("utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip().strip("'\"")
        if not sep or key not in known:
            raise ValueError(f"{path}:{line_no}: unknown config line {raw.strip()!r}")
        current = getattr(config, key)
        if isinstance(current, bool):
            setattr(config, key, value.lower() in ("1", "true", "yes", "on"))
        elif isinstance(current, int):
            setattr(config, key, int(value))
        elif isinstance(current, float):
            setattr(config, key, float(value))
        else:
            setattr(config, key, value)
    config.validate()
    return config
