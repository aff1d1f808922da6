"""
Run and tracker configuration.

Defaults can be overridden through ``SCATTER_*`` environment variables (a
local ``.env`` file is honoured) and then through command-line flags.
"""

import logging
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

ENV_PREFIX = "SCATTER_"


@dataclass
class TrackerConfig:
    """Tolerances and limits for path tracking."""
    seed: int = 0
    tol_corrector: float = 1e-12
    tol_zero: float = 1e-8
    tol_zero_singular: float = 1e-5
    tol_cluster: float = 1e-4
    tol_verify: float = 1e-8
    max_steps: int = 10000
    min_step: float = 1e-14
    max_step: float = 0.02
    initial_step: float = 0.01
    max_correction: float = 1e-4
    corrector_iters: int = 3
    refine_iters: int = 60
    endgame_gap: float = 1e-4
    retrack_rounds: int = 2
    retrack_factor: float = 0.2
    gamma: Optional[complex] = None
    workers: int = 1
    return_boundary: bool = True
    show_progress: bool = False

    @classmethod
    def from_env(cls, env_file: Optional[str] = None, defaults: Optional[Dict[str, Any]] = None,
                 **overrides) -> "TrackerConfig":
        """Build a config from ``defaults``, then the environment, then ``overrides``."""
        load_dotenv(env_file)
        values: Dict[str, Any] = dict(defaults or {})
        for f in fields(cls):
            raw = os.getenv(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            try:
                values[f.name] = _parse_env_value(raw, f.type)
            except ValueError:
                logger.warning(f"Ignoring unparsable {ENV_PREFIX + f.name.upper()}={raw!r}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.gamma is not None:
            data['gamma'] = [self.gamma.real, self.gamma.imag]
        return data


@dataclass
class RunConfig:
    """Everything the command-line front end needs for one invocation."""
    command: str
    instance: Optional[str] = None
    m: Optional[int] = None
    seed: int = 0
    omega: Optional[List[int]] = None
    u_file: Optional[str] = None
    a0_file: Optional[str] = None
    report: Optional[str] = None
    q: Optional[int] = None
    h1: Optional[str] = None
    h2: Optional[str] = None
    output: Optional[str] = None
    format: str = "json"
    bench: bool = False
    verbose: bool = False
    tracker: TrackerConfig = field(default_factory=TrackerConfig)


def _parse_env_value(raw: str, annotation: Any) -> Any:
    text = str(annotation)
    if annotation is bool or text == 'bool':
        return raw.strip().lower() in ('1', 'true', 'yes', 'on')
    if annotation is int or text == 'int':
        return int(raw)
    if annotation is float or text == 'float':
        return float(raw)
    if 'complex' in text:
        return complex(raw.replace(' ', ''))
    return raw
