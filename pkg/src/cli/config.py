"""
Scenario configuration module.

Loads versioned TOML scenario files into a ScenarioConfig and builds the
matching ScenarioSystem and grid.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from src.counterexample.scenarios import PAPER_DOMAIN, INTRO_DOMAIN, get_builder, scenario_names
from src.glaeser.bundle import Grid, ScenarioSystem, affine_field
from src.glaeser.errors import GlaeserError
from src.glaeser.logging import log_config_rejected
from src.settings import AppConfig, ToleranceConfig


class ConfigurationError(GlaeserError):
    """Raised when a scenario configuration is invalid or unreadable."""
    pass


ARTIFACTS = ("report", "feasibility-grid", "selection-csv", "region-svg")

_TOP_KEYS = {"schema_version", "scenario", "data", "grid", "refinement", "selection", "outputs"}
_DATA_KEYS = {"constant", "values", "gradient", "polynomial", "rows"}
_GRID_KEYS = {"lower", "upper", "resolution"}
_REFINEMENT_KEYS = {
    "neighbor_radius",
    "kappa",
    "ring_start",
    "ring_floor",
    "max_iterations",
    "stabilization_tol",
    "workers",
    "window",
}
_SELECTION_KEYS = {"enabled", "n_dirs", "tol", "refine_factor"}
_OUTPUT_KEYS = {"directory", "artifacts"}

_DEFAULT_DOMAINS = {"paper-2d": PAPER_DOMAIN, "intro-1d": INTRO_DOMAIN}


def _unknown(table: dict, allowed: set, where: str) -> list[str]:
    return [f"{where}{key}" for key in sorted(set(table) - allowed)]


def _table(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigurationError(f"[{name}] must be a table")
    return value


@dataclass
class SelectionSpec:
    enabled: bool = True
    n_dirs: int = ToleranceConfig.STEINER_DIRECTIONS
    tol: Optional[float] = None
    refine_factor: int = 4


@dataclass
class OutputSpec:
    directory: str = "out"
    artifacts: list[str] = field(default_factory=lambda: ["report"])


@dataclass
class ScenarioConfig:
    """Validated contents of a scenario file."""

    scenario: str
    data: dict[str, Any]
    grid_lower: tuple[float, ...]
    grid_upper: tuple[float, ...]
    resolution: tuple[int, ...]
    refinement: dict[str, Any] = field(default_factory=dict)
    selection: SelectionSpec = field(default_factory=SelectionSpec)
    outputs: OutputSpec = field(default_factory=OutputSpec)
    schema_version: int = AppConfig.SCHEMA_VERSION
    source: Optional[str] = None

    @classmethod
    def from_mapping(cls, raw: dict, source: Optional[str] = None) -> "ScenarioConfig":
        """
        Build a configuration from a parsed TOML document.

        Args:
            raw: Parsed document
            source: File the document came from, for messages

        Returns:
            ScenarioConfig (call ``validate`` before use)

        Raises:
            ConfigurationError: For unknown keys or malformed tables
        """
        data = _table(raw, "data")
        grid = _table(raw, "grid")
        refinement = _table(raw, "refinement")
        selection = _table(raw, "selection")
        outputs = _table(raw, "outputs")
        unknown = (
            _unknown(raw, _TOP_KEYS, "")
            + _unknown(data, _DATA_KEYS, "data.")
            + _unknown(grid, _GRID_KEYS, "grid.")
            + _unknown(refinement, _REFINEMENT_KEYS, "refinement.")
            + _unknown(selection, _SELECTION_KEYS, "selection.")
            + _unknown(outputs, _OUTPUT_KEYS, "outputs.")
        )
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")

        scenario = str(raw.get("scenario", ""))
        domain = _DEFAULT_DOMAINS.get(scenario)
        lower = grid.get("lower", domain[0] if domain else None)
        upper = grid.get("upper", domain[1] if domain else None)
        if lower is None or upper is None:
            raise ConfigurationError("grid.lower and grid.upper are required for this scenario")
        try:
            lower = tuple(float(v) for v in np.atleast_1d(lower))
            upper = tuple(float(v) for v in np.atleast_1d(upper))
            resolution = tuple(int(v) for v in np.atleast_1d(grid.get("resolution", 17)))
            selection_spec = SelectionSpec(
                enabled=bool(selection.get("enabled", True)),
                n_dirs=int(selection.get("n_dirs", ToleranceConfig.STEINER_DIRECTIONS)),
                tol=float(selection["tol"]) if "tol" in selection else None,
                refine_factor=int(selection.get("refine_factor", 4)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed [grid] or [selection] value: {e}")
        artifacts = outputs.get("artifacts", ["report"])
        if isinstance(artifacts, str) or not isinstance(artifacts, list):
            raise ConfigurationError("outputs.artifacts must be a list of names")

        return cls(
            scenario=scenario,
            data=dict(data),
            grid_lower=lower,
            grid_upper=upper,
            resolution=resolution,
            refinement=dict(refinement),
            selection=selection_spec,
            outputs=OutputSpec(str(outputs.get("directory", "out")), [str(a) for a in artifacts]),
            schema_version=raw.get("schema_version"),
            source=source,
        )

    def validate(self) -> None:
        """
        Check the configuration against the schema.

        Raises:
            ConfigurationError: Listing every offending key
        """
        problems = []
        if self.schema_version != AppConfig.SCHEMA_VERSION:
            problems.append(
                f"schema_version must be {AppConfig.SCHEMA_VERSION}, got {self.schema_version!r}"
            )
        if self.scenario not in scenario_names():
            problems.append(f"scenario must be one of {', '.join(scenario_names())}")
        problems.extend(self._data_problems())
        if not (len(self.grid_lower) == len(self.grid_upper) and len(self.grid_lower) in (1, 2)):
            problems.append("grid.lower and grid.upper must have 1 or 2 matching entries")
        if any(r < 2 for r in self.resolution):
            problems.append("grid.resolution must be at least 2")
        for key, value in self.refinement.items():
            if key in ("max_iterations", "workers"):
                if not isinstance(value, int) or value < 1:
                    problems.append(f"refinement.{key} must be a positive integer")
            elif not isinstance(value, (int, float)) or isinstance(value, bool):
                problems.append(f"refinement.{key} must be a number")
            elif key in ("stabilization_tol", "kappa") and value < 0:
                problems.append(f"refinement.{key} must be nonnegative")
            elif key not in ("stabilization_tol", "kappa") and value <= 0:
                problems.append(f"refinement.{key} must be positive")
        if self.selection.n_dirs < 8:
            problems.append("selection.n_dirs must be at least 8")
        if self.selection.refine_factor < 1:
            problems.append("selection.refine_factor must be at least 1")
        bad = [a for a in self.outputs.artifacts if a not in ARTIFACTS]
        if bad:
            problems.append(f"outputs.artifacts has unknown entries: {', '.join(bad)}")
        if problems:
            raise ConfigurationError("; ".join(problems))

    def _data_problems(self) -> list[str]:
        data = self.data
        if self.scenario == "intro-1d":
            coeffs = data.get("polynomial")
            if not isinstance(coeffs, list) or not coeffs:
                return ["data.polynomial is required for intro-1d"]
            return []
        expected = 4
        if self.scenario == "custom":
            rows = data.get("rows")
            if not isinstance(rows, list) or not rows:
                return ["data.rows is required for custom"]
            if any(not isinstance(row, list) for row in rows):
                return ["data.rows entries must be lists"]
            expected = len(rows)
        if "constant" in data:
            if not isinstance(data["constant"], list) or len(data["constant"]) != expected:
                return [f"data.constant must be a list of {expected} numbers"]
            return []
        if "values" in data and "gradient" in data:
            values, gradient = data["values"], data["gradient"]
            if not isinstance(values, list) or not isinstance(gradient, list):
                return ["data.values and data.gradient must be lists"]
            if len(values) != expected or len(gradient) != expected:
                return [f"data.values and data.gradient must have {expected} rows"]
            if any(not isinstance(row, list) or len(row) != len(self.grid_lower) for row in gradient):
                return ["data.gradient rows must be lists matching the grid dimension"]
            return []
        return ["data needs either constant or values + gradient"]

    @property
    def grid(self) -> Grid:
        return Grid(self.grid_lower, self.grid_upper, self.resolution)

    @property
    def constant_data(self) -> Optional[list[float]]:
        return [float(v) for v in self.data["constant"]] if "constant" in self.data else None

    def build_system(self) -> ScenarioSystem:
        """ScenarioSystem described by the [data] table."""
        builder = get_builder(self.scenario)
        if self.scenario == "intro-1d":
            return builder(np.polynomial.Polynomial([float(c) for c in self.data["polynomial"]]))
        if "constant" in self.data:
            f = self.constant_data
            lipschitz = None
        else:
            gradient = np.asarray(self.data["gradient"], dtype=float)
            f = affine_field(self.data["values"], gradient)
            lipschitz = float(np.linalg.norm(gradient, 2))
        domain = (self.grid_lower, self.grid_upper)
        if self.scenario == "custom":
            return builder(self.data["rows"], f, domain, data_lipschitz=lipschitz)
        return builder(f, data_lipschitz=lipschitz)


def load_config(path: str | Path) -> ScenarioConfig:
    """
    Read and validate a scenario file.

    Raises:
        ConfigurationError: If the file is unreadable, not TOML or invalid
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            raw = tomllib.load(handle)
    except OSError as e:
        log_config_rejected(f"cannot read {path}: {e.strerror}")
        raise ConfigurationError(f"cannot read {path}: {e.strerror}")
    except tomllib.TOMLDecodeError as e:
        log_config_rejected(f"{path}: {e}")
        raise ConfigurationError(f"{path}: invalid TOML: {e}")
    try:
        config = ScenarioConfig.from_mapping(raw, source=str(path))
        config.validate()
    except ConfigurationError as e:
        log_config_rejected(f"{path}: {e.message}")
        raise
    return config
