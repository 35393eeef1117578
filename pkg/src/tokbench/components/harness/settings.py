"""
Pipeline configuration: component defaults, then a flat ``key=value`` file, then CLI overrides.

Config file example:

    # experiment.conf
    train = data/train.csv
    test = data/test.csv
    tokenizer = subword
    vocab-size = 8000
    C = 10
"""

from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, get_type_hints

from tokbench.components.registry import (
    classifier_names,
    component_defaults,
    tokenizer_names,
)
from tokbench.utils import (
    ConfigError,
    ValidationError,
    decode_utf8,
    safe_read_bytes,
    validate_fraction,
    validate_input_path,
)


@dataclass
class PipelineConfig:
    train: Optional[str] = None
    test: Optional[str] = None
    output_dir: str = "out"
    tokenizer: str = "subword"
    classifier: str = "lr"
    dictionary: Optional[str] = None
    subword_model: Optional[str] = None
    vocab_size: int = 2000
    max_piece_len: int = 8
    shrink_factor: float = 0.75
    em_iters: int = 2
    fraction: float = 1.0
    seed: int = 42
    alpha: float = 1.0
    C: float = 10.0
    tol: float = 1e-6
    max_iter: int = 200
    tune: bool = False
    grid: str = "C=0.01,0.1,1,10,100"
    k: int = 5
    repeats: int = 3
    jobs: int = 1

    @classmethod
    def from_defaults(cls) -> "PipelineConfig":
        """Build a config from the component config.yaml defaults."""
        subword = component_defaults("subword")
        classify = component_defaults("classify")
        values: Dict[str, Any] = dict(component_defaults("harness"))
        values.update(
            vocab_size=subword["vocab_size"],
            max_piece_len=subword["max_piece_len"],
            shrink_factor=subword["shrink_factor"],
            em_iters=subword["em_iters_per_round"],
        )
        values.update({key: classify[key] for key in ("alpha", "C", "tol", "max_iter", "k")})
        values.update(repeats=classify["repeats"], grid=classify["grid"])
        return cls().updated(values)

    def updated(self, values: Mapping[str, Any]) -> "PipelineConfig":
        """Copy with ``values`` applied; None values are ignored."""
        current = asdict(self)
        for raw_key, value in values.items():
            if value is None:
                continue
            key = normalize_key(raw_key)
            if key not in current:
                raise ConfigError(f"Unknown config key: {raw_key}")
            current[key] = coerce_value(key, value)
        return PipelineConfig(**current)

    def validate(self, require_test: bool = True) -> None:
        """
        Check paths and option values before any work starts.

        Raises:
            ConfigError: On a missing input file or an unknown tokenizer/classifier
            ValidationError: On an out-of-range number
        """
        validate_input_path(self.train, "train")
        if require_test:
            validate_input_path(self.test, "test")
        if self.tokenizer not in tokenizer_names():
            raise ConfigError(f"Unknown tokenizer: {self.tokenizer}")
        if self.classifier not in classifier_names():
            raise ConfigError(f"Unknown classifier: {self.classifier}")
        if self.dictionary is not None:
            validate_input_path(self.dictionary, "dictionary")
        if self.subword_model is not None:
            validate_input_path(self.subword_model, "subword_model")
        validate_fraction(self.fraction)
        if self.tune and self.classifier != "lr":
            raise ConfigError("tune=true is only supported for the lr classifier")
        for name in ("vocab_size", "max_piece_len", "em_iters", "max_iter", "repeats", "jobs"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.k < 2:
            raise ValidationError("k must be >= 2")
        if self.alpha <= 0 or self.C <= 0 or self.tol <= 0:
            raise ValidationError("alpha, C and tol must be > 0")

    def tokenizer_model(self) -> Optional[str]:
        return self.dictionary if self.tokenizer == "lattice" else self.subword_model

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_TYPES = get_type_hints(PipelineConfig)
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def normalize_key(key: str) -> str:
    key = key.strip().replace("-", "_")
    return key if key == "C" else key.lower()


def coerce_value(key: str, value: Any) -> Any:
    """Convert a raw value to the declared type of ``key``."""
    target = _TYPES[key]
    try:
        if target is bool:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(value)
        if target is int:
            return int(value)
        if target is float:
            return float(value)
        return str(value).strip()
    except ValueError:
        raise ConfigError(f"Invalid value for {key}: {value!r}") from None


def parse_key_value(text: str) -> Dict[str, str]:
    """
    Parse ``key=value`` lines; blank lines and ``#`` comments are skipped.

    Raises:
        ConfigError: On a line without ``=`` or a repeated key
    """
    values: Dict[str, str] = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Config line {line_number}: expected key=value, got {raw_line!r}")
        key = normalize_key(key)
        if key in values:
            raise ConfigError(f"Config line {line_number}: duplicate key {key}")
        values[key] = value.strip()
    return values


def load_pipeline_config(
    path: Optional[str | Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> PipelineConfig:
    """
    Resolve a PipelineConfig from defaults, an optional config file, and overrides.

    Raises:
        ConfigError: If the file cannot be read or holds unknown keys or bad values
    """
    config = PipelineConfig.from_defaults()
    if path is not None:
        config = config.updated(parse_key_value(decode_utf8(safe_read_bytes(path))))
    return config.updated(overrides or {})


CONFIG_KEYS = tuple(f.name for f in fields(PipelineConfig))

__all__ = [
    "CONFIG_KEYS",
    "PipelineConfig",
    "coerce_value",
    "load_pipeline_config",
    "normalize_key",
    "parse_key_value",
]
