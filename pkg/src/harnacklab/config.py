"""Experiment configuration: bracketed sections of key = value lines.

Parsing is strict: duplicate keys, unknown sections, unknown keys, and
malformed values are all ConfigError with the offending line where the
underlying parser exposes it.  Tolerance overrides live in their own
section keyed by check slug and must be positive; slug validity is
enforced by the suite registry, not here, so this module stays free of
suite imports.
"""

import hashlib
from configparser import ConfigParser, DuplicateOptionError, DuplicateSectionError, Error as ParserError
from dataclasses import dataclass, field


class ConfigError(Exception):
    """Any parse or validation failure; the CLI maps this to exit code 2."""


_SECTION_KEYS = {
    "experiment": {"name", "seed", "out"},
    "grid": {"resolution_multiplier"},
    "tolerances": None,  # free-form slugs, validated against the suite
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    out_dir: str = "results"
    resolution_multiplier: float = 1.0
    tolerances: dict = field(default_factory=dict)
    source_text: str = ""

    @property
    def config_hash(self):
        """Digest of the effective settings; embedded in output headers.

        The output directory is deliberately excluded: the hash names the
        computation, not where its files land.
        """
        effective = (
            f"{self.experiment}|{self.seed}|{repr(self.resolution_multiplier)}|"
            + "|".join(f"{k}={repr(self.tolerances[k])}" for k in sorted(self.tolerances))
        )
        return hashlib.sha256(effective.encode()).hexdigest()[:12]

    def header_meta(self, **extra):
        """Common metadata block for every output file."""
        meta = {
            "config_hash": self.config_hash,
            "experiment": self.experiment,
            "seed": self.seed,
            "resolution_multiplier": self.resolution_multiplier,
        }
        meta.update(extra)
        return meta

    def tolerance(self, slug, default):
        return float(self.tolerances.get(slug, default))


def parse_config_text(text):
    parser = ConfigParser(
        strict=True, interpolation=None, delimiters=("=",), comment_prefixes=("#",)
    )
    try:
        parser.read_string(text)
    except (DuplicateOptionError, DuplicateSectionError) as exc:
        raise ConfigError(f"duplicate entry at line {exc.lineno}: {exc.message}") from exc
    except ParserError as exc:
        raise ConfigError(str(exc)) from exc

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        allowed = _SECTION_KEYS[section]
        if allowed is not None:
            for key in parser[section]:
                if key not in allowed:
                    raise ConfigError(f"unknown key '{key}' in section [{section}]")

    if not parser.has_option("experiment", "name"):
        raise ConfigError("missing required key 'name' in section [experiment]")
    name = parser.get("experiment", "name").strip()
    if not name:
        raise ConfigError("experiment name is empty")

    try:
        seed = parser.getint("experiment", "seed", fallback=0)
    except ValueError as exc:
        raise ConfigError(f"seed must be an integer: {exc}") from exc
    out_dir = parser.get("experiment", "out", fallback="results").strip()

    try:
        mult = parser.getfloat("grid", "resolution_multiplier", fallback=1.0)
    except ValueError as exc:
        raise ConfigError(f"resolution_multiplier must be a number: {exc}") from exc
    if not mult > 0:
        raise ConfigError("resolution_multiplier must be positive")

    tolerances = {}
    if parser.has_section("tolerances"):
        for key, raw in parser["tolerances"].items():
            try:
                val = float(raw)
            except ValueError as exc:
                raise ConfigError(f"tolerance '{key}' is not a number: {raw}") from exc
            if not val > 0:
                raise ConfigError(f"tolerance '{key}' must be positive")
            tolerances[key] = val

    return ExperimentConfig(
        experiment=name,
        seed=seed,
        out_dir=out_dir,
        resolution_multiplier=mult,
        tolerances=tolerances,
        source_text=text,
    )


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config_text(text)
