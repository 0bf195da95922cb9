"""Run configuration: a line-oriented ``key=value`` file plus overrides.

Recognized keys::

    model       complex | real | frances | hessian-comparison | product
    n           positive integer (default 1)
    sigma       rows separated by ';', entries by ','
    sigma_file  path to a file holding the sigma text
    base        base model of a product extension: real | complex (default real)
    k, l        signature of the flat factor of a product extension
    suites      comma-separated suite names, or "all"
    seed        integer (PKV_SEED in the environment takes precedence)
    tol         positive float used by the numeric checks
    a, b        parameters of the fundamental domain
    json, text  output paths for the reports
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError, DimensionError
from .models import SigmaMatrix

MODELS = ("complex", "real", "frances", "hessian-comparison", "product")
SUITES = ("metric", "curvature", "symmetry", "holonomy", "transvection",
          "geodesics", "conformal", "quotient", "complex-structure")
KEYS = ("model", "n", "sigma", "sigma_file", "base", "k", "l", "suites",
        "seed", "tol", "a", "b", "json", "text")


@dataclass(frozen=True)
class RunConfig:
    model: str = "complex"
    n: int = 1
    sigma: SigmaMatrix = field(default_factory=lambda: SigmaMatrix.identity(1))
    base: str = "real"
    k: int = 1
    l: int = 1
    suites: tuple[str, ...] = SUITES
    seed: int = 0
    tol: float = 1e-10
    a: float = 1.0
    b: float = 0.5
    json_path: str | None = None
    text_path: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}", None, "model")
        if self.n < 1:
            raise ConfigError("n must be at least 1", None, "n")
        if self.sigma.n != self.n:
            raise ConfigError(f"n={self.n} does not match the {self.sigma.n}x{self.sigma.n} sigma", None, "n")
        if not self.suites:
            raise ConfigError("no suites selected", None, "suites")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite {bad[0]!r}", None, "suites")
        if self.tol <= 0:
            raise ConfigError("tol must be positive", None, "tol")
        if self.k < 0 or self.l < 0:
            raise ConfigError("k and l must be nonnegative", None, "k" if self.k < 0 else "l")
        if self.base not in ("real", "complex"):
            raise ConfigError(f"unknown base model {self.base!r}", None, "base")
        if self.a <= 0 or self.b <= 0:
            raise ConfigError("a and b must be positive", None, "a" if self.a <= 0 else "b")

    @property
    def is_real_sigma_model(self) -> bool:
        return self.model in ("real", "hessian-comparison") or (self.model == "product" and self.base == "real")

    def to_dict(self) -> dict:
        # output paths are left out so reports do not depend on where they are written
        d = {f.name: getattr(self, f.name) for f in fields(self) if not f.name.endswith("_path")}
        d["sigma"] = str(self.sigma)
        d["suites"] = list(self.suites)
        return d


def _parse_sigma(text: str, line: int | None, key: str = "sigma") -> SigmaMatrix:
    try:
        return SigmaMatrix.parse(text)
    except DimensionError as exc:
        msg = str(exc)
        if "row length mismatch" in msg:
            msg = "row length mismatch"
        where = f" at line {line}" if line is not None else ""
        raise ConfigError(f"{msg}{where} (key {key})", line, key) from None
    except ValueError as exc:
        where = f" at line {line}" if line is not None else ""
        raise ConfigError(f"{exc}{where} (key {key})", line, key) from None


def _convert(key: str, value: str, line: int | None):
    try:
        if key in ("n", "k", "l", "seed"):
            return int(value)
        if key in ("tol", "a", "b"):
            return float(value)
    except ValueError:
        where = f" at line {line}" if line is not None else ""
        raise ConfigError(f"bad value {value!r}{where} (key {key})", line, key) from None
    if key == "suites":
        names = [s.strip() for s in value.split(",") if s.strip()]
        if names == ["all"]:
            return SUITES
        for s in names:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r} at line {line} (key suites)", line, key)
        return tuple(names)
    return value.strip()


def build_config(values: dict, lines: dict | None = None) -> RunConfig:
    """Assemble a RunConfig from raw key/value pairs (strings or typed)."""
    lines = lines or {}
    typed = {}
    for key, value in values.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}" + (f" at line {lines[key]}" if key in lines else ""),
                              lines.get(key), key)
        typed[key] = _convert(key, value, lines.get(key)) if isinstance(value, str) else value
    if "sigma" in typed and "sigma_file" in typed:
        raise ConfigError("give sigma or sigma_file, not both", lines.get("sigma_file"), "sigma_file")
    sigma = None
    if "sigma_file" in typed:
        path = Path(typed.pop("sigma_file"))
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read sigma file: {exc}", lines.get("sigma_file"), "sigma_file") from None
        text = ";".join(r.strip() for r in text.replace("\n", ";").split(";") if r.strip())
        sigma = _parse_sigma(text, lines.get("sigma_file"), "sigma_file")
    elif "sigma" in typed:
        s = typed.pop("sigma")
        sigma = s if isinstance(s, SigmaMatrix) else _parse_sigma(s, lines.get("sigma"))
    n = typed.pop("n", None)
    if sigma is None:
        n = 1 if n is None else n
        if n < 1:
            raise ConfigError("n must be at least 1", lines.get("n"), "n")
        sigma = SigmaMatrix.identity(n)
    elif n is None:
        n = sigma.n
    elif n != sigma.n:
        raise ConfigError(f"n={n} does not match the {sigma.n}x{sigma.n} sigma at line {lines.get('n', lines.get('sigma'))}",
                          lines.get("n"), "n")
    if "PKV_SEED" in os.environ:
        try:
            typed["seed"] = int(os.environ["PKV_SEED"])
        except ValueError:
            raise ConfigError("PKV_SEED must be an integer", None, "seed") from None
    kwargs = {k: v for k, v in typed.items() if k not in ("json", "text")}
    if "json" in typed:
        kwargs["json_path"] = typed["json"]
    if "text" in typed:
        kwargs["text_path"] = typed["text"]
    try:
        return RunConfig(n=n, sigma=sigma, **kwargs)
    except ConfigError as exc:
        raise ConfigError(str(exc) + (f" at line {lines[exc.key]}" if exc.key in lines else ""),
                          lines.get(exc.key), exc.key) from None


def read_pairs(text: str) -> tuple[dict, dict]:
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value at line {lineno}", lineno, None)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r} at line {lineno}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} at line {lineno}", lineno, key)
        values[key], lines[key] = value, lineno
    return values, lines


def parse_config(text: str) -> RunConfig:
    values, lines = read_pairs(text)
    return build_config(values, lines)


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    if "sigma" in changes and "n" not in changes:
        changes["n"] = changes["sigma"].n
    if "n" in changes and "sigma" not in changes and changes["n"] != cfg.sigma.n:
        changes["sigma"] = SigmaMatrix.identity(changes["n"])
    return replace(cfg, **changes)
