"""Job configuration files (TOML with exact rational strings)."""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .gluing import KLEIN, RESOLUTION, SMOOTHING, FlatConnectionRep, GaugeElement, ResolutionChoice, gauge
from .orbifold import DEFAULT_BOUND, DIM, AffineIsometry, OrbifoldPresentation

FIXTURES = ("torus_gamma", "example1", "example2", "example2_smoothing", "example2_variant", "example3")


class ParseError(ValueError):
    """Malformed TOML; the message carries line and column."""


class ValidationError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


@dataclass
class Options:
    bound: int = DEFAULT_BOUND
    out: str | None = None
    name: str = ""


@dataclass
class JobConfig:
    generators: dict[str, AffineIsometry]
    representation: FlatConnectionRep | None = None
    resolution: ResolutionChoice | None = None
    options: Options = field(default_factory=Options)
    digest: str = ""
    _presentation: OrbifoldPresentation | None = field(default=None, init=False, repr=False, compare=False)

    def presentation(self) -> OrbifoldPresentation:
        """Shared presentation, so group and singular-set caches survive between stages."""
        if self._presentation is None:
            self._presentation = OrbifoldPresentation(dict(self.generators))
        return self._presentation


def _rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise ValidationError(where, f"expected an exact rational (int or 'p/q' string), got {v!r}")
    try:
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            return Fraction(v.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(where, f"bad rational {v!r}") from exc
    raise ValidationError(where, f"expected an exact rational, got {v!r}")


def _matrix(v, n: int, where: str) -> list[list[Fraction]]:
    if not isinstance(v, list) or len(v) != n:
        raise ValidationError(where, f"expected a {n}x{n} array")
    out = []
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"{where}[{i}]", f"expected {n} entries")
        out.append([_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return out


def _generator(name: str, table, where: str) -> AffineIsometry:
    if not isinstance(table, dict):
        raise ValidationError(where, "expected a table")
    unknown = set(table) - {"linear", "translation"}
    if unknown:
        raise ValidationError(where, f"unknown keys {sorted(unknown)}")
    if "linear" not in table:
        raise ValidationError(where, "missing 'linear'")
    lin = _matrix(table["linear"], DIM, f"{where}.linear")
    for i, row in enumerate(lin):
        for j, x in enumerate(row):
            if x.denominator != 1:
                raise ValidationError(f"{where}.linear[{i}][{j}]", f"linear part must be integral, got {x}")
    tr = table.get("translation", ["0"] * DIM)
    if not isinstance(tr, list) or len(tr) != DIM:
        raise ValidationError(f"{where}.translation", "expected 7 entries")
    t = [_rational(x, f"{where}.translation[{i}]") for i, x in enumerate(tr)]
    try:
        return AffineIsometry(tuple(tuple(int(x) for x in r) for r in lin), tuple(t), name)
    except ValueError as exc:
        raise ValidationError(f"{where}.linear", str(exc)) from exc


def _gauge(v, where: str) -> GaugeElement:
    if isinstance(v, str):
        if v not in KLEIN:
            raise ValidationError(where, f"unknown Klein-group label {v!r} (use 1, a, b, c)")
        return KLEIN[v]
    try:
        return gauge(_matrix(v, 3, where))
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(where, str(exc)) from exc


def config_from_dict(data: dict, digest: str = "") -> JobConfig:
    unknown = set(data) - {"options", "generators", "representation", "resolution"}
    if unknown:
        raise ValidationError("<root>", f"unknown sections {sorted(unknown)}")
    opts = data.get("options", {})
    bad = set(opts) - {"bound", "out", "name"}
    if bad:
        raise ValidationError("options", f"unknown keys {sorted(bad)}")
    bound = opts.get("bound", DEFAULT_BOUND)
    if not isinstance(bound, int) or isinstance(bound, bool) or bound < 1:
        raise ValidationError("options.bound", "expected a positive integer")
    options = Options(bound, opts.get("out"), opts.get("name", ""))
    gens = {}
    for name, table in data.get("generators", {}).items():
        if name.startswith("tau") and name[3:].isdigit():
            raise ValidationError(f"generators.{name}", "names tau1..tau7 are reserved for lattice translations")
        gens[name] = _generator(name, table, f"generators.{name}")
    try:
        OrbifoldPresentation(dict(gens))
    except ValueError as exc:
        raise ValidationError("generators", str(exc)) from exc
    rep = None
    if "representation" in data:
        assign = {k: _gauge(v, f"representation.{k}") for k, v in data["representation"].items()}
        for k in assign:
            if k not in gens and not (k.startswith("tau") and k[3:].isdigit() and 1 <= int(k[3:]) <= 7):
                raise ValidationError(f"representation.{k}", "not a generator name")
        for k in gens:
            if k not in assign:
                raise ValidationError("representation", f"missing image of {k}")
        rep = FlatConnectionRep(assign)
    res = None
    if "resolution" in data:
        table = dict(data["resolution"])
        default = table.pop("default", SMOOTHING)
        for k, v in list(table.items()) + [("default", default)]:
            if v not in (RESOLUTION, SMOOTHING):
                raise ValidationError(f"resolution.{k}", f"expected 'resolution' or 'smoothing', got {v!r}")
        res = ResolutionChoice(table, default)
    return JobConfig(gens, rep, res, options, digest)


def parse_text(text: str, source: str = "<string>") -> JobConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    return config_from_dict(data, hashlib.sha256(text.encode()).hexdigest())


def parse_config(path: str | Path) -> JobConfig:
    p = Path(path)
    return parse_text(p.read_text(), str(p))


def config_to_dict(cfg: JobConfig) -> dict:
    out: dict = {}
    opts = {"bound": cfg.options.bound}
    if cfg.options.name:
        opts["name"] = cfg.options.name
    if cfg.options.out:
        opts["out"] = cfg.options.out
    out["options"] = opts
    out["generators"] = {
        name: {"linear": [list(r) for r in g.linear], "translation": [str(x) for x in g.translation]}
        for name, g in cfg.generators.items()
    }
    if cfg.representation is not None:
        out["representation"] = {k: v.to_json() for k, v in cfg.representation.assignment.items()}
    if cfg.resolution is not None:
        out["resolution"] = {"default": cfg.resolution.default, **cfg.resolution.per_stratum}
    return out


def emit_config(cfg: JobConfig) -> str:
    return tomli_w.dumps(config_to_dict(cfg))


def fixture_text(name: str) -> str:
    return resources.files("g2glue").joinpath("data", "fixtures", f"{name}.toml").read_text()


def load_fixture(name: str) -> JobConfig:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return parse_text(fixture_text(name), f"{name}.toml")
