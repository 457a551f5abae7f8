"""Run configuration: a TOML file with sections mirroring the component
settings. Unknown keys are rejected. Flags on the CLI override file values.

Sections and defaults:

    [kernel]   family = "gaussian", bandwidth = 1.0
    [problem]  q = 0.3, radius = "inf" (or a positive float), s = 2.0
    [sgd]      steps = 20000, seed = 0, record_every = 100
    [sgd.operator]  kind = "identity", c_lo, c_hi, p_hi
    [study]    trials = 200, tail_fraction = 0.5,
               slope_min = -1.25, slope_max = -0.75
    [io]       data_path = "", out_dir = "."
"""

from __future__ import annotations

import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .kernels import KernelSpec
from .objective import MixtureWeights
from .sgd import OperatorMode, SgdConfig


@dataclass(frozen=True)
class KernelSection:
    family: str = "gaussian"
    bandwidth: float = 1.0


@dataclass(frozen=True)
class ProblemSection:
    q: float = 0.3
    radius: float = math.inf
    s: float = 2.0


@dataclass(frozen=True)
class OperatorSection:
    kind: str = "identity"
    c_lo: float = 1.0
    c_hi: float = 1.0
    p_hi: float = 0.0


@dataclass(frozen=True)
class SgdSection:
    steps: int = 20000
    seed: int = 0
    record_every: int = 100
    operator: OperatorSection = field(default_factory=OperatorSection)


@dataclass(frozen=True)
class StudySection:
    trials: int = 200
    tail_fraction: float = 0.5
    slope_min: float = -1.25
    slope_max: float = -0.75


@dataclass(frozen=True)
class IoSection:
    data_path: str = ""
    out_dir: str = "."


@dataclass(frozen=True)
class RunConfig:
    kernel: KernelSection = field(default_factory=KernelSection)
    problem: ProblemSection = field(default_factory=ProblemSection)
    sgd: SgdSection = field(default_factory=SgdSection)
    study: StudySection = field(default_factory=StudySection)
    io: IoSection = field(default_factory=IoSection)


_SECTION_TYPES = {
    "kernel": KernelSection,
    "problem": ProblemSection,
    "sgd": SgdSection,
    "study": StudySection,
    "io": IoSection,
}


def _build_section(cls, table: dict, where: str):
    fields = cls.__dataclass_fields__
    unknown = set(table) - set(fields)
    if unknown:
        raise ConfigError(f"unknown keys in [{where}]: {sorted(unknown)}")
    kwargs = {}
    for key, value in table.items():
        if key == "operator":
            if not isinstance(value, dict):
                raise ConfigError("sgd.operator must be a table")
            kwargs[key] = _build_section(OperatorSection, value, f"{where}.operator")
        elif key == "radius":
            kwargs[key] = _parse_radius(value)
        else:
            ftype = fields[key].type
            if ftype == "int":
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
                kwargs[key] = value
            elif ftype == "float":
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
                kwargs[key] = float(value)
            else:
                if not isinstance(value, str):
                    raise ConfigError(f"{where}.{key} must be a string, got {value!r}")
                kwargs[key] = value
    return cls(**kwargs)


def _parse_radius(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() == "inf":
            return math.inf
        raise ConfigError(f'radius must be a positive number or "inf", got {value!r}')
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'radius must be a positive number or "inf", got {value!r}')
    if not value > 0:
        raise ConfigError(f"radius must be positive, got {value}")
    return float(value)


def parse_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    unknown = set(doc) - set(_SECTION_TYPES)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTION_TYPES.items():
        table = doc.get(name, {})
        if not isinstance(table, dict):
            raise ConfigError(f"[{name}] must be a table")
        kwargs[name] = _build_section(cls, table, name)
    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, float):
        if math.isinf(value):
            return '"inf"'
        return repr(value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    out = []
    tree = asdict(cfg)
    for section, values in tree.items():
        out.append(f"[{section}]")
        for key, value in values.items():
            if isinstance(value, dict):
                continue
            out.append(f"{key} = {_fmt(value)}")
        out.append("")
        for key, value in values.items():
            if isinstance(value, dict):
                out.append(f"[{section}.{key}]")
                for k2, v2 in value.items():
                    out.append(f"{k2} = {_fmt(v2)}")
                out.append("")
    return "\n".join(out)


def kernel_spec(cfg: RunConfig, dim: int) -> KernelSpec:
    return KernelSpec(cfg.kernel.family, cfg.kernel.bandwidth, dim)


def operator_mode(cfg: RunConfig) -> OperatorMode:
    op = cfg.sgd.operator
    return OperatorMode(kind=op.kind, c_lo=op.c_lo, c_hi=op.c_hi, p_hi=op.p_hi)


def sgd_config(cfg: RunConfig, n: int) -> SgdConfig:
    return SgdConfig(
        weights=MixtureWeights(q=cfg.problem.q, n=n),
        steps=cfg.sgd.steps,
        radius=cfg.problem.radius,
        s=cfg.problem.s,
        seed=cfg.sgd.seed,
        operator=operator_mode(cfg),
        record_every=cfg.sgd.record_every,
    )
