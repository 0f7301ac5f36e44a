"""INI-style run configuration.

``configparser`` is not used because errors must name the offending line
and unknown keys must be rejected section by section.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .clifford import default_fiber_dimension
from .errors import ConfigurationError
from .fields import INITIAL_KINDS, InitialDataSpec
from .flow import SCHEMES, IntegratorConfig
from .functional import ModelParams
from .lattice import Lattice


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _fiber(text: str):
    return None if text.lower() == "auto" else int(text)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _choice(options):
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


# (section, key) -> (attribute, parser, default, required)
SCHEMA = {
    ("lattice", "m"): ("m", int, None, True),
    ("lattice", "n"): ("n", int, None, True),
    ("lattice", "length"): ("length", float, None, True),
    ("model", "s_const"): ("s_const", float, 0.0, False),
    ("model", "fiber_dim"): ("fiber_dim", _fiber, None, False),
    ("flow", "integrator"): ("integrator", _choice(SCHEMES), "rk4", False),
    ("flow", "cfl"): ("cfl", float, 0.1, False),
    ("flow", "t_end"): ("t_end", float, None, True),
    ("flow", "snapshot_every"): ("snapshot_every", int, 10, False),
    ("flow", "allow_unstable"): ("allow_unstable", _bool, False, False),
    ("init", "kind"): ("kind", _choice(INITIAL_KINDS), "random_fourier", False),
    ("init", "seed"): ("seed", int, 0, False),
    ("init", "amplitude"): ("amplitude", float, 0.5, False),
    ("init", "max_mode"): ("max_mode", int, 2, False),
    ("init", "center"): ("center", _floats, None, False),
    ("init", "width"): ("width", float, None, False),
    ("output", "dir"): ("out_dir", str, None, False),
}


@dataclass(frozen=True)
class RunConfig:
    m: int
    n: int
    length: float
    t_end: float
    s_const: float = 0.0
    fiber_dim: int | None = None
    integrator: str = "rk4"
    cfl: float = 0.1
    snapshot_every: int = 10
    allow_unstable: bool = False
    kind: str = "random_fourier"
    seed: int = 0
    amplitude: float = 0.5
    max_mode: int = 2
    center: tuple[float, ...] | None = None
    width: float | None = None
    out_dir: str | None = None

    @property
    def lattice(self) -> Lattice:
        return Lattice(m=self.m, n=self.n, L=self.length)

    @property
    def N(self) -> int:
        return self.fiber_dim if self.fiber_dim is not None else default_fiber_dimension(self.m)

    def model(self) -> ModelParams:
        return ModelParams(S=self.s_const, lattice=self.lattice, N=self.N)

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            scheme=self.integrator,
            cfl=self.cfl,
            t_end=self.t_end,
            snapshot_every=self.snapshot_every,
            allow_unstable=self.allow_unstable,
        )

    def initial_spec(self) -> InitialDataSpec:
        return InitialDataSpec(
            kind=self.kind,
            amplitude=self.amplitude,
            seed=self.seed,
            max_mode=self.max_mode,
            center=self.center,
            width=self.width,
        )

    def validate(self):
        """Run every owning module's checks; nothing large is allocated."""
        lat = self.lattice
        if self.fiber_dim is not None and self.fiber_dim < 1:
            raise ConfigurationError("fiber_dim must be >= 1 or auto", key="fiber_dim")
        self.model()
        self.integrator_config()
        self.initial_spec().validate(lat)


def parse_config(text: str) -> RunConfig:
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigurationError(f"malformed section header {line!r}", line=lineno)
            section = line[1:-1].strip()
            if section not in {s for s, _ in SCHEMA}:
                raise ConfigurationError(f"unknown section [{section}]", key=section, line=lineno)
            continue
        if "=" not in line:
            raise ConfigurationError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if section is None:
            raise ConfigurationError("key outside any section", key=key, line=lineno)
        if (section, key) not in SCHEMA:
            raise ConfigurationError(f"unknown key in [{section}]", key=key, line=lineno)
        attr, parser, _, _ = SCHEMA[section, key]
        if attr in values:
            raise ConfigurationError("duplicate key", key=key, line=lineno)
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ConfigurationError(f"bad value {value!r}: {exc}", key=key, line=lineno) from None
        if isinstance(parsed, float) and not math.isfinite(parsed):
            raise ConfigurationError(f"non-finite value {value!r}", key=key, line=lineno)
        values[attr] = parsed
        lines[attr] = lineno

    for (section, key), (attr, _, _, required) in SCHEMA.items():
        if required and attr not in values:
            raise ConfigurationError(f"missing required key in [{section}]", key=key)

    config = RunConfig(**values)
    try:
        config.validate()
    except ConfigurationError as exc:
        attr = _attr_for_key(exc.key)
        if exc.line is None and attr in lines:
            raise ConfigurationError(exc.message, key=exc.key, line=lines[attr]) from None
        raise
    return config


def _attr_for_key(key: str | None) -> str | None:
    for (_, k), (attr, *_rest) in SCHEMA.items():
        if k == key:
            return attr
    return key


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def format_config(config: RunConfig) -> str:
    """Serialize so that ``parse_config(format_config(c)) == c``."""
    data = asdict(config)
    out, current = [], None
    for (section, key), (attr, *_rest) in SCHEMA.items():
        value = data[attr]
        if value is None:
            if attr == "fiber_dim":
                value = "auto"
            else:
                continue
        if section != current:
            if current is not None:
                out.append("")
            out.append(f"[{section}]")
            current = section
        out.append(f"{key} = {_format_value(value)}")
    return "\n".join(out) + "\n"

