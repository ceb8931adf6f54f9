"""Flat INI run configuration.

One file describes one experiment: the kinetic problem, the planner that
builds the step ladder, and where outputs go.  Keys are validated strictly;
an unknown key is an error rather than a silent default, since a typo in a
stiffness parameter is otherwise very hard to notice.
"""

import configparser
from dataclasses import dataclass, field

from .spatial import SCHEMES
from .system import COLLISION_KINDS, CollisionModel

TPI_MODES = ("clustered", "zero_one")
OUTER_CHOICES = ("pfe", "prk2", "prk4")

INITIAL_NAMES = ("step_profile_1d", "gaussian_1d", "gaussian_2d")

_KNOWN_KEYS = {
    "problem": (
        "dimension", "dx", "eps", "scheme", "j_nodes", "collision", "omega",
        "omega_breakpoints", "omega_values", "initial_density",
    ),
    "tpi": ("mode", "outer", "k_inner", "h_last_over_dx", "h0", "m_min", "k_max"),
    "run": ("t_end", "snapshots"),
    "output": ("dir",),
}


class ConfigError(ValueError):
    """A run configuration file is missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class ExperimentConfig:
    dx: float
    eps: float
    initial_density: str
    tpi_mode: str
    dimension: int = 1
    scheme: str = "upwind1"
    j_nodes: int = 10
    collision: str = "constant"
    omega: float = 1.0
    omega_breakpoints: tuple = field(default_factory=tuple)
    omega_values: tuple = field(default_factory=tuple)
    outer: str = "pfe"
    k_inner: int = 1
    h_last_over_dx: float = 0.5
    h0: float | None = None
    m_min: float = 3.0
    k_max: int = 10
    t_end: float = 1.0
    snapshots: int = 5
    out_dir: str | None = None

    def to_dict(self) -> dict:
        from dataclasses import asdict

        d = asdict(self)
        d["omega_breakpoints"] = list(self.omega_breakpoints)
        d["omega_values"] = list(self.omega_values)
        return d


def _get(parser, section, key, cast, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"missing required key [{section}] {key}")
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r} ({exc})") from None


def _float_list(raw: str) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def collision_model(cfg: ExperimentConfig) -> CollisionModel:
    """Build the collision model a configuration describes."""
    if cfg.collision == "constant":
        return CollisionModel("constant", omega=cfg.omega)
    if cfg.collision == "profile":
        return CollisionModel("profile", breakpoints=cfg.omega_breakpoints,
                              values=cfg.omega_values)
    return CollisionModel("density")


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.dimension not in (1, 2):
        raise ConfigError("dimension must be 1 or 2")
    if cfg.dx <= 0.0 or round(1.0 / cfg.dx) < 3:
        raise ConfigError("dx must be positive and resolve the unit interval")
    if abs(round(1.0 / cfg.dx) * cfg.dx - 1.0) > 1e-9:
        raise ConfigError(f"dx = {cfg.dx} does not divide the unit interval")
    if cfg.eps <= 0.0:
        raise ConfigError("eps must be positive")
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}")
    if cfg.j_nodes < 2:
        raise ConfigError("j_nodes must be at least 2")
    if cfg.collision not in COLLISION_KINDS:
        raise ConfigError(f"collision must be one of {COLLISION_KINDS}")
    if cfg.collision == "profile" and cfg.dimension != 1:
        raise ConfigError("piecewise collision profiles are one-dimensional")
    try:
        collision_model(cfg)
    except ValueError as exc:
        raise ConfigError(f"bad collision model: {exc}") from None
    name = cfg.initial_density
    if not (name in INITIAL_NAMES or name.startswith("table:")):
        raise ConfigError(
            f"initial_density must be one of {INITIAL_NAMES} or 'table:<csv path>'"
        )
    if cfg.dimension == 2 and name in ("step_profile_1d", "gaussian_1d"):
        raise ConfigError(f"{name} is a one-dimensional profile")
    if cfg.dimension == 1 and name == "gaussian_2d":
        raise ConfigError("gaussian_2d needs dimension = 2")
    if cfg.tpi_mode not in TPI_MODES:
        raise ConfigError(f"tpi mode must be one of {TPI_MODES}")
    if cfg.tpi_mode == "clustered":
        if cfg.dimension != 1:
            raise ConfigError("clustered planning needs the one-dimensional spectrum")
        if cfg.h0 is not None:
            raise ConfigError("h0 override applies to zero_one mode only")
    if cfg.tpi_mode == "zero_one" and not 1 <= cfg.k_inner <= 10:
        raise ConfigError("k_inner must be between 1 and 10")
    if cfg.outer not in OUTER_CHOICES:
        raise ConfigError(f"outer must be one of {OUTER_CHOICES}")
    if cfg.h_last_over_dx <= 0.0:
        raise ConfigError("h_last_over_dx must be positive")
    if cfg.h0 is not None and cfg.h0 <= 0.0:
        raise ConfigError("h0 must be positive")
    if cfg.m_min < 1.0:
        raise ConfigError("m_min below 1 does not describe a projective level")
    if not 1 <= cfg.k_max <= 10:
        raise ConfigError("k_max must be between 1 and 10")
    if cfg.t_end <= 0.0:
        raise ConfigError("t_end must be positive")
    if cfg.snapshots < 0:
        raise ConfigError("snapshots cannot be negative")
    return cfg


def load_config(path) -> ExperimentConfig:
    """Parse and validate a run configuration file."""
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key [{section}] {key}")
    for required_section in ("problem", "tpi"):
        if not parser.has_section(required_section):
            raise ConfigError(f"missing section [{required_section}]")

    cfg = ExperimentConfig(
        dimension=_get(parser, "problem", "dimension", int, default=1),
        dx=_get(parser, "problem", "dx", float, required=True),
        eps=_get(parser, "problem", "eps", float, required=True),
        scheme=_get(parser, "problem", "scheme", str, default="upwind1"),
        j_nodes=_get(parser, "problem", "j_nodes", int, default=10),
        collision=_get(parser, "problem", "collision", str, default="constant"),
        omega=_get(parser, "problem", "omega", float, default=1.0),
        omega_breakpoints=_get(parser, "problem", "omega_breakpoints", _float_list,
                               default=()),
        omega_values=_get(parser, "problem", "omega_values", _float_list, default=()),
        initial_density=_get(parser, "problem", "initial_density", str, required=True),
        tpi_mode=_get(parser, "tpi", "mode", str, required=True),
        outer=_get(parser, "tpi", "outer", str, default="pfe"),
        k_inner=_get(parser, "tpi", "k_inner", int, default=1),
        h_last_over_dx=_get(parser, "tpi", "h_last_over_dx", float, default=0.5),
        h0=_get(parser, "tpi", "h0", float, default=None),
        m_min=_get(parser, "tpi", "m_min", float, default=3.0),
        k_max=_get(parser, "tpi", "k_max", int, default=10),
        t_end=_get(parser, "run", "t_end", float, default=1.0) if parser.has_section("run") else 1.0,
        snapshots=_get(parser, "run", "snapshots", int, default=5) if parser.has_section("run") else 5,
        out_dir=_get(parser, "output", "dir", str, default=None) if parser.has_section("output") else None,
    )
    return _validate(cfg)
