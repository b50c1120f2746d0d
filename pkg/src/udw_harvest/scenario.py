"""Dimensionless detector-pair parameterization, model variants, regimes.

Internal units: hbar = 1, switching timescale sigma = 1, vacuum light
speed c = 1.  All public quantities are the dimensionless groups
omega = Omega*sigma, separation = S/(c sigma), width = L/(c sigma),
mass = M*c*sigma, speed_ratio = c_s/c; outputs are reported per
coupling^2 (lambda = 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    "Pointlike",
    "Smeared",
    "Delocalized",
    "ModelVariant",
    "ScenarioConfig",
    "HarvestResult",
    "RegimeVerdict",
    "RegimeRejectedError",
    "regime_check",
    "config_to_text",
    "config_from_text",
]

REJECT_LMC = 35.0
WARN_LMC = 350.0
SUPERSONIC_LMS = 3.5
# packets reach the medium wave speed when width*mass*speed_ratio drops
# to ~3.5; flag anything within a factor two of that bound
NEAR_SONIC_FACTOR = 2.0


@dataclass(frozen=True)
class Pointlike:
    pass


@dataclass(frozen=True)
class Smeared:
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")


@dataclass(frozen=True)
class Delocalized:
    width: float
    mass: float
    speed_ratio: float = 1.0
    path: str = "exact"

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if not (0.0 < self.speed_ratio <= 1.0):
            raise ValueError("speed_ratio must be in (0, 1]")
        if self.path not in ("exact", "taylor"):
            raise ValueError("path must be 'exact' or 'taylor'")


ModelVariant = Union[Pointlike, Smeared, Delocalized]


@dataclass(frozen=True)
class ScenarioConfig:
    omega: float
    separation: float
    model: ModelVariant

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.separation < 0:
            raise ValueError("separation must be non-negative")


@dataclass(frozen=True)
class HarvestResult:
    p_a: float
    p_b: float
    m: complex
    negativity: float
    err_p: float
    err_m: float

    def recomputed_negativity(self) -> float:
        import math

        gap = math.hypot((self.p_a - self.p_b) / 2.0, abs(self.m))
        return max(0.0, gap - (self.p_a + self.p_b) / 2.0)


@dataclass(frozen=True)
class RegimeVerdict:
    status: str  # "ok" | "warn" | "reject"
    message: str
    lmc: float
    lms: float
    supersonic: bool

    @property
    def rejected(self) -> bool:
        return self.status == "reject"


class RegimeRejectedError(ValueError):
    def __init__(self, verdict: RegimeVerdict):
        super().__init__(verdict.message)
        self.verdict = verdict


def regime_check(model: ModelVariant) -> RegimeVerdict:
    """Check the non-relativistic bound width*mass >= 3.5e2 (with one
    order of magnitude of grace before rejecting) and flag supersonic
    packet velocities when width*mass*speed_ratio >= 3.5."""
    if not isinstance(model, Delocalized):
        raise TypeError("regime_check applies to Delocalized models only")
    lmc = model.width * model.mass
    lms = lmc * model.speed_ratio
    supersonic = lms <= NEAR_SONIC_FACTOR * SUPERSONIC_LMS
    sup_note = (
        f"; supersonic-capable packet velocities (width*mass*speed_ratio = "
        f"{lms:g}, sonic bound {SUPERSONIC_LMS})"
        if supersonic
        else f"; width*mass*speed_ratio = {lms:g} vs sonic bound {SUPERSONIC_LMS}"
    )
    if lmc < REJECT_LMC:
        return RegimeVerdict(
            "reject",
            f"width*mass = {lmc:g} is an order of magnitude below the "
            f"non-relativistic bound {WARN_LMC:g}; results would be meaningless",
            lmc,
            lms,
            supersonic,
        )
    if lmc < WARN_LMC:
        return RegimeVerdict(
            "warn",
            f"width*mass = {lmc:g} is below the non-relativistic bound "
            f"{WARN_LMC:g}; packet velocities are not safely sub-1%-of-c"
            + sup_note,
            lmc,
            lms,
            supersonic,
        )
    return RegimeVerdict(
        "ok", f"width*mass = {lmc:g} within regime" + sup_note, lmc, lms, supersonic
    )


# ----------------------------------------------------------------------
# Flat key=value config format (bit-exact float round trip via repr)
# ----------------------------------------------------------------------

_MODEL_NAMES = {Pointlike: "pointlike", Smeared: "smeared", Delocalized: "delocalized"}
CONFIG_KEYS = ("omega", "separation", "model", "width", "mass", "speed_ratio", "path")


def config_to_text(cfg: ScenarioConfig) -> str:
    lines = [
        f"omega={float(cfg.omega)!r}",
        f"separation={float(cfg.separation)!r}",
        f"model={_MODEL_NAMES[type(cfg.model)]}",
    ]
    m = cfg.model
    if isinstance(m, (Smeared, Delocalized)):
        lines.append(f"width={float(m.width)!r}")
    if isinstance(m, Delocalized):
        lines.append(f"mass={float(m.mass)!r}")
        lines.append(f"speed_ratio={float(m.speed_ratio)!r}")
        lines.append(f"path={m.path}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> ScenarioConfig:
    kv: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {ln}: unknown key {key!r}")
        kv[key] = value.strip()
    return config_from_mapping(kv)


def config_from_mapping(kv: dict[str, str]) -> ScenarioConfig:
    for key in kv:
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown key {key!r}")
    missing = [k for k in ("omega", "separation", "model") if k not in kv]
    if missing:
        raise ValueError(f"missing required key(s): {', '.join(missing)}")

    def fget(key):
        try:
            return float(kv[key])
        except ValueError:
            raise ValueError(f"key {key!r}: not a number: {kv[key]!r}") from None

    name = kv["model"].lower()
    if name == "pointlike":
        model: ModelVariant = Pointlike()
    elif name == "smeared":
        if "width" not in kv:
            raise ValueError("smeared model requires width")
        model = Smeared(width=fget("width"))
    elif name == "delocalized":
        for req in ("width", "mass"):
            if req not in kv:
                raise ValueError(f"delocalized model requires {req}")
        model = Delocalized(
            width=fget("width"),
            mass=fget("mass"),
            speed_ratio=fget("speed_ratio") if "speed_ratio" in kv else 1.0,
            path=kv.get("path", "exact").lower(),
        )
    else:
        raise ValueError(f"unknown model {kv['model']!r}")
    return ScenarioConfig(omega=fget("omega"), separation=fget("separation"), model=model)
