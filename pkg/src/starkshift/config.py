"""Physical constants, unit system, and configuration ingestion.

Internal unit system: c = 1 and omega_p = 1.  Every length is stored in
units of c/omega_p (so one pump wavelength lambda_p equals 2*pi), every
rate in units of omega_p.  Shifts and detunings are *reported* in units of
the dipole decay rate Gamma; lengths are *reported* in units of lambda_p.

Configuration files are flat ``key = value`` text.  Values are either
dimensionless numbers in the internal convention of the key (see
``CONFIG_KEYS``), the literal ``auto``, or SI-suffixed quantities such as
``3.03MHz`` or ``780nm`` which are converted through the pump wavelength.
Lines starting with '#' are comments.  Unknown keys are rejected.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass

from .errors import ConfigError

SPEED_OF_LIGHT = 299_792_458.0  # m/s

#: one pump wavelength in internal length units (c/omega_p)
LAMBDA_P = 2.0 * math.pi

#: Rb D2 defaults: lambda_p = 780 nm, dipole (half-width) decay 3.03 MHz
RB_D2_LAMBDA_NM = 780.0
RB_D2_GAMMA_HZ = 3.03e6

ENV_CONFIG_PATH = "STARKSHIFT_CONFIG"


def default_gamma():
    """Dipole decay rate of the Rb D2 line in units of omega_p."""
    nu_p = SPEED_OF_LIGHT / (RB_D2_LAMBDA_NM * 1e-9)
    return RB_D2_GAMMA_HZ / nu_p


@dataclass(frozen=True)
class Geometry:
    """Waveguide cross section and photon loss rate.

    Attributes
    ----------
    n0 : refractive index of the dielectric (> 1)
    dx : slab height along x (internal length units)
    dy : plate separation along y (internal length units)
    kappa : field amplitude loss rate (units of omega_p); photons are
        lost at twice this rate
    """

    n0: float
    dx: float
    dy: float
    kappa: float

    def __post_init__(self):
        if not self.n0 > 1.0:
            raise ConfigError(f"n0 must exceed 1 (guiding needs index contrast), got n0={self.n0}")
        if not self.dx > 0.0:
            raise ConfigError(f"dx must be positive, got dx={self.dx}")
        if not self.dy > 0.0:
            raise ConfigError(f"dy must be positive, got dy={self.dy}")
        if not self.kappa > 0.0:
            raise ConfigError(f"kappa must be positive, got kappa={self.kappa}")

    @property
    def cross_section(self):
        """A = dx * dy."""
        return self.dx * self.dy


@dataclass(frozen=True)
class AtomParams:
    """Two-level atom: rates, detuning, position, derived coupling.

    ``gamma`` is the decay rate of the dipole (half the population decay
    rate).  ``delta_a`` = omega_p - omega_a.  ``g_squared`` is recomputed
    deterministically from (gamma, omega_p, cross section) and never set
    by hand.
    """

    gamma: float
    delta_a: float
    position: tuple  # (x, y, z) internal lengths
    g_squared: float

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ConfigError(f"gamma must be positive, got gamma={self.gamma}")
        if self.g_squared < 0.0:
            raise ConfigError(f"g_squared must be non-negative, got {self.g_squared}")

    @property
    def omega_a(self):
        return 1.0 - self.delta_a


@dataclass(frozen=True)
class PumpParams:
    """Single resonant travelling wave on the lowest branch."""

    k0: float
    omega_p: float = 1.0
    branch: int = 0
    amplitude: float = 1.0  # fixed; all field output is pump-relative


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs for the shift integral and sweeps."""

    omega_c: float = 100.0            # regulator cutoff, units of omega_p
    omega_c_list: tuple = (50.0, 100.0, 200.0)
    quad_tol: float = 1e-6            # absolute tolerance, units of Gamma
    kmax_margin: float = 20.0         # integrate k until omega > margin * omega_c

    def __post_init__(self):
        for oc in (self.omega_c, *self.omega_c_list):
            if not oc > 10.0:
                raise ConfigError(f"regulator cutoff must exceed 10*omega_p, got {oc}")
        if not self.quad_tol > 0.0:
            raise ConfigError("quad_tol must be positive")


def derive_coupling(gamma, omega_p, area):
    """Coupling strength g^2 from the dipole decay rate.

    Eliminating the dipole moment between g = mu*E0/hbar (single-photon
    field E0 over cross section ``area``) and the free-space dipole decay
    law gives g^2 = 3*pi*c^3*gamma / (omega_p^2 * area).  In units of
    Gamma the resulting shift prefactor 2*pi*g^2*n0/(c*Gamma) closes to
    (3/2)*n0*lambda_p^2/A.

    gamma = 0 is allowed (zero coupling); negative inputs are domain
    errors, as are non-positive omega_p or area.
    """
    if gamma < 0.0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    if omega_p <= 0.0 or area <= 0.0:
        raise ValueError(f"omega_p and area must be positive, got {omega_p}, {area}")
    return 3.0 * math.pi * gamma / (omega_p ** 2 * area)  # c = 1


# ---------------------------------------------------------------------------
# config file parsing

_FREQ_SUFFIX = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12}
_LEN_SUFFIX = {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "m": 1.0}

# key -> (kind, default); kind controls SI conversion and resolution:
#   'plain'      dimensionless number
#   'rate'       units of omega_p, frequency suffixes allowed
#   'length'     units of lambda_p, length suffixes allowed
#   'gamma_rate' like 'rate' but 'auto' -> Rb D2 default
#   'choice:a|b' enumerated string
CONFIG_KEYS = {
    "n0": ("plain", "1.5"),
    "dx": ("length", "auto"),          # auto -> lambda_p / sqrt(n0^2 - 1)
    "dy": ("length", "auto"),          # auto -> threshold condition at omega_th
    "omega_th": ("rate", "1.0"),       # target threshold of the first excited branch
    "kappa": ("rate", "0.001"),
    "gamma": ("gamma_rate", "auto"),
    "gamma_convention": ("choice:dipole|population", "dipole"),
    "delta_a": ("plain", "10.0"),      # units of Gamma
    "atom_x": ("length", "auto"),      # auto -> dx/2 (surface)
    "atom_y": ("length", "auto"),      # auto -> dy/2 (between the plates)
    "atom_z": ("length", "0.0"),
    "lambda_p_nm": ("plain", "780.0"),  # anchor for SI-suffixed values only
    "omega_c": ("rate", "100.0"),
    "omega_c_list": ("rate_list", "50,100,200"),
    "quad_tol": ("plain", "1e-6"),
    "kmax_margin": ("plain", "20.0"),
}

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


def _parse_quantity(key, text, kind, lambda_p_nm):
    """Parse one value: plain float, SI-suffixed quantity, or 'auto'."""
    text = text.strip()
    if text.lower() == "auto":
        return "auto"
    m = _NUMBER_RE.match(text)
    if not m:
        raise ConfigError(f"key '{key}': cannot parse value '{text}'")
    value = float(m.group(0))
    suffix = text[m.end():].strip().lower()
    if not suffix:
        return value
    nu_p = SPEED_OF_LIGHT / (lambda_p_nm * 1e-9)
    if suffix in _FREQ_SUFFIX:
        if not kind.startswith(("rate", "gamma_rate")):
            raise ConfigError(f"key '{key}': frequency suffix not allowed here")
        return value * _FREQ_SUFFIX[suffix] / nu_p
    if suffix in _LEN_SUFFIX:
        if kind != "length":
            raise ConfigError(f"key '{key}': length suffix not allowed here")
        return value * _LEN_SUFFIX[suffix] / (lambda_p_nm * 1e-9)
    raise ConfigError(f"key '{key}': unknown unit suffix '{suffix}'")


def parse_config_text(text):
    """Parse flat key=value lines into a raw string dict (defaults filled)."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{line.strip()}'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if not value:
            raise ConfigError(f"line {lineno}: key '{key}' has no value")
        raw[key] = value
    for key, (_, default) in CONFIG_KEYS.items():
        raw.setdefault(key, default)
    return raw


@dataclass(frozen=True)
class Config:
    """Fully resolved immutable configuration.

    ``raw`` echoes every key with its resolved numeric value (what output
    headers embed; re-running from it reproduces the numbers exactly).
    ``raw_input`` preserves the pre-resolution text including ``auto``
    markers, so derived keys (dy, atom position) re-resolve when a sweep
    overrides their inputs.
    """

    geometry: Geometry
    atom: AtomParams
    pump: PumpParams
    solver: SolverSettings
    omega_th: float
    raw: tuple        # sorted (key, value-string) pairs, resolved
    raw_input: tuple  # sorted (key, value-string) pairs, as supplied

    def as_dict(self):
        return dict(self.raw)


def resolve_config(raw):
    """Turn a raw string dict into validated parameter objects.

    Auto values are filled from the reference parameter set: dx such that
    exactly two transverse branches are guided at omega_p, dy such that
    the first excited branch has threshold ``omega_th``, atom on the slab
    surface midway between the plates.
    """
    lam_nm = float(raw["lambda_p_nm"])
    vals = {}
    for key, text in raw.items():
        kind = CONFIG_KEYS[key][0]
        if kind.startswith("choice:"):
            allowed = kind.split(":", 1)[1].split("|")
            if text not in allowed:
                raise ConfigError(f"key '{key}': must be one of {allowed}, got '{text}'")
            vals[key] = text
        elif kind == "rate_list":
            vals[key] = tuple(
                _parse_quantity(key, part, "rate", lam_nm) for part in text.split(",")
            )
        else:
            vals[key] = _parse_quantity(key, text, kind, lam_nm)

    n0 = vals["n0"]
    if not n0 > 1.0:
        raise ConfigError(f"n0 must exceed 1, got n0={n0}")

    dx = vals["dx"]
    if dx == "auto":
        dx = LAMBDA_P / math.sqrt(n0 ** 2 - 1.0)
    else:
        dx = dx * LAMBDA_P

    omega_th = vals["omega_th"]
    if omega_th == "auto":
        omega_th = 1.0
    if not omega_th > 0.0:
        raise ConfigError(f"omega_th must be positive, got {omega_th}")

    kappa = vals["kappa"]

    from . import modesolver  # deferred: modesolver only needs plain numbers

    dy = vals["dy"]
    if dy == "auto":
        dy = modesolver.dy_for_threshold(omega_th, modesolver.ODD, n0, dx)
    else:
        dy = dy * LAMBDA_P

    geometry = Geometry(n0=n0, dx=dx, dy=dy, kappa=kappa)

    gamma = vals["gamma"]
    if gamma == "auto":
        gamma = default_gamma()
    if vals["gamma_convention"] == "population":
        gamma = gamma / 2.0  # internal gamma is always the dipole rate
    if not gamma > 0.0:
        raise ConfigError(f"gamma must be positive, got gamma={gamma}")

    ax, ay, az = vals["atom_x"], vals["atom_y"], vals["atom_z"]
    ax = geometry.dx / 2.0 if ax == "auto" else ax * LAMBDA_P
    ay = geometry.dy / 2.0 if ay == "auto" else ay * LAMBDA_P
    az = 0.0 if az == "auto" else az * LAMBDA_P
    if not 0.0 <= ay <= geometry.dy:
        raise ConfigError(f"atom_y must lie between the plates [0, dy], got {ay / LAMBDA_P} lambda_p")

    g_squared = derive_coupling(gamma, 1.0, geometry.cross_section)
    atom = AtomParams(
        gamma=gamma,
        delta_a=vals["delta_a"] * gamma,
        position=(ax, ay, az),
        g_squared=g_squared,
    )

    branches = modesolver.enumerate_branches(geometry)
    pumped = branches[0]
    if pumped.omega_th >= 1.0:
        raise ConfigError(
            "pumped branch has no travelling mode at the pump frequency "
            f"(threshold {pumped.omega_th} omega_p); key 'omega_th' or 'dy' too large"
        )
    k0 = geometry.n0 * math.sqrt(1.0 - pumped.qn ** 2)
    pump = PumpParams(k0=k0)

    solver = SolverSettings(
        omega_c=vals["omega_c"],
        omega_c_list=tuple(vals["omega_c_list"]),
        quad_tol=vals["quad_tol"],
        kmax_margin=vals["kmax_margin"],
    )

    resolved = dict(raw)
    resolved["dx"] = repr(geometry.dx / LAMBDA_P)
    resolved["dy"] = repr(geometry.dy / LAMBDA_P)
    resolved["gamma"] = repr(gamma)
    resolved["gamma_convention"] = "dipole"
    resolved["atom_x"] = repr(ax / LAMBDA_P)
    resolved["atom_y"] = repr(ay / LAMBDA_P)
    resolved["atom_z"] = repr(az / LAMBDA_P)
    resolved["omega_th"] = repr(omega_th)
    return Config(
        geometry=geometry,
        atom=atom,
        pump=pump,
        solver=solver,
        omega_th=omega_th,
        raw=tuple(sorted(resolved.items())),
    )


def load_config(path=None):
    """Load and resolve a config file.

    With ``path`` None the environment variable ``STARKSHIFT_CONFIG`` is
    consulted; if that is unset too, the built-in defaults are used (an
    empty file and no file behave identically).
    """
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH)
    if path is None:
        return resolve_config(parse_config_text(""))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file '{path}': {exc}") from exc
    return resolve_config(parse_config_text(text))


def config_with(config_or_raw=None, **overrides):
    """Resolve a config with key overrides (values as strings or numbers)."""
    if config_or_raw is None:
        raw = parse_config_text("")
    elif isinstance(config_or_raw, Config):
        raw = dict(config_or_raw.raw)
    else:
        raw = dict(config_or_raw)
    for key, value in overrides.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        raw[key] = value if isinstance(value, str) else repr(value)
    return resolve_config(raw)
