"""Run configuration from TOML files and command-line overrides."""

import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, replace

from .errors import ConfigError, InvalidParams
from .phasespace import CASES, ModelParams, SampleSpec
from .realizations import CUSTOM_PHI1, PRESETS, SNYDER_PROFILES, GenParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class Tolerances:
    algebra: float = 1e-7
    generalized: float = 1e-6
    jacobi: float = 1e-7
    pde: float = 1e-9
    flows: float = 1e-6
    og: float = 1e-5


@dataclass(frozen=True)
class RunConfig:
    case: str = "pp"
    alpha: float = 0.1
    beta: float = 0.1
    n: int = 4
    profile: str = "phi2_zero"
    gen: dict = field(default_factory=lambda: {"A": 1.0, "B": 1.0, "phi": 0.0, "psi": 0.0,
                                                "a": None, "b": None})
    mixing: str = "auto"
    born_spatial_only: bool = False
    printed_variants: bool = False
    sample: SampleSpec = field(default_factory=SampleSpec)
    tol: Tolerances = field(default_factory=Tolerances)
    angle: float = 0.3
    omega: float = 1.0
    amplitudes: tuple = (0.2, 0.4, 0.6)
    snyder_profiles: tuple = tuple(SNYDER_PROFILES)
    out: str = None
    fmt: str = "json"

    @property
    def params(self):
        e1, e2 = CASES[self.case]
        return ModelParams(alpha=self.alpha, beta=self.beta, eps1=e1, eps2=e2, n=self.n)

    @property
    def gen_params(self):
        return GenParams(n=self.n, **self.gen)

    def to_dict(self):
        d = asdict(self)
        d["amplitudes"] = list(self.amplitudes)
        d["snyder_profiles"] = list(self.snyder_profiles)
        d.pop("out")
        d.pop("fmt")
        return d


_SECTIONS = {
    "model": {"case", "eps1", "eps2", "alpha", "beta", "n", "profile"},
    "gen": {"A", "B", "phi", "psi", "a", "b", "mixing", "born_spatial_only", "printed_variants"},
    "sample": {"radius", "margin", "count", "seed", "max_attempts"},
    "tol": set(Tolerances.__dataclass_fields__),
    "flows": {"angle"},
    "dynamics": {"omega", "amplitudes"},
    "snyder": {"profiles"},
    "output": {"out", "format"},
}


def _num(path, v, positive=False, nonneg=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(path, "must be positive")
    if nonneg and v < 0:
        raise ConfigError(path, "must be non-negative")
    return float(v)


def _load_toml(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as err:
        raise ConfigError(str(path), f"cannot read: {err.strerror}") from None
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(str(path), f"invalid TOML: {err}") from None


def _merge(base, over):
    out = {k: dict(v) if isinstance(v, dict) else v for k, v in base.items()}
    for sec, vals in over.items():
        out.setdefault(sec, {}).update({k: v for k, v in vals.items() if v is not None})
    return out


def parse_config(path=None, overrides=None):
    """Validated RunConfig from an optional TOML file; ``overrides`` (section -> key -> value) win."""
    raw = _load_toml(path) if path else {}
    for sec, vals in raw.items():
        if sec not in _SECTIONS:
            raise ConfigError(sec, "unknown section")
        if not isinstance(vals, dict):
            raise ConfigError(sec, "expected a table")
        for k in vals:
            if k not in _SECTIONS[sec]:
                raise ConfigError(f"{sec}.{k}", "unknown key")
    raw = _merge(raw, overrides or {})
    m, g, s = raw.get("model", {}), raw.get("gen", {}), raw.get("sample", {})
    kw = {}

    case = m.get("case")
    if "eps1" in m or "eps2" in m:
        e = (int(m.get("eps1", 1)), int(m.get("eps2", 1)))
        match = [c for c, v in CASES.items() if v == e]
        if not match:
            raise ConfigError("model.eps1", "eps1 and eps2 must each be +1 or -1")
        if case is not None and case != match[0]:
            raise ConfigError("model.case", f"{case!r} contradicts eps1={e[0]}, eps2={e[1]}")
        case = match[0]
    if case is not None:
        if case not in CASES:
            raise ConfigError("model.case", f"expected one of {sorted(CASES)}, got {case!r}")
        kw["case"] = case
    for k in ("alpha", "beta"):
        if k in m:
            kw[k] = _num(f"model.{k}", m[k], nonneg=True)
    if "n" in m:
        if not isinstance(m["n"], int) or m["n"] < 2:
            raise ConfigError("model.n", "dimension must be an integer >= 2")
        kw["n"] = m["n"]
    n = kw.get("n", 4)
    if "profile" in m:
        prof = m["profile"]
        ok = prof in PRESETS or (prof.startswith("custom:") and prof[7:] in CUSTOM_PHI1)
        if not ok:
            raise ConfigError("model.profile", f"unknown profile {prof!r}")
        kw["profile"] = prof

    gen = dict(RunConfig().gen)
    for k in ("A", "B", "phi", "psi"):
        if k in g:
            gen[k] = _num(f"gen.{k}", g[k])
    for k in ("a", "b"):
        if k in g and g[k] is not None:
            v = g[k]
            if not isinstance(v, (list, tuple)) or len(v) != n:
                raise ConfigError(f"gen.{k}", f"expected a list of {n} numbers")
            gen[k] = tuple(_num(f"gen.{k}[{i}]", c) for i, c in enumerate(v))
    if gen["A"] == 0.0:
        raise ConfigError("gen.A", "AB must be nonzero")
    if gen["B"] == 0.0:
        raise ConfigError("gen.B", "AB must be nonzero")
    kw["gen"] = gen
    case = kw.get("case", "pp")
    mixed = CASES[case][0] * CASES[case][1] < 0
    mixing = g.get("mixing", "auto")
    if mixing not in ("auto", "trig", "hyperbolic"):
        raise ConfigError("gen.mixing", "expected auto, trig or hyperbolic")
    if mixing == "trig" and mixed:
        warnings.warn(f"case {case} uses hyperbolic generators; switching from trig", stacklevel=2)
        mixing = "hyperbolic"
    if mixing == "hyperbolic" and not mixed:
        raise ConfigError("gen.mixing", f"hyperbolic generators need eps1*eps2 = -1 (case {case})")
    kw["mixing"] = mixing
    for k in ("born_spatial_only", "printed_variants"):
        if k in g:
            kw[k] = bool(g[k])

    try:
        sample = SampleSpec().replace(**{k: s[k] for k in s})
    except (InvalidParams, TypeError, ValueError) as err:
        raise ConfigError("sample", str(err)) from None
    kw["sample"] = sample

    tol = raw.get("tol", {})
    kw["tol"] = replace(Tolerances(), **{k: _num(f"tol.{k}", v, positive=True) for k, v in tol.items()})
    fl = raw.get("flows", {})
    if "angle" in fl:
        kw["angle"] = _num("flows.angle", fl["angle"])
    dy = raw.get("dynamics", {})
    if "omega" in dy:
        kw["omega"] = _num("dynamics.omega", dy["omega"], positive=True)
    if "amplitudes" in dy:
        amps = dy["amplitudes"]
        if isinstance(amps, str):
            amps = [a for a in amps.split(",") if a.strip()]
            try:
                amps = [float(a) for a in amps]
            except ValueError:
                raise ConfigError("dynamics.amplitudes", "expected comma-separated numbers") from None
        if not amps:
            raise ConfigError("dynamics.amplitudes", "at least one amplitude is required")
        kw["amplitudes"] = tuple(_num("dynamics.amplitudes", a, positive=True) for a in amps)
    sn = raw.get("snyder", {})
    if "profiles" in sn:
        for p in sn["profiles"]:
            if p not in SNYDER_PROFILES:
                raise ConfigError("snyder.profiles", f"unknown Snyder profile {p!r}")
        kw["snyder_profiles"] = tuple(sn["profiles"])
    o = raw.get("output", {})
    if "out" in o:
        kw["out"] = o["out"]
    if "format" in o:
        if o["format"] not in ("json", "csv"):
            raise ConfigError("output.format", "expected json or csv")
        kw["fmt"] = o["format"]
    return RunConfig(**kw)
