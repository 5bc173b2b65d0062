"""Run configuration: a YAML file validated into plain dataclasses."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigurationError

FRAME_KINDS = ("wavelet", "gabor", "shearlet", "import")
NORMALIZE_MODES = ("parseval", "bound", "none")
SUITES = ("invariance", "lipschitz", "stability", "intermediate", "energy")

_FRAME_KEYS = {
    "wavelet": {"J": int, "K": int},
    "gabor": {"frequency_step": int, "width": float},
    "shearlet": {"scales": int, "shears_per_scale": int},
    "import": {"path": str},
}


@dataclass
class FrameSpec:
    kind: str
    params: dict
    normalize: str = "parseval"
    bound: float = 1.0
    scale: float = 1.0


@dataclass
class DeformationTargets:
    dtau: float = 0.2
    omega: float = 0.05
    tau: float | None = None
    max_freq: int = 2


@dataclass
class VerificationConfig:
    suites: dict = field(default_factory=lambda: {s: True for s in SUITES})
    shifts: int = 4
    pairs: int = 10
    fields: int = 3
    R: float = 8
    max_depth: int = 2
    invariance_tol: float = 1e-9
    lipschitz_atol: float = 1e-9
    energy_tol: float = 1e-3
    interpolation_tol: float | None = None
    sweep: list = field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])
    deformation: DeformationTargets = field(default_factory=DeformationTargets)


@dataclass
class RunConfig:
    d: int = 2
    n: int = 64
    frames: list = field(default_factory=list)
    collection: list = field(default_factory=lambda: [0])
    max_depth: int = 2
    prune_rel: float = 0.0
    fields: int = 1
    deformation: DeformationTargets = field(default_factory=DeformationTargets)
    verification: VerificationConfig = field(default_factory=VerificationConfig)
    seed: int = 0
    input: Path | None = None
    out: Path = Path("framescatter-out")
    source: Path | None = None


def _fail(where: str, message: str):
    raise ConfigurationError(f"{where}: {message}")


def _take(section: dict, key: str, kind, where: str, default: Any = None, required: bool = False):
    if key not in section:
        if required:
            _fail(f"{where}.{key}", "required field is missing")
        return default
    value = section[key]
    if value is None:
        return None
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, float) and value.is_integer():
        value = int(value)
    if kind is float and isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            pass
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        _fail(f"{where}.{key}", f"expected {kind.__name__}, got {value!r}")
    return value


def _section(raw: dict, key: str, where: str) -> dict:
    value = raw.get(key) or {}
    if not isinstance(value, dict):
        _fail(f"{where}{key}", "expected a mapping")
    return value


def _check_keys(section: dict, allowed, where: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        _fail(where, f"unknown field(s) {', '.join(map(str, unknown))}")


def _frame_spec(raw, i: int, base: Path) -> FrameSpec:
    where = f"frames[{i}]"
    if not isinstance(raw, dict):
        _fail(where, "expected a mapping")
    kind = _take(raw, "kind", str, where, required=True)
    if kind not in FRAME_KINDS:
        _fail(f"{where}.kind", f"must be one of {FRAME_KINDS}, got {kind!r}")
    allowed = _FRAME_KEYS[kind]
    _check_keys(raw, set(allowed) | {"kind", "normalize", "bound", "scale"}, where)
    params = {}
    for key, kind_ in allowed.items():
        value = _take(raw, key, kind_, where)
        if value is not None:
            params[key] = value
    if kind == "import":
        if "path" not in params:
            _fail(f"{where}.path", "required field is missing")
        params["path"] = str((base / params["path"]).resolve())
    required = {"wavelet": ["J"], "gabor": ["frequency_step"], "shearlet": ["scales"]}.get(kind, [])
    for key in required:
        if key not in params:
            _fail(f"{where}.{key}", "required field is missing")
    normalize = _take(raw, "normalize", str, where, default="parseval")
    if normalize not in NORMALIZE_MODES:
        _fail(f"{where}.normalize", f"must be one of {NORMALIZE_MODES}, got {normalize!r}")
    bound = _take(raw, "bound", float, where, default=1.0)
    if normalize == "bound" and not 0 < bound <= 1:
        _fail(f"{where}.bound", f"must lie in (0, 1], got {bound}")
    scale = _take(raw, "scale", float, where, default=1.0)
    return FrameSpec(kind, params, normalize, bound, scale)


def _targets(raw: dict, where: str) -> DeformationTargets:
    _check_keys(raw, {"dtau", "omega", "tau", "max_freq"}, where)
    t = DeformationTargets()
    t.dtau = _take(raw, "dtau", float, where, t.dtau)
    t.omega = _take(raw, "omega", float, where, t.omega)
    t.tau = _take(raw, "tau", float, where, t.tau)
    t.max_freq = _take(raw, "max_freq", int, where, t.max_freq)
    return t


def parse_config(raw: dict, base: Path = Path(".")) -> RunConfig:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        _fail("<root>", "expected a mapping at the top level")
    _check_keys(raw, {"grid", "frames", "collection", "scattering", "deformation",
                      "verification", "seed", "io"}, "<root>")
    cfg = RunConfig()

    grid = _section(raw, "grid", "")
    _check_keys(grid, {"d", "n"}, "grid")
    cfg.d = _take(grid, "d", int, "grid", cfg.d)
    cfg.n = _take(grid, "n", int, "grid", cfg.n)

    frames = raw.get("frames")
    if not isinstance(frames, list) or not frames:
        _fail("frames", "at least one frame is required")
    cfg.frames = [_frame_spec(f, i, base) for i, f in enumerate(frames)]

    collection = raw.get("collection", [0])
    if not isinstance(collection, list) or not collection:
        _fail("collection", "expected a nonempty list of frame indices")
    for i, idx in enumerate(collection):
        if not isinstance(idx, int) or not 0 <= idx < len(cfg.frames):
            _fail(f"collection[{i}]", f"frame index {idx!r} out of range")
    cfg.collection = collection

    sc = _section(raw, "scattering", "")
    _check_keys(sc, {"max_depth", "prune_rel"}, "scattering")
    cfg.max_depth = _take(sc, "max_depth", int, "scattering", cfg.max_depth)
    cfg.prune_rel = _take(sc, "prune_rel", float, "scattering", cfg.prune_rel)
    if cfg.max_depth < 0:
        _fail("scattering.max_depth", "must be >= 0")
    if not 0 <= cfg.prune_rel < 1:
        _fail("scattering.prune_rel", "must lie in [0, 1)")

    de = _section(raw, "deformation", "")
    cfg.fields = _take(de, "fields", int, "deformation", cfg.fields)
    cfg.deformation = _targets({k: v for k, v in de.items() if k != "fields"}, "deformation")

    ve = _section(raw, "verification", "")
    _check_keys(ve, {"suites", "shifts", "pairs", "fields", "R", "max_depth", "tolerances",
                     "sweep", "deformation"}, "verification")
    v = VerificationConfig()
    suites = _section(ve, "suites", "verification.")
    _check_keys(suites, SUITES, "verification.suites")
    v.suites = {s: bool(suites.get(s, True)) for s in SUITES}
    for key in ("shifts", "pairs", "fields", "max_depth"):
        setattr(v, key, _take(ve, key, int, "verification", getattr(v, key)))
    v.R = _take(ve, "R", float, "verification", v.R)
    tol = _section(ve, "tolerances", "verification.")
    _check_keys(tol, {"invariance", "lipschitz", "energy", "interpolation"}, "verification.tolerances")
    v.invariance_tol = _take(tol, "invariance", float, "verification.tolerances", v.invariance_tol)
    v.lipschitz_atol = _take(tol, "lipschitz", float, "verification.tolerances", v.lipschitz_atol)
    v.energy_tol = _take(tol, "energy", float, "verification.tolerances", v.energy_tol)
    v.interpolation_tol = _take(tol, "interpolation", float, "verification.tolerances",
                                v.interpolation_tol)
    sweep = ve.get("sweep", v.sweep)
    if not isinstance(sweep, list) or not all(isinstance(s, (int, float)) and s >= 0 for s in sweep):
        _fail("verification.sweep", "expected a list of nonnegative factors")
    v.sweep = [float(s) for s in sweep]
    v.deformation = _targets(_section(ve, "deformation", "verification."), "verification.deformation")
    cfg.verification = v

    cfg.seed = _take(raw, "seed", int, "<root>", cfg.seed)
    io = _section(raw, "io", "")
    _check_keys(io, {"input", "out"}, "io")
    inp = _take(io, "input", str, "io")
    if inp is not None:
        cfg.input = (base / inp).resolve()
    out = _take(io, "out", str, "io")
    if out is not None:
        cfg.out = (base / out)
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc.strerror}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f" line {mark.line + 1}" if mark is not None else ""
        raise ConfigurationError(f"{path}:{line} {getattr(exc, 'problem', exc)}") from exc
    cfg = parse_config(raw, base=path.parent)
    cfg.source = path
    check_referenced_files(cfg)
    return cfg


def check_referenced_files(cfg: RunConfig) -> None:
    for i, spec in enumerate(cfg.frames):
        if spec.kind == "import" and not (Path(spec.params["path"]) / "manifest.json").is_file():
            _fail(f"frames[{i}].path", f"no bank manifest under {spec.params['path']}")
    if cfg.input is not None and not cfg.input.is_file():
        _fail("io.input", f"file {cfg.input} does not exist")
