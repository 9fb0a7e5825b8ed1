"""Strict key-value configuration: parsing, validation, canonical echo.

Format: `key = value` lines grouped under `[section]` headers, `#` comments.
Unknown keys and sections are rejected outright so a typo can never fall back
to a physics default silently.  `format_config` renders the fully resolved
configuration (defaults applied) in a canonical order with full float
precision; parse(format(cfg)) == cfg.
"""

from __future__ import annotations

import dataclasses
import hashlib
from pathlib import Path

from .analytic import MODEL_BY_NAME, ModelKind
from .experiments import (
    ConfigError,
    ExperimentConfig,
    KINDS,
    ORACLES,
    Platform,
    Tolerances,
    preset_platform,
)
from .params import PhysicalParams, PLATFORM_PRESETS


def _parse_float(raw: str, path: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{path}: expected a number, got {raw!r}") from None


def _parse_int(raw: str, path: str) -> int:
    try:
        return int(raw, 0)
    except ValueError:
        raise ConfigError(f"{path}: expected an integer, got {raw!r}") from None


def _parse_complex(raw: str, path: str) -> complex:
    text = raw.replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise ConfigError(f"{path}: expected a complex number like 1+2j, got {raw!r}") from None


def _parse_float_list(raw: str, path: str) -> tuple[float, ...]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{path}: expected a comma-separated list of numbers")
    return tuple(_parse_float(s, path) for s in items)


def _parse_models(raw: str, path: str) -> tuple[ModelKind, ...]:
    names = [s.strip() for s in raw.split(",") if s.strip()]
    out = []
    for name in names:
        if name not in MODEL_BY_NAME:
            raise ConfigError(f"{path}: unknown model {name!r}; expected {sorted(MODEL_BY_NAME)}")
        out.append(MODEL_BY_NAME[name])
    if not out:
        raise ConfigError(f"{path}: at least one model required")
    return tuple(out)


def _parse_choice(raw: str, path: str, choices) -> str:
    if raw not in choices:
        raise ConfigError(f"{path}: expected one of {tuple(choices)}, got {raw!r}")
    return raw


_RUN_KEYS = {"kind", "seed", "out", "oracle", "samples", "models", "platforms", "timestamp"}
_PARAMS_KEYS = {"delta", "omega", "preset", "mass_kg", "omega_rad_s", "separation_m", "grav_constant", "hbar"}
_STATE_KEYS = {"alpha", "beta", "cat_alpha", "random_pairs"}
_SWEEP_KEYS = {"alpha_mags", "deltas"}
_NUMERICS_KEYS = {"grid_points", "grid_half_extent", "dt_factor", "rk_step_factor", "workers"}
_TOLERANCE_KEYS = {f.name for f in dataclasses.fields(Tolerances)}
_SI_KEYS = ("mass_kg", "omega_rad_s", "separation_m")


def parse_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    digest = "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()
    cfg = parse_config_text(text, source=str(path))
    return dataclasses.replace(cfg, source_digest=digest)


def parse_config_text(text: str, source: str = "<string>") -> ExperimentConfig:
    entries: dict[tuple[str, str], str] = {}
    section = "run"
    platform_sections: dict[str, dict[str, str]] = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section.startswith("platform:"):
                platform_sections.setdefault(section.split(":", 1)[1].strip(), {})
            elif section not in ("run", "params", "state", "sweep", "numerics", "tolerances"):
                raise ConfigError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected `key = value`, got {rawline.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if section.startswith("platform:"):
            name = section.split(":", 1)[1].strip()
            if key not in _PARAMS_KEYS:
                raise ConfigError(f"{source}:{lineno}: platform:{name}.{key}: unknown key")
            platform_sections[name][key] = value
        else:
            known = {
                "run": _RUN_KEYS,
                "params": _PARAMS_KEYS,
                "state": _STATE_KEYS,
                "sweep": _SWEEP_KEYS,
                "numerics": _NUMERICS_KEYS,
                "tolerances": _TOLERANCE_KEYS,
            }[section]
            if key not in known:
                raise ConfigError(f"{source}:{lineno}: {section}.{key}: unknown key")
            if (section, key) in entries:
                raise ConfigError(f"{source}:{lineno}: {section}.{key}: duplicate key")
            entries[(section, key)] = value

    def get(section: str, key: str) -> str | None:
        return entries.get((section, key))

    if get("run", "kind") is None:
        raise ConfigError(f"{source}: run.kind is required")
    kind = _parse_choice(get("run", "kind"), "run.kind", KINDS)

    kwargs: dict = {"kind": kind}
    if get("run", "seed") is not None:
        kwargs["seed"] = _parse_int(get("run", "seed"), "run.seed")
    if get("run", "out") is not None:
        kwargs["out_dir"] = get("run", "out")
    if get("run", "timestamp") is not None:
        kwargs["timestamp"] = get("run", "timestamp")
    if get("run", "oracle") is not None:
        kwargs["oracle"] = _parse_choice(get("run", "oracle"), "run.oracle", ORACLES)
    if get("run", "samples") is not None:
        kwargs["samples"] = _parse_int(get("run", "samples"), "run.samples")
    if get("run", "models") is not None:
        kwargs["models"] = _parse_models(get("run", "models"), "run.models")

    si_given = [k for k in _SI_KEYS if get("params", k) is not None]
    preset = get("params", "preset")
    delta_given = get("params", "delta") is not None
    if preset is not None:
        if preset not in PLATFORM_PRESETS:
            raise ConfigError(f"params.preset: unknown preset {preset!r}; known: {sorted(PLATFORM_PRESETS)}")
        if si_given or delta_given:
            raise ConfigError("params: preset cannot be combined with delta or SI keys")
        kwargs["physical"] = PLATFORM_PRESETS[preset]
        kwargs["delta"] = None
    elif si_given:
        if delta_given:
            raise ConfigError("params: give either delta or SI keys, not both")
        if set(si_given) != set(_SI_KEYS):
            missing = sorted(set(_SI_KEYS) - set(si_given))
            raise ConfigError(f"params: SI parameterization needs all of {_SI_KEYS}; missing {missing}")
        extra = {}
        if get("params", "grav_constant") is not None:
            extra["grav_constant"] = _parse_float(get("params", "grav_constant"), "params.grav_constant")
        if get("params", "hbar") is not None:
            extra["hbar"] = _parse_float(get("params", "hbar"), "params.hbar")
        kwargs["physical"] = PhysicalParams(
            mass=_parse_float(get("params", "mass_kg"), "params.mass_kg"),
            omega=_parse_float(get("params", "omega_rad_s"), "params.omega_rad_s"),
            separation=_parse_float(get("params", "separation_m"), "params.separation_m"),
            **extra,
        )
        kwargs["delta"] = None
    else:
        if delta_given:
            kwargs["delta"] = _parse_float(get("params", "delta"), "params.delta")
        if get("params", "omega") is not None:
            kwargs["omega"] = _parse_float(get("params", "omega"), "params.omega")

    for key, parser in (
        ("alpha", _parse_complex),
        ("beta", _parse_complex),
        ("cat_alpha", _parse_complex),
    ):
        if get("state", key) is not None:
            kwargs[key] = parser(get("state", key), f"state.{key}")
    if get("state", "random_pairs") is not None:
        kwargs["random_pairs"] = _parse_int(get("state", "random_pairs"), "state.random_pairs")

    if get("sweep", "alpha_mags") is not None:
        kwargs["alpha_mags"] = _parse_float_list(get("sweep", "alpha_mags"), "sweep.alpha_mags")
    if get("sweep", "deltas") is not None:
        kwargs["deltas"] = _parse_float_list(get("sweep", "deltas"), "sweep.deltas")

    if get("numerics", "grid_points") is not None:
        kwargs["grid_points"] = _parse_int(get("numerics", "grid_points"), "numerics.grid_points")
    if get("numerics", "grid_half_extent") is not None:
        raw = get("numerics", "grid_half_extent")
        kwargs["grid_half_extent"] = None if raw == "auto" else _parse_float(raw, "numerics.grid_half_extent")
    if get("numerics", "dt_factor") is not None:
        kwargs["dt_factor"] = _parse_float(get("numerics", "dt_factor"), "numerics.dt_factor")
    if get("numerics", "rk_step_factor") is not None:
        kwargs["rk_step_factor"] = _parse_float(get("numerics", "rk_step_factor"), "numerics.rk_step_factor")
    if get("numerics", "workers") is not None:
        kwargs["workers"] = _parse_int(get("numerics", "workers"), "numerics.workers")

    tol_kwargs = {}
    for key in sorted(_TOLERANCE_KEYS):
        if get("tolerances", key) is not None:
            tol_kwargs[key] = _parse_float(get("tolerances", key), f"tolerances.{key}")
    if tol_kwargs:
        kwargs["tolerances"] = dataclasses.replace(Tolerances(), **tol_kwargs)

    platforms_raw = get("run", "platforms")
    if platforms_raw is not None:
        names = [s.strip() for s in platforms_raw.split(",") if s.strip()]
        platforms = []
        for name in names:
            if name in platform_sections:
                platforms.append(_build_platform(name, platform_sections[name]))
            elif name in PLATFORM_PRESETS:
                platforms.append(preset_platform(name))
            else:
                raise ConfigError(
                    f"run.platforms: {name!r} is neither a preset nor defined in a [platform:{name}] section"
                )
        unused = sorted(set(platform_sections) - set(names))
        if unused:
            raise ConfigError(f"platform sections defined but not listed in run.platforms: {unused}")
        kwargs["platforms"] = tuple(platforms)
    elif platform_sections:
        raise ConfigError("platform sections given without run.platforms listing them")

    try:
        cfg = ExperimentConfig(**kwargs)
        cfg.dimensionless()  # surface range violations (e.g. delta >= 1/2) at parse time
        for platform in cfg.platforms:
            platform.dimensionless()
    except (ConfigError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _build_platform(name: str, keys: dict[str, str]) -> Platform:
    path = f"platform:{name}"
    preset = keys.get("preset")
    if preset is not None:
        if preset not in PLATFORM_PRESETS:
            raise ConfigError(f"{path}.preset: unknown preset {preset!r}")
        return Platform(name=name, physical=PLATFORM_PRESETS[preset])
    si = [k for k in _SI_KEYS if k in keys]
    if si:
        if "delta" in keys:
            raise ConfigError(f"{path}: give either delta or SI keys, not both")
        if set(si) != set(_SI_KEYS):
            raise ConfigError(f"{path}: SI parameterization needs all of {_SI_KEYS}")
        extra = {}
        if "grav_constant" in keys:
            extra["grav_constant"] = _parse_float(keys["grav_constant"], f"{path}.grav_constant")
        if "hbar" in keys:
            extra["hbar"] = _parse_float(keys["hbar"], f"{path}.hbar")
        return Platform(
            name=name,
            physical=PhysicalParams(
                mass=_parse_float(keys["mass_kg"], f"{path}.mass_kg"),
                omega=_parse_float(keys["omega_rad_s"], f"{path}.omega_rad_s"),
                separation=_parse_float(keys["separation_m"], f"{path}.separation_m"),
                **extra,
            ),
        )
    if "delta" in keys:
        omega = _parse_float(keys["omega"], f"{path}.omega") if "omega" in keys else 1.0
        return Platform(name=name, delta=_parse_float(keys["delta"], f"{path}.delta"), omega=omega)
    raise ConfigError(f"{path}: needs preset, delta, or SI keys")


def _fmt_float(v: float) -> str:
    return "%.17g" % v


def _fmt_complex(v: complex) -> str:
    return "%.17g%+.17gj" % (v.real, v.imag)


def format_config(cfg: ExperimentConfig) -> str:
    """Canonical text form of the fully resolved configuration."""
    lines = ["[run]"]
    lines.append(f"kind = {cfg.kind}")
    lines.append(f"seed = {cfg.seed}")
    lines.append(f"oracle = {cfg.oracle}")
    lines.append(f"samples = {cfg.samples}")
    lines.append("models = " + ", ".join(m.value for m in cfg.models))
    if cfg.out_dir is not None:
        lines.append(f"out = {cfg.out_dir}")
    if cfg.timestamp is not None:
        lines.append(f"timestamp = {cfg.timestamp}")
    lines.append("platforms = " + ", ".join(p.name for p in cfg.platforms))
    lines.append("")
    lines.append("[params]")
    if cfg.physical is not None:
        p = cfg.physical
        lines.append(f"mass_kg = {_fmt_float(p.mass)}")
        lines.append(f"omega_rad_s = {_fmt_float(p.omega)}")
        lines.append(f"separation_m = {_fmt_float(p.separation)}")
        lines.append(f"grav_constant = {_fmt_float(p.grav_constant)}")
        lines.append(f"hbar = {_fmt_float(p.hbar)}")
    else:
        lines.append(f"delta = {_fmt_float(cfg.delta)}")
        lines.append(f"omega = {_fmt_float(cfg.omega)}")
    lines.append("")
    lines.append("[state]")
    lines.append(f"alpha = {_fmt_complex(cfg.alpha)}")
    lines.append(f"beta = {_fmt_complex(cfg.beta)}")
    lines.append(f"cat_alpha = {_fmt_complex(cfg.cat_alpha)}")
    lines.append(f"random_pairs = {cfg.random_pairs}")
    lines.append("")
    lines.append("[sweep]")
    lines.append("alpha_mags = " + ", ".join(_fmt_float(v) for v in cfg.alpha_mags))
    lines.append("deltas = " + ", ".join(_fmt_float(v) for v in cfg.deltas))
    lines.append("")
    lines.append("[numerics]")
    lines.append(f"grid_points = {cfg.grid_points}")
    extent = "auto" if cfg.grid_half_extent is None else _fmt_float(cfg.grid_half_extent)
    lines.append(f"grid_half_extent = {extent}")
    lines.append(f"dt_factor = {_fmt_float(cfg.dt_factor)}")
    lines.append(f"rk_step_factor = {_fmt_float(cfg.rk_step_factor)}")
    lines.append(f"workers = {cfg.workers}")
    lines.append("")
    lines.append("[tolerances]")
    for f in dataclasses.fields(Tolerances):
        lines.append(f"{f.name} = {_fmt_float(getattr(cfg.tolerances, f.name))}")
    for platform in cfg.platforms:
        lines.append("")
        lines.append(f"[platform:{platform.name}]")
        if platform.physical is not None:
            p = platform.physical
            lines.append(f"mass_kg = {_fmt_float(p.mass)}")
            lines.append(f"omega_rad_s = {_fmt_float(p.omega)}")
            lines.append(f"separation_m = {_fmt_float(p.separation)}")
            lines.append(f"grav_constant = {_fmt_float(p.grav_constant)}")
            lines.append(f"hbar = {_fmt_float(p.hbar)}")
        else:
            lines.append(f"delta = {_fmt_float(platform.delta)}")
            lines.append(f"omega = {_fmt_float(platform.omega)}")
    lines.append("")
    return "\n".join(lines)


def config_digest(cfg: ExperimentConfig) -> str:
    return "sha256:" + hashlib.sha256(format_config(cfg).encode("utf-8")).hexdigest()
