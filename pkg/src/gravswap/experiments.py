"""Experiment drivers: swap, RWA-validity sweep, cat-state dichotomy, and
platform feasibility.

Each driver consumes one immutable ExperimentConfig and returns a
self-contained ExperimentReport: tables of sampled observables, a list of
pass/fail verdicts with their thresholds, and figure descriptions.  Reports
contain no wall-clock state unless the config carries a timestamp, so
identical configs produce byte-identical emitted files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytic import (
    CORRECTED_DELTA_LIMIT,
    ModelKind,
    phase_corrected_pair,
    propagate_corrected_displacement,
    propagate_moments,
    propagate_rwa_lab_displacement,
)
from .grid import (
    CatProduct,
    CoherentProduct,
    auto_grid_spec,
    build_initial_grid,
    GridSpec,
    split_step_evolve,
)
from .moments_ode import IntegratorConfig, integrate_moments
from .params import (
    DimensionlessParams,
    PhysicalParams,
    PLATFORM_PRESETS,
    derive_dimensionless,
    swap_time,
)
from .states import (
    PairMoments,
    branch_schmidt_entropy,
    coherent_pair_moments,
    displacement_from_moments,
    from_normal_modes,
    to_normal_modes,
    two_mode_overlap,
)

KINDS = ("swap", "rwa_validity", "cat_state", "feasibility")
ORACLES = ("none", "ode", "grid", "all")

DEFAULT_MODELS = (ModelKind.QG_RWA, ModelKind.QG_FULL, ModelKind.SCEG)


class ConfigError(ValueError):
    """Raised for invalid experiment configuration."""


@dataclass(frozen=True)
class Tolerances:
    """Every threshold any verdict uses; echoed verbatim into manifests."""

    swap_fidelity: float = 1e-12
    first_moment: float = 1e-12
    width_closed: float = 1e-12
    width_grid: float = 5e-6
    ode_agreement: float = 1e-8
    grid_agreement: float = 1e-5
    deviation_law_rel: float = 0.10
    linear_scaling_rel: float = 0.05
    entropy_oracle: float = 1e-2
    entropy_min: float = 0.5
    product_entropy_max: float = 1e-6
    sceg_mean_max: float = 1e-6
    sceg_purity_defect: float = 1e-4
    impractical_swap_seconds: float = 1e9
    width_flag_rel: float = 1e-6


@dataclass(frozen=True)
class Platform:
    """One feasibility row: SI parameters or a synthetic direct coupling."""

    name: str
    physical: PhysicalParams | None = None
    delta: float | None = None
    omega: float = 1.0

    def __post_init__(self) -> None:
        if (self.physical is None) == (self.delta is None):
            raise ConfigError(f"platform {self.name!r}: give SI parameters or a direct delta, not both")

    def dimensionless(self) -> DimensionlessParams:
        if self.physical is not None:
            return derive_dimensionless(self.physical)
        return DimensionlessParams(delta=self.delta, omega=self.omega)


def preset_platform(name: str) -> Platform:
    if name not in PLATFORM_PRESETS:
        raise ConfigError(f"unknown platform preset {name!r}; known: {sorted(PLATFORM_PRESETS)}")
    return Platform(name=name, physical=PLATFORM_PRESETS[name])


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "swap"
    models: tuple[ModelKind, ...] = DEFAULT_MODELS
    delta: float | None = 0.05
    omega: float = 1.0
    physical: PhysicalParams | None = None
    alpha: complex = 1 + 0j
    beta: complex = 0j
    cat_alpha: complex = 2 + 0j
    random_pairs: int = 0
    alpha_mags: tuple[float, ...] = (1.0, 10.0, 100.0)
    deltas: tuple[float, ...] = (0.01, 0.05, 0.1)
    samples: int = 200
    oracle: str = "none"
    grid_points: int = 256
    grid_half_extent: float | None = None
    dt_factor: float = 5e-4
    rk_step_factor: float = 1e-4
    workers: int = 1
    seed: int = 0
    timestamp: str | None = None
    out_dir: str | None = None
    platforms: tuple[Platform, ...] = (preset_platform("ca40_ion"),)
    tolerances: Tolerances = field(default_factory=Tolerances)
    source_digest: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"run.kind: unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.oracle not in ORACLES:
            raise ConfigError(f"run.oracle: unknown oracle {self.oracle!r}; expected one of {ORACLES}")
        if not self.models:
            raise ConfigError("run.models: at least one model required")
        if self.samples < 2:
            raise ConfigError("run.samples: need at least 2 samples")
        if self.random_pairs < 0:
            raise ConfigError("state.random_pairs: must be non-negative")
        if self.delta is not None and self.physical is not None:
            raise ConfigError("params: give either a direct delta or SI parameters, not both")
        if self.delta is None and self.physical is None:
            raise ConfigError("params: one of delta or SI parameters is required")
        if not all(m > 0 for m in self.alpha_mags):
            raise ConfigError("sweep.alpha_mags: magnitudes must be positive")

    def dimensionless(self) -> DimensionlessParams:
        if self.physical is not None:
            return derive_dimensionless(self.physical)
        return DimensionlessParams(delta=self.delta, omega=self.omega)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(
            dt_factor=self.dt_factor,
            rk_step_factor=self.rk_step_factor,
            workers=self.workers,
        )

    def uses_ode(self) -> bool:
        return self.oracle in ("ode", "all")

    def uses_grid(self) -> bool:
        return self.oracle in ("grid", "all")


@dataclass
class Verdict:
    name: str
    passed: bool
    observed: float
    threshold: float
    comparison: str  # "<=" or ">="
    note: str = ""


def _check(name: str, observed: float, comparison: str, threshold: float, note: str = "") -> Verdict:
    if comparison == "<=":
        ok = observed <= threshold
    elif comparison == ">=":
        ok = observed >= threshold
    else:
        raise ValueError(f"bad comparison {comparison!r}")
    return Verdict(name=name, passed=bool(ok), observed=float(observed), threshold=float(threshold), comparison=comparison, note=note)


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]


@dataclass
class ExperimentReport:
    kind: str
    config: ExperimentConfig
    version: str
    tables: dict[str, Table]
    verdicts: list[Verdict]
    notes: list[str]
    figures: list[dict]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def _report(cfg: ExperimentConfig) -> ExperimentReport:
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg,
        version=__version__,
        tables={},
        verdicts=[],
        notes=[],
        figures=[],
    )


def _add_table(report: ExperimentReport, name: str, columns: tuple[str, ...]) -> Table:
    table = Table(name=name, columns=columns, rows=[])
    report.tables[name] = table
    return table


def _mean_array(records: list[PairMoments]) -> np.ndarray:
    return np.array(
        [(r.plus.mean_x, r.plus.mean_p, r.minus.mean_x, r.minus.mean_p) for r in records]
    )


def _closed_series(model: ModelKind, init: PairMoments, times, params) -> list[PairMoments]:
    return [propagate_moments(model, init, float(t), params) for t in times]


def _amplitudes_from_pair(pair: PairMoments, width_tol: float) -> tuple[complex, complex, float]:
    """Lab amplitudes reconstructed from normal-mode first moments, plus the
    worst width deviation of the two modes."""
    ep = displacement_from_moments(pair.plus, width_tol)
    em = displacement_from_moments(pair.minus, width_tol)
    alpha, beta = from_normal_modes(ep.amplitude, em.amplitude)
    return alpha, beta, max(ep.width_deviation, em.width_deviation)


def _grid_state_config(cfg: ExperimentConfig, state) -> GridSpec:
    if cfg.grid_half_extent is not None:
        return GridSpec(n=cfg.grid_points, half_extent=cfg.grid_half_extent)
    return auto_grid_spec(state, n=cfg.grid_points)


def run_swap(cfg: ExperimentConfig) -> ExperimentReport:
    """Evolve (alpha, beta) to the swap time under each requested model and
    compare every enabled method's trajectory against the closed forms."""
    params = cfg.dimensionless()
    if params.delta <= 0:
        raise ConfigError("params.delta: the swap experiment needs a positive coupling")
    tol = cfg.tolerances
    report = _report(cfg)
    T = swap_time(params)
    times = np.linspace(0.0, T, cfg.samples)
    alpha0, beta0 = complex(cfg.alpha), complex(cfg.beta)
    a0, b0 = to_normal_modes(alpha0, beta0)
    pair0 = coherent_pair_moments(a0, b0)
    amp_scale = max(abs(a0), abs(b0))

    moments_table = _add_table(
        report, "moments", ("t", "model", "method", "mode", "mean_x", "mean_p", "v_xx", "v_pp", "v_xp")
    )
    fidelity_table = _add_table(
        report,
        "fidelity",
        ("model", "method", "fidelity_raw", "fidelity_corrected", "deviation_from_target", "width_deviation"),
    )

    def add_moment_rows(model, method, ts, records):
        for t, r in zip(ts, records):
            for mode_name, m in (("plus", r.plus), ("minus", r.minus)):
                moments_table.rows.append(
                    (float(t), model.value, method, mode_name, m.mean_x, m.mean_p, m.v_xx, m.v_pp, m.v_xp)
                )

    def add_fidelity(model, method, pair_final, width_dev):
        target = (beta0, alpha0)
        raw = two_mode_overlap(pair_final, target)
        corrected_pair = phase_corrected_pair(pair_final, T, params)
        corrected = two_mode_overlap(corrected_pair, target)
        deviation = math.hypot(abs(corrected_pair[0] - target[0]), abs(corrected_pair[1] - target[1]))
        fidelity_table.rows.append((model.value, method, raw, corrected, deviation, width_dev))
        return corrected

    closed_means: dict[ModelKind, np.ndarray] = {}
    corrected_fid: dict[ModelKind, float] = {}

    grid_state = CoherentProduct(alpha0, beta0)
    icfg = cfg.integrator()

    for model in cfg.models:
        closed = _closed_series(model, pair0, times, params)
        closed_means[model] = _mean_array(closed)
        add_moment_rows(model, "closed", times, closed)
        alpha_T, beta_T, wdev = _amplitudes_from_pair(closed[-1], tol.width_flag_rel)
        corrected_fid[model] = add_fidelity(model, "closed", (alpha_T, beta_T), wdev)

        if model is ModelKind.SCEG:
            widths = np.array([(r.plus.v_xx, r.minus.v_xx) for r in closed])
            report.verdicts.append(
                _check(
                    "sceg_width_constancy_closed",
                    float(np.max(np.abs(widths - 0.5))),
                    "<=",
                    tol.width_closed,
                    "closed-form mean-field widths stay at the coherent value",
                )
            )

        if cfg.uses_ode():
            series = integrate_moments(model, pair0, T, params, icfg, n_samples=min(cfg.samples, 201))
            ref = _mean_array(_closed_series(model, pair0, series.times, params))
            err = float(np.max(np.abs(series.mean_table() - ref)))
            report.verdicts.append(
                _check(f"{model.value}_ode_mean_agreement", err, "<=", tol.ode_agreement)
            )
            add_moment_rows(model, "ode", series.times, series.records)
            alpha_T, beta_T, wdev = _amplitudes_from_pair(series.records[-1], tol.width_flag_rel)
            add_fidelity(model, "ode", (alpha_T, beta_T), wdev)

        if cfg.uses_grid():
            w0 = build_initial_grid(grid_state, _grid_state_config(cfg, grid_state))
            evo = split_step_evolve(
                w0, model, T, params, icfg, n_samples=min(cfg.samples, 51)
            )
            ref = _mean_array(_closed_series(model, pair0, evo.times, params))
            err = float(np.max(np.abs(_mean_array(evo.moments) - ref)))
            report.verdicts.append(
                _check(f"{model.value}_grid_mean_agreement", err, "<=", tol.grid_agreement)
            )
            if model is ModelKind.SCEG:
                widths = np.array([(r.plus.v_xx, r.minus.v_xx) for r in evo.moments])
                report.verdicts.append(
                    _check(
                        "sceg_width_constancy_grid",
                        float(np.max(np.abs(widths - 0.5))),
                        "<=",
                        tol.width_grid,
                    )
                )
            add_moment_rows(model, "grid", evo.times, evo.moments)
            alpha_T, beta_T, wdev = _amplitudes_from_pair(evo.moments[-1], tol.width_flag_rel)
            add_fidelity(model, "grid", (alpha_T, beta_T), wdev)
            report.notes.append(
                f"grid oracle [{model.value}]: max per-step norm drift {evo.max_step_norm_drift:.3e}, "
                f"max boundary fraction {evo.max_boundary_fraction:.3e}"
            )

    # corrected displacement trajectory with the exact-model width envelope
    d = params.delta
    if d < CORRECTED_DELTA_LIMIT:
        disp_table = _add_table(
            report,
            "displacement",
            (
                "t",
                "re_a",
                "im_a",
                "re_b",
                "im_b",
                "re_alpha",
                "im_alpha",
                "re_beta",
                "im_beta",
                "v_xx_plus",
                "v_xx_minus",
                "corr_mag_1",
                "corr_mag_2",
            ),
        )
        full_for_widths = _closed_series(ModelKind.QG_FULL, pair0, times, params)
        for t, full in zip(times, full_for_widths):
            c = propagate_corrected_displacement(a0, b0, float(t), params)
            disp_table.rows.append(
                (
                    float(t),
                    c.a_t.real,
                    c.a_t.imag,
                    c.b_t.real,
                    c.b_t.imag,
                    c.alpha_t.real,
                    c.alpha_t.imag,
                    c.beta_t.real,
                    c.beta_t.imag,
                    full.plus.v_xx,
                    full.minus.v_xx,
                    d * abs(c.corr_1),
                    d * abs(c.corr_2),
                )
            )
        c_T = propagate_corrected_displacement(a0, b0, T, params)
        report.notes.append(
            f"first-order correction magnitudes at the swap time: "
            f"|dA| = {d * abs(c_T.corr_1):.6e}, |dB| = {d * abs(c_T.corr_2):.6e}"
        )
    else:
        report.notes.append(
            f"first-order corrected displacement omitted: delta = {d:g} is outside "
            f"its validity range (< {CORRECTED_DELTA_LIMIT})"
        )

    if ModelKind.QG_RWA in cfg.models:
        report.verdicts.append(
            _check(
                "qg_rwa_phase_corrected_swap",
                corrected_fid[ModelKind.QG_RWA],
                ">=",
                1.0 - tol.swap_fidelity,
                "number-conserving model swaps exactly up to the carrier phase",
            )
        )
    if ModelKind.QG_FULL in cfg.models and ModelKind.SCEG in cfg.models:
        diff = float(np.max(np.abs(closed_means[ModelKind.QG_FULL] - closed_means[ModelKind.SCEG])))
        report.verdicts.append(
            _check(
                "first_moment_identity_full_vs_sceg",
                diff,
                "<=",
                tol.first_moment,
                "mean trajectories of the exact and mean-field models coincide",
            )
        )
    if ModelKind.SCEG in cfg.models:
        bound = math.exp(-((2.0 * d * amp_scale) ** 2)) - 1e-12
        report.verdicts.append(
            _check(
                "sceg_swap_fidelity_bound",
                corrected_fid[ModelKind.SCEG],
                ">=",
                bound,
                "mean-field swap fidelity within the first-order correction envelope",
            )
        )
    if ModelKind.QG_RWA in cfg.models and ModelKind.QG_FULL in cfg.models:
        diff_t = np.max(
            np.abs(closed_means[ModelKind.QG_RWA] - closed_means[ModelKind.QG_FULL]), axis=1
        )
        taus = times * params.omega
        budget = math.sqrt(2.0) * (abs(a0) + abs(b0)) * (1.5 * d + 1.5 * d * d * taus) + 1e-12
        excess = float(np.max(diff_t / budget))
        report.verdicts.append(
            _check(
                "rwa_vs_exact_mean_bound",
                excess,
                "<=",
                1.0,
                "RWA deviates from the exact model only within the first-order amplitude "
                "plus second-order secular phase budget",
            )
        )

    if cfg.random_pairs > 0:
        rng = np.random.default_rng(cfg.seed)
        rnd_table = _add_table(
            report, "random_swaps", ("index", "re_alpha", "im_alpha", "re_beta", "im_beta", "fidelity_corrected")
        )
        worst = 1.0
        for i in range(cfg.random_pairs):
            re_a, im_a, re_b, im_b = rng.uniform(-3.0, 3.0, size=4)
            al, be = complex(re_a, im_a), complex(re_b, im_b)
            final = propagate_rwa_lab_displacement(al, be, T, params)
            fid = two_mode_overlap(phase_corrected_pair(final, T, params), (be, al))
            worst = min(worst, fid)
            rnd_table.rows.append((i, re_a, im_a, re_b, im_b, fid))
        report.verdicts.append(
            _check("random_pair_swap_fidelity", worst, ">=", 1.0 - tol.swap_fidelity)
        )

    report.figures = [
        {
            "name": "normal_mode_means",
            "csv": "moments.csv",
            "x": "t",
            "y": ["mean_x", "mean_p"],
            "group_by": ["model", "method", "mode"],
            "xlabel": "t (1/omega)",
            "ylabel": "mean (oscillator units)",
            "title": "normal-mode first moments under each model and method",
        },
    ]
    if "displacement" in report.tables:
        report.figures.append(
            {
                "name": "correction_magnitudes",
                "csv": "displacement.csv",
                "x": "t",
                "y": ["corr_mag_1", "corr_mag_2"],
                "group_by": [],
                "xlabel": "t (1/omega)",
                "ylabel": "|delta corr|",
                "title": "first-order displacement corrections dropped by the RWA",
            }
        )
    return report


def run_rwa_validity(cfg: ExperimentConfig) -> ExperimentReport:
    """Map where the number-conserving truncation fails: the dropped
    correction grows as delta * amplitude, crossing one vacuum width near
    delta |alpha| ~ 1."""
    tol = cfg.tolerances
    report = _report(cfg)
    table = _add_table(
        report,
        "validity",
        ("delta", "alpha_mag", "delta_alpha", "max_deviation", "predicted", "ratio", "crossed"),
    )
    n_dense = max(cfg.samples, 20001)
    threshold = 1.0  # one oscillator unit of displacement: comparable to the state width

    for d in cfg.deltas:
        params = DimensionlessParams(delta=float(d), omega=cfg.omega)
        ratios = []
        scaling_mags = []
        for mag in cfg.alpha_mags:
            alpha = complex(mag)
            beta = complex(cfg.beta)
            a0, b0 = to_normal_modes(alpha, beta)
            tau = np.linspace(0.0, math.pi / d, n_dense)
            sp = np.sin(params.k_plus * tau)
            sm = np.sin(params.k_minus * tau)
            dev1 = d * np.abs(np.conj(a0) * sp - np.conj(b0) * sm) / math.sqrt(2.0)
            dev2 = d * np.abs(np.conj(a0) * sp + np.conj(b0) * sm) / math.sqrt(2.0)
            measured = float(max(dev1.max(), dev2.max()))
            # the two sine factors visit every sign corner over one relative
            # beat, so the envelope is max(|a -/+ b|)/sqrt(2) = max(|alpha|, |beta|)
            predicted = d * max(abs(alpha), abs(beta))
            ratio = measured / predicted
            if mag >= abs(beta):  # below this the envelope saturates at delta |beta|
                ratios.append(measured / mag)
                scaling_mags.append(mag)
            crossed = measured >= threshold
            table.rows.append((float(d), float(mag), float(d * mag), measured, predicted, ratio, int(crossed)))
            report.verdicts.append(
                _check(
                    f"deviation_law_delta_{d:g}_alpha_{mag:g}",
                    abs(ratio - 1.0),
                    "<=",
                    tol.deviation_law_rel,
                    "max deviation equals delta times the amplitude envelope",
                )
            )
            # crossing consistency, skipped in a 10% dead zone around the threshold
            if not 0.9 * threshold < measured < 1.1 * threshold:
                expect_crossed = d * mag * ratio >= threshold
                report.verdicts.append(
                    Verdict(
                        name=f"threshold_crossing_delta_{d:g}_alpha_{mag:g}",
                        passed=crossed == expect_crossed,
                        observed=float(measured),
                        threshold=threshold,
                        comparison=">=" if expect_crossed else "<=",
                        note="crossing point follows the delta*|alpha| law",
                    )
                )
        if len(ratios) >= 2:
            spread = (max(ratios) - min(ratios)) / max(ratios)
            report.verdicts.append(
                _check(
                    f"linear_scaling_delta_{d:g}",
                    spread,
                    "<=",
                    tol.linear_scaling_rel,
                    f"deviation grows linearly with |alpha| at fixed delta (|alpha| in {scaling_mags})",
                )
            )
    report.notes.append(
        f"significance threshold: deviation of {threshold:g} oscillator unit(s); "
        "the law max_deviation = delta * envelope puts the crossing at delta*|alpha| ~ 1"
    )
    report.figures = [
        {
            "name": "rwa_breakdown",
            "csv": "validity.csv",
            "x": "delta_alpha",
            "y": ["max_deviation", "predicted"],
            "group_by": ["delta"],
            "xlabel": "delta * |alpha|",
            "ylabel": "max lab-frame deviation",
            "title": "RWA deviation envelope vs coupling-amplitude product",
        }
    ]
    return report


def run_cat_state(cfg: ExperimentConfig) -> ExperimentReport:
    """Evolve a superposed-amplitude state against the vacuum partner under a
    quantum model and the mean-field model; the former entangles, the latter
    freezes (all first moments vanish, so the mean-field force is zero)."""
    if not cfg.uses_grid():
        raise ConfigError("run.oracle: the cat-state experiment needs the grid oracle (grid or all)")
    params = cfg.dimensionless()
    if params.delta <= 0:
        raise ConfigError("params.delta: the cat-state experiment needs a positive coupling")
    tol = cfg.tolerances
    report = _report(cfg)

    quantum = next((m for m in cfg.models if m in (ModelKind.QG_RWA, ModelKind.QG_FULL)), ModelKind.QG_RWA)
    t_final = swap_time(params) / 2.0  # quarter beat: maximally split branches
    state = CatProduct(cat_amp=complex(cfg.cat_alpha), partner=complex(cfg.beta))
    spec = _grid_state_config(cfg, state)
    icfg = cfg.integrator()
    n_samples = min(cfg.samples, 61)

    table = _add_table(
        report,
        "entropy",
        ("t", "model", "entropy", "entropy_oracle", "purity", "max_abs_first_moment"),
    )

    def oracle_entropy(t: float) -> float:
        # branch amplitudes of the superposition under the number-conserving model
        g = complex(cfg.cat_alpha)
        norm = math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(g) ** 2)))
        coeffs = [1.0 / norm, 1.0 / norm]
        branch1 = []
        branch2 = []
        for sign in (1.0, -1.0):
            al, be = propagate_rwa_lab_displacement(sign * g, complex(cfg.beta), t, params)
            branch1.append(al)
            branch2.append(be)
        entropy, _ = branch_schmidt_entropy(coeffs, branch1, branch2)
        return entropy

    results: dict[ModelKind, dict] = {}
    for model in (quantum, ModelKind.SCEG):
        w0 = build_initial_grid(state, spec)
        evo = split_step_evolve(
            w0, model, t_final, params, icfg, n_samples=n_samples, record_entropy=True
        )
        max_mean = np.max(np.abs(evo.lab_means), axis=1)
        oracle_vals = (
            [oracle_entropy(float(t)) for t in evo.times]
            if model is ModelKind.QG_RWA
            else [math.nan] * len(evo.times)
        )
        for t, s, o, p, mm in zip(evo.times, evo.entropies, oracle_vals, evo.purities, max_mean):
            table.rows.append((float(t), model.value, float(s), float(o), float(p), float(mm)))
        results[model] = {
            "entropies": evo.entropies,
            "oracle": oracle_vals,
            "purities": evo.purities,
            "max_mean": max_mean,
        }
        report.notes.append(
            f"grid [{model.value}]: max per-step norm drift {evo.max_step_norm_drift:.3e}, "
            f"max boundary fraction {evo.max_boundary_fraction:.3e}"
        )
        report.verdicts.append(
            _check(f"{model.value}_initial_product_entropy", float(evo.entropies[0]), "<=", tol.product_entropy_max)
        )

    q = results[quantum]
    report.verdicts.append(
        _check(f"{quantum.value}_final_entropy", float(q["entropies"][-1]), ">=", tol.entropy_min)
    )
    if quantum is ModelKind.QG_RWA:
        report.verdicts.append(
            _check(
                "entropy_matches_branch_oracle",
                float(abs(q["entropies"][-1] - q["oracle"][-1])),
                "<=",
                tol.entropy_oracle,
                "grid entropy vs exact two-branch Schmidt value",
            )
        )
    else:
        report.notes.append(
            "no closed-form entropy oracle for the exact quadratic model; entropy reported as-is"
        )
    s = results[ModelKind.SCEG]
    report.verdicts.append(
        _check("sceg_first_moments_frozen", float(np.max(s["max_mean"])), "<=", tol.sceg_mean_max,
               "zero means kill every mean-field interaction term")
    )
    report.verdicts.append(
        _check("sceg_purity", float(np.min(s["purities"])), ">=", 1.0 - tol.sceg_purity_defect)
    )
    report.notes.append(
        "entropy/purity thresholds are desk-scale choices; the tested claim is the qualitative "
        "separation between the entangling quantum models and the non-entangling mean-field model"
    )
    report.figures = [
        {
            "name": "entanglement_entropy",
            "csv": "entropy.csv",
            "x": "t",
            "y": ["entropy", "entropy_oracle"],
            "group_by": ["model"],
            "xlabel": "t (1/omega)",
            "ylabel": "entropy (nats)",
            "title": "entanglement growth: quantum vs mean-field",
        },
        {
            "name": "purity",
            "csv": "entropy.csv",
            "x": "t",
            "y": ["purity"],
            "group_by": ["model"],
            "xlabel": "t (1/omega)",
            "ylabel": "reduced-state purity",
            "title": "reduced-state purity",
        },
    ]
    return report


def run_feasibility(cfg: ExperimentConfig) -> ExperimentReport:
    """Tabulate the coupling ladder and swap time per platform; flag swap
    times beyond the practicality cutoff."""
    tol = cfg.tolerances
    report = _report(cfg)
    table = _add_table(
        report,
        "feasibility",
        (
            "platform",
            "mass_kg",
            "omega_rad_s",
            "separation_m",
            "lam",
            "omega_g",
            "delta",
            "swap_time_s",
            "oscillator_length_m",
            "displacement_scale_m",
            "impractical",
        ),
    )
    for platform in cfg.platforms:
        dp = platform.dimensionless()
        T = swap_time(dp)
        if platform.physical is not None:
            p = platform.physical
            osc_len = p.oscillator_length
            row = (
                platform.name,
                p.mass,
                p.omega,
                p.separation,
                p.lam,
                p.omega_g,
                dp.delta,
                T,
                osc_len,
                math.sqrt(2.0) * osc_len * abs(complex(cfg.alpha)),
                int(T > tol.impractical_swap_seconds),
            )
        else:
            row = (
                platform.name,
                math.nan,
                dp.omega,
                math.nan,
                math.nan,
                dp.omega_g,
                dp.delta,
                T,
                math.nan,
                math.nan,
                int(T > tol.impractical_swap_seconds),
            )
        table.rows.append(row)
        if platform.name == "ca40_ion":
            report.verdicts.append(
                _check("ca40_ion_omega_g_order_of_magnitude", abs(math.log10(dp.omega_g / 1e-12)), "<=", 1.0,
                       "exchange rate within one decade of 1e-12 Hz")
            )
            report.verdicts.append(
                _check("ca40_ion_swap_time_impractical", T, ">=", 1e10, "swap needs > 1e10 s")
            )
    report.notes.append(
        f"platforms with swap time > {tol.impractical_swap_seconds:g} s are flagged impractical"
    )
    return report


RUNNERS = {
    "swap": run_swap,
    "rwa_validity": run_rwa_validity,
    "cat_state": run_cat_state,
    "feasibility": run_feasibility,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[cfg.kind](cfg)
