"""Two-coordinate wavefunction oracle: split-operator evolution on a grid.

The state lives on an N x N lab-frame grid psi[i, j] = psi(x1_i, x2_j) in
oscillator units, with the FFT momentum grid p = 2 pi fftfreq(N, dx).  Every
model splits exactly into a position-diagonal and a momentum-diagonal factor
in the lab frame:

    QG_FULL   T = (p1^2 + p2^2)/2                 V = (x1^2 + x2^2)/2 + 2 d x1 x2
    QG_RWA    T = (p1^2 + p2^2)/2 + d p1 p2       V = (x1^2 + x2^2)/2 + d x1 x2
    SCEG      T = (p1^2 + p2^2)/2                 V = (x1^2 + x2^2)/2
                                                      + 2 d (<x2> x1 + <x1> x2)

with d the coupling ratio.  Evolution is symmetric (Strang) splitting,
kinetic half-steps around a full potential step; adjacent half-steps between
samples are merged, which is algebraically identical.  For the mean-field
model the means entering V are measured right before each potential step,
i.e. at the step midpoint, which keeps the scheme second order.

Norm is never renormalized during evolution; drift is tracked every step and
the run aborts if it exceeds the configured rate.  Probability reaching the
grid boundary also aborts (wrap-around would silently corrupt everything
after).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .analytic import ModelKind
from .moments_ode import IntegratorConfig
from .params import DimensionlessParams, ParameterError
from .states import ModeMoments, PairMoments, SQRT2

GROUND_SIGMA = math.sqrt(0.5)
GROUND_FWHM = 2.0 * math.sqrt(2.0 * math.log(2.0)) * GROUND_SIGMA
RESOLUTION_POINTS = 8.0  # grid points across one ground-state FWHM
FIT_FRACTION = 0.8  # state envelope must fit inside this fraction of the box
ENVELOPE_SIGMAS = 5.0


class GridError(RuntimeError):
    pass


class GridSizingError(GridError):
    pass


class EvolutionError(GridError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Square grid geometry: n points per axis over [-half_extent, half_extent)."""

    n: int = 256
    half_extent: float = 12.0

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and self.n >= 64 and (self.n & (self.n - 1)) == 0):
            raise GridSizingError(f"grid n must be a power of two >= 64, got {self.n!r}")
        if not (math.isfinite(self.half_extent) and self.half_extent > 0):
            raise GridSizingError(f"grid half_extent must be positive, got {self.half_extent!r}")
        if self.dx > GROUND_FWHM / RESOLUTION_POINTS:
            raise GridSizingError(
                f"dx = {self.dx:.4g} does not resolve the ground-state width "
                f"({RESOLUTION_POINTS:g} points per FWHM needs dx <= {GROUND_FWHM / RESOLUTION_POINTS:.4g}); "
                f"increase n to >= {_next_pow2(math.ceil(2 * self.half_extent * RESOLUTION_POINTS / GROUND_FWHM))}"
            )

    @property
    def dx(self) -> float:
        return 2.0 * self.half_extent / self.n

    def x_axis(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dx

    def p_axis(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def p_max(self) -> float:
        return math.pi / self.dx


class GridWavefunction:
    """Mutable grid state; `psi` is the complex amplitude array."""

    __slots__ = ("spec", "psi", "frame")

    def __init__(self, spec: GridSpec, psi: np.ndarray, frame: str = "lab"):
        if psi.shape != (spec.n, spec.n):
            raise GridError(f"amplitude shape {psi.shape} does not match spec n = {spec.n}")
        self.spec = spec
        self.psi = np.ascontiguousarray(psi, dtype=np.complex128)
        self.frame = frame

    def norm_squared(self) -> float:
        return float(np.vdot(self.psi, self.psi).real) * self.spec.dx**2

    def boundary_fraction(self, ring: int = 2) -> float:
        prob = np.abs(self.psi) ** 2
        total = prob.sum()
        if total == 0.0:
            return 0.0
        edge = prob[:ring, :].sum() + prob[-ring:, :].sum()
        edge += prob[ring:-ring, :ring].sum() + prob[ring:-ring, -ring:].sum()
        return float(edge / total)

    def copy(self) -> "GridWavefunction":
        return GridWavefunction(self.spec, self.psi.copy(), self.frame)


@dataclass(frozen=True)
class CoherentProduct:
    """Product of two coherent states |alpha>_1 |beta>_2."""

    alpha: complex
    beta: complex = 0j


@dataclass(frozen=True)
class CatProduct:
    """Even superposition (|g> + |-g>)/norm in oscillator 1, coherent partner
    in oscillator 2.  The normalization carries the overlap cross term
    exp(-2 |g|^2)."""

    cat_amp: complex
    partner: complex = 0j


InitialState = CoherentProduct | CatProduct


def _next_pow2(m: int) -> int:
    n = 64
    while n < m:
        n *= 2
    return n


def _envelope_displacement(state: InitialState) -> float:
    """Worst-case |<x>| on either axis over the swap dynamics: the exchanged
    amplitudes can pile into one oscillator, so the bound is sqrt(2) times the
    total amplitude budget."""
    if isinstance(state, CoherentProduct):
        budget = abs(state.alpha) + abs(state.beta)
    else:
        budget = abs(state.cat_amp) + abs(state.partner)
    return SQRT2 * budget


def auto_grid_spec(state: InitialState, n: int | None = None) -> GridSpec:
    """Grid sized for `state` plus swap dynamics: half extent 8 + 4 times the
    displacement envelope, n grown past the default 256 only if resolution or
    momentum range demand it."""
    env = _envelope_displacement(state)
    half_extent = 8.0 + 4.0 * env
    dx_resolution = GROUND_FWHM / RESOLUTION_POINTS
    dx_momentum = FIT_FRACTION * math.pi / (env + ENVELOPE_SIGMAS * GROUND_SIGMA)
    dx_needed = min(dx_resolution, dx_momentum)
    n_needed = _next_pow2(math.ceil(2.0 * half_extent / dx_needed))
    if n is None:
        n = max(256, n_needed)
    elif n < n_needed:
        raise GridSizingError(
            f"n = {n} cannot hold the requested displacements; need n >= {n_needed} "
            f"at half_extent = {half_extent:.4g}"
        )
    return GridSpec(n=n, half_extent=half_extent)


def _coherent_1d(x: np.ndarray, g: complex) -> np.ndarray:
    x0 = SQRT2 * g.real
    p0 = SQRT2 * g.imag
    return np.pi**-0.25 * np.exp(-0.5 * (x - x0) ** 2 + 1j * (p0 * x - 0.5 * x0 * p0))


def _check_fit(spec: GridSpec, state: InitialState) -> None:
    env = _envelope_displacement(state)
    reach = env + ENVELOPE_SIGMAS * GROUND_SIGMA
    if reach > FIT_FRACTION * spec.half_extent:
        raise GridSizingError(
            f"displacement envelope {env:.4g} does not fit the grid "
            f"(need half_extent >= {reach / FIT_FRACTION:.4g}, have {spec.half_extent:.4g})"
        )
    if reach > FIT_FRACTION * spec.p_max:
        raise GridSizingError(
            f"momentum envelope {env:.4g} does not fit the momentum grid "
            f"(need p_max >= {reach / FIT_FRACTION:.4g}, have {spec.p_max:.4g}); decrease dx"
        )


def build_initial_grid(state: InitialState, spec: GridSpec | None = None) -> GridWavefunction:
    """Discretize a coherent product or a cat-state product; the result is
    normalized on the grid (discretization defect is checked first)."""
    if spec is None:
        spec = auto_grid_spec(state)
    _check_fit(spec, state)
    x = spec.x_axis()
    if isinstance(state, CoherentProduct):
        one = _coherent_1d(x, complex(state.alpha))
        two = _coherent_1d(x, complex(state.beta))
    elif isinstance(state, CatProduct):
        g = complex(state.cat_amp)
        one = _coherent_1d(x, g) + _coherent_1d(x, -g)
        two = _coherent_1d(x, complex(state.partner))
    else:
        raise ParameterError(f"unknown initial state {state!r}")
    psi = np.outer(one, two)
    w = GridWavefunction(spec, psi)
    n2 = w.norm_squared()
    if isinstance(state, CatProduct):
        # analytic norm of the unnormalized branch sum, cross term included
        expected = 2.0 * (1.0 + math.exp(-2.0 * abs(complex(state.cat_amp)) ** 2))
        defect = abs(n2 / expected - 1.0)
    else:
        defect = abs(n2 - 1.0)
    if defect > 1e-8:
        raise GridSizingError(f"discretized state norm off by {defect:.3e}; grid too small or too coarse")
    w.psi /= math.sqrt(n2)
    return w


def _marginal_means(psi: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    prob = psi.real**2 + psi.imag**2
    m1 = prob.sum(axis=1)
    m2 = prob.sum(axis=0)
    total = m1.sum()
    return float((x * m1).sum() / total), float((x * m2).sum() / total)


def _axis_stats(prob: np.ndarray, coord: np.ndarray) -> tuple[float, float, float, float, float]:
    """means, variances and covariance of the two axes of a 2-D density."""
    total = prob.sum()
    m1 = prob.sum(axis=1)
    m2 = prob.sum(axis=0)
    mean1 = float((coord * m1).sum() / total)
    mean2 = float((coord * m2).sum() / total)
    var1 = float((coord**2 * m1).sum() / total) - mean1**2
    var2 = float((coord**2 * m2).sum() / total) - mean2**2
    cross = float(coord @ prob @ coord / total) - mean1 * mean2
    return mean1, mean2, var1, var2, cross


def _momentum_prob(w: GridWavefunction) -> np.ndarray:
    phi = sfft.fft2(w.psi, workers=1)
    return phi.real**2 + phi.imag**2


def _apply_p(w: GridWavefunction, axis: int) -> np.ndarray:
    """Spectral application of the momentum operator along one axis."""
    p = w.spec.p_axis()
    shape = (-1, 1) if axis == 0 else (1, -1)
    return sfft.ifft(sfft.fft(w.psi, axis=axis, workers=1) * p.reshape(shape), axis=axis, workers=1)


@dataclass(frozen=True)
class LabMoments:
    mean_x1: float
    mean_p1: float
    mean_x2: float
    mean_p2: float
    v_x1: float
    v_x2: float
    cov_x1x2: float


def lab_means_from_grid(w: GridWavefunction) -> tuple[float, float, float, float]:
    x = w.spec.x_axis()
    prob = w.psi.real**2 + w.psi.imag**2
    mx1, mx2, *_ = _axis_stats(prob, x)
    pp = _momentum_prob(w)
    mp1, mp2, *_ = _axis_stats(pp, w.spec.p_axis())
    return (mx1, mp1, mx2, mp2)


def lab_moments_from_grid(w: GridWavefunction) -> LabMoments:
    x = w.spec.x_axis()
    prob = w.psi.real**2 + w.psi.imag**2
    mx1, mx2, vx1, vx2, cx = _axis_stats(prob, x)
    pp = _momentum_prob(w)
    mp1, mp2, *_ = _axis_stats(pp, w.spec.p_axis())
    return LabMoments(mx1, mp1, mx2, mp2, vx1, vx2, cx)


def moments_from_grid(w: GridWavefunction) -> PairMoments:
    """Quadrature moments of the normal modes.

    Position moments come from grid summation, momentum moments from the
    discrete Fourier image, and the mixed covariances from spectral
    application of each momentum operator (the i = j entry is the symmetrized
    product; the cross entries commute)."""
    spec = w.spec
    x = spec.x_axis()
    prob = w.psi.real**2 + w.psi.imag**2
    total = prob.sum()
    mx1, mx2, vx1, vx2, cxx = _axis_stats(prob, x)

    pp = _momentum_prob(w)
    p = spec.p_axis()
    mp1, mp2, vp1, vp2, cpp = _axis_stats(pp, p)

    # cov(x_i, p_j), symmetrized where operators share an axis
    cxp = np.empty((2, 2))
    means_x = (mx1, mx2)
    means_p = (mp1, mp2)
    for j in range(2):
        pj_psi = _apply_p(w, axis=j)
        prod = (w.psi.conj() * pj_psi).real
        for i in range(2):
            xi = x.reshape((-1, 1)) if i == 0 else x.reshape((1, -1))
            cxp[i, j] = float((xi * prod).sum() / total) - means_x[i] * means_p[j]

    def mode(sign: float) -> ModeMoments:
        return ModeMoments(
            mean_x=(mx1 + sign * mx2) / SQRT2,
            mean_p=(mp1 + sign * mp2) / SQRT2,
            v_xx=0.5 * (vx1 + vx2) + sign * cxx,
            v_pp=0.5 * (vp1 + vp2) + sign * cpp,
            v_xp=0.5 * (cxp[0, 0] + cxp[1, 1] + sign * (cxp[0, 1] + cxp[1, 0])),
        )

    return PairMoments(plus=mode(+1.0), minus=mode(-1.0))


@dataclass(frozen=True)
class SchmidtResult:
    entropy: float
    purity: float
    coefficients: np.ndarray


def schmidt_entropy(w: GridWavefunction) -> SchmidtResult:
    """Entanglement entropy (nats) between the two lab oscillators from the
    singular values of the amplitude matrix."""
    if w.frame != "lab":
        raise GridError("Schmidt split is between lab oscillators; state must be in the lab frame")
    svals = np.linalg.svd(w.psi * w.spec.dx, compute_uv=False)
    probs = svals**2
    probs = probs / probs.sum()
    nz = probs[probs > 1e-18]
    entropy = float(-np.sum(nz * np.log(nz)))
    purity = float(np.sum(probs**2))
    return SchmidtResult(entropy=entropy, purity=purity, coefficients=probs)


def grid_overlap(w: GridWavefunction, v: GridWavefunction) -> complex:
    """Inner product <w|v> by grid quadrature."""
    if w.spec != v.spec:
        raise GridError(f"grid mismatch: {w.spec} vs {v.spec}")
    if w.frame != v.frame:
        raise GridError("cannot overlap states in different frames")
    return complex(np.vdot(w.psi, v.psi)) * w.spec.dx**2


SNAPSHOT_FORMAT = 1
_SNAPSHOT_MAGIC = "gravswap-grid-snapshot"


def save_snapshot(w: GridWavefunction, path, time: float = 0.0) -> None:
    """Dump a grid state: text header (format version, n, half_extent, frame,
    time) terminated by a blank line, then the raw complex128 amplitudes in
    little-endian C order."""
    header = (
        f"{_SNAPSHOT_MAGIC} v{SNAPSHOT_FORMAT}\n"
        f"n = {w.spec.n}\n"
        f"half_extent = {w.spec.half_extent!r}\n"
        f"frame = {w.frame}\n"
        f"time = {float(time)!r}\n"
        "\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(w.psi, dtype="<c16").tobytes())


def load_snapshot(path) -> tuple[GridWavefunction, float]:
    """Inverse of save_snapshot; returns (state, time)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    sep = raw.find(b"\n\n")
    if sep < 0:
        raise GridError(f"{path}: missing snapshot header terminator")
    lines = raw[:sep].decode("ascii").splitlines()
    if not lines or not lines[0].startswith(_SNAPSHOT_MAGIC):
        raise GridError(f"{path}: not a grid snapshot")
    version = lines[0].rsplit("v", 1)[1]
    if int(version) != SNAPSHOT_FORMAT:
        raise GridError(f"{path}: unsupported snapshot format v{version}")
    fields = dict(line.split(" = ", 1) for line in lines[1:])
    spec = GridSpec(n=int(fields["n"]), half_extent=float(fields["half_extent"]))
    psi = np.frombuffer(raw[sep + 2 :], dtype="<c16").reshape((spec.n, spec.n)).copy()
    return GridWavefunction(spec, psi, fields["frame"]), float(fields["time"])


def _kinetic_exponent(model: ModelKind, spec: GridSpec, params: DimensionlessParams) -> np.ndarray:
    p = spec.p_axis()
    p1 = p.reshape((-1, 1))
    p2 = p.reshape((1, -1))
    t = 0.5 * (p1**2 + p2**2)
    if model is ModelKind.QG_RWA:
        t = t + params.delta * p1 * p2
    return t


def _potential_exponent(model: ModelKind, spec: GridSpec, params: DimensionlessParams) -> np.ndarray:
    x = spec.x_axis()
    x1 = x.reshape((-1, 1))
    x2 = x.reshape((1, -1))
    v = 0.5 * (x1**2 + x2**2)
    if model is ModelKind.QG_FULL:
        v = v + 2.0 * params.delta * x1 * x2
    elif model is ModelKind.QG_RWA:
        v = v + params.delta * x1 * x2
    return v


@dataclass
class GridEvolution:
    """Sampled observables of one split-operator run."""

    model: ModelKind
    times: np.ndarray
    moments: list[PairMoments]
    lab_means: np.ndarray  # (n, 4): x1, p1, x2, p2
    norms: np.ndarray
    entropies: np.ndarray | None
    purities: np.ndarray | None
    max_step_norm_drift: float
    max_boundary_fraction: float
    final: GridWavefunction
    snapshots: list[tuple[float, GridWavefunction]] = field(default_factory=list)


def split_step_evolve(
    w: GridWavefunction,
    model: ModelKind,
    t_final: float,
    params: DimensionlessParams,
    cfg: IntegratorConfig | None = None,
    *,
    n_samples: int = 50,
    record_entropy: bool = False,
    keep_snapshots: bool = False,
) -> GridEvolution:
    """Strang-split evolution of `w` (not mutated) under `model`.

    Observables are recorded at ~n_samples step boundaries including both
    endpoints.  Aborts (EvolutionError) on norm drift beyond
    cfg.norm_drift_limit per unit scaled time or on boundary probability
    beyond cfg.leakage_limit.
    """
    cfg = cfg or IntegratorConfig()
    if t_final < 0:
        raise ParameterError("t_final must be non-negative")
    spec = w.spec
    tau_final = t_final * params.omega
    x = spec.x_axis()
    delta = params.delta

    psi = w.psi.copy()
    workers = cfg.workers

    def kinetic(a, phase):
        # full momentum-space round trip; buffers may be reused by the FFT
        b = sfft.fft2(a, workers=workers, overwrite_x=True)
        b *= phase
        return sfft.ifft2(b, workers=workers, overwrite_x=True)

    times: list[float] = []
    moments: list[PairMoments] = []
    lab_means: list[tuple[float, float, float, float]] = []
    norms: list[float] = []
    entropies: list[float] = []
    purities: list[float] = []
    snapshots: list[tuple[float, GridWavefunction]] = []
    state = {"max_drift": 0.0, "max_boundary": 0.0, "last_norm": None}

    def record(tau: float) -> None:
        cur = GridWavefunction(spec, psi, w.frame)
        n2 = cur.norm_squared()
        if abs(n2 - 1.0) > cfg.norm_drift_limit * max(tau, 1.0):
            raise EvolutionError(
                f"norm drift |{n2 - 1.0:.3e}| exceeds {cfg.norm_drift_limit:.1e} per unit time at t = {tau!r}"
            )
        frac = cur.boundary_fraction()
        if frac > cfg.leakage_limit:
            raise EvolutionError(
                f"boundary probability {frac:.3e} exceeds leakage limit {cfg.leakage_limit:.1e} at t = {tau!r}"
            )
        state["max_boundary"] = max(state["max_boundary"], frac)
        t_phys = tau / params.omega
        times.append(t_phys)
        norms.append(n2)
        moments.append(moments_from_grid(cur))
        lab_means.append(lab_means_from_grid(cur))
        if record_entropy:
            sr = schmidt_entropy(cur)
            entropies.append(sr.entropy)
            purities.append(sr.purity)
        if keep_snapshots:
            snapshots.append((t_phys, cur.copy()))

    def track_norm() -> None:
        n2 = float(np.vdot(psi, psi).real) * spec.dx**2
        last = state["last_norm"]
        if last is not None:
            state["max_drift"] = max(state["max_drift"], abs(n2 - last))
        state["last_norm"] = n2

    track_norm()
    record(0.0)

    if tau_final > 0.0:
        dtau = cfg.grid_step(params)
        steps = max(1, math.ceil(tau_final / dtau))
        dtau = tau_final / steps

        kin = _kinetic_exponent(model, spec, params)
        kin_half = np.exp(-0.5j * dtau * kin)
        kin_full = np.exp(-1j * dtau * kin)
        del kin
        pot_phase = None
        if model is not ModelKind.SCEG:
            pot_phase = np.exp(-1j * dtau * _potential_exponent(model, spec, params))
        else:
            pot_base = np.exp(-1j * dtau * _potential_exponent(model, spec, params))

        n_samples = max(2, n_samples)
        bounds = np.unique(np.round(np.linspace(0, steps, min(n_samples, steps + 1))).astype(int))
        for i0, i1 in zip(bounds[:-1], bounds[1:]):
            chunk = int(i1 - i0)
            psi = kinetic(psi, kin_half)
            for j in range(chunk):
                if model is ModelKind.SCEG:
                    mean1, mean2 = _marginal_means(psi, x)
                    psi *= pot_base
                    psi *= np.exp(-2j * dtau * delta * mean2 * x).reshape((-1, 1))
                    psi *= np.exp(-2j * dtau * delta * mean1 * x).reshape((1, -1))
                else:
                    psi *= pot_phase
                if j < chunk - 1:
                    psi = kinetic(psi, kin_full)
                track_norm()
            psi = kinetic(psi, kin_half)
            record(float(i1) * dtau)

    return GridEvolution(
        model=model,
        times=np.array(times),
        moments=moments,
        lab_means=np.array(lab_means),
        norms=np.array(norms),
        entropies=np.array(entropies) if record_entropy else None,
        purities=np.array(purities) if record_entropy else None,
        max_step_norm_drift=state["max_drift"],
        max_boundary_fraction=state["max_boundary"],
        final=GridWavefunction(spec, psi, w.frame),
        snapshots=snapshots,
    )
