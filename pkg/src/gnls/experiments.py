"""Fast-soliton scattering experiments, parameter sweeps, and the
verification suites behind the command line's verify subcommand.

A scattering run sends a cut-off soliton down one edge, lets it cross the
vertex, and measures how well the solution matches the linear-scattering
prediction in three windows: against the exact through-going soliton
before the crossing (e1), against the coefficient-weighted outgoing
solitons right after it (e2), and against the nonlinearly-evolved channel
bundle across the observation window (e3).  Per-edge mass ratios are
compared with the moduli of the scattering coefficients.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .graph import (
    CouplingKind,
    GraphField,
    GridSpec,
    InvalidParameterError,
    VertexCoupling,
    edge_masses,
    energy,
    lp_norm,
    mass,
)
from .linops import (
    NumericFailureError,
    RescaledCoefficients,
    apply_linear_propagator,
    coupling_for_rescaled,
    dispersive_decay_probe,
    fit_loglog_slope,
    kernel_identity_check,
    rescaled_coefficients,
    scattering_coefficients,
)
from .evolution import EvolveConfig, TruncationViolationError, crank_nicolson_step, evolve
from .reference import (
    incoming_reference,
    initial_datum,
    moving_soliton,
    outgoing_part,
    outgoing_reference_bundle,
    phase_schedule,
    smooth_ramp,
    superposition_reference,
    advance_bundle,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "SweepRow",
    "SweepResult",
    "CheckResult",
    "run_scattering_experiment",
    "run_sweep",
    "verify",
    "normalize_coupling_spec",
    "gaussian_packet",
    "compact_bump",
    "propagator_contracts",
    "cross_scheme_study",
    "conservation_study",
    "line_soliton_fidelity",
    "dispersive_decay_study",
    "SUITE_NAMES",
]


def _norm_diff(a: GraphField, b: GraphField) -> float:
    return lp_norm(a - b, 2)


def normalize_coupling_spec(spec) -> tuple[CouplingKind, float]:
    """Accept 'kirchhoff', 'delta:0.5', ('delta', 0.5), or (kind, tilde)."""
    if isinstance(spec, str):
        name, _, rest = spec.partition(":")
        kind = CouplingKind(name.strip())
        tilde = float(rest) if rest else (0.0 if kind == CouplingKind.KIRCHHOFF else 1.0)
        return kind, tilde
    kind, tilde = spec
    return CouplingKind(kind), float(tilde)


@dataclass(frozen=True)
class ExperimentConfig:
    """One scattering run: coupling, kinematics, grid, and output knobs.

    Unset grid values fall back to resolution rules tied to the velocity:
    dx keeps the carrier wavenumber v/2 well under the grid Nyquist and dt
    resolves the carrier's temporal phase.  x0 defaults to the closest
    admissible launch point v^(1-delta).

    far_end_threshold guards the domain truncation.  It is loose by
    default because the scattered pulses are not exact solitons: they
    reshape and shed dispersive radiation whose fast spectral tail
    (amplitude ~1e-2, mass ~1e-4) outruns any affordable margin and piles
    softly on the wall before the final measurement time.  That tail
    shifts the measured ratios and errors at the 1e-4 level, far below
    their tolerances, while a soliton body reaching the wall carries
    mass O(1) and trips the default threshold instantly.
    """

    kind: CouplingKind = CouplingKind.KIRCHHOFF
    tilde: float = 0.0
    v: float = 16.0
    delta: float = 0.4
    log_time_factor: float = 0.6
    x0: float | None = None
    dx: float | None = None
    dt: float | None = None
    edge_length: float | None = None
    edge_margin: float = 24.0
    scheme: str = "split_step_exact"
    incoming_edge: int = 1
    n_snapshots: int = 8
    far_end_threshold: float = 1e-3
    check_interval: int = 200
    label: str = ""

    def __post_init__(self):
        if self.incoming_edge not in (1, 2, 3):
            raise InvalidParameterError(f"incoming_edge must be 1, 2 or 3, got {self.incoming_edge}")
        if self.n_snapshots < 2:
            raise InvalidParameterError("n_snapshots must be at least 2")

    @property
    def resolved_x0(self) -> float:
        return self.v ** (1.0 - self.delta) if self.x0 is None else self.x0

    @property
    def resolved_dx(self) -> float:
        if self.dx is not None:
            return self.dx
        return min(0.05, np.pi / (4.0 * self.v))

    @property
    def resolved_dt(self) -> float:
        if self.dt is not None:
            return self.dt
        return self.resolved_dx / max(4.0, self.v)

    def schedule(self):
        return phase_schedule(self.resolved_x0, self.v, self.delta, self.log_time_factor)

    def resolved_length(self) -> float:
        if self.edge_length is not None:
            return self.edge_length
        sched = self.schedule()
        reach = self.v * (sched.t3 - sched.crossing_time)
        return max(self.resolved_x0, reach) + self.edge_margin

    def grid(self) -> GridSpec:
        return GridSpec.from_length(self.resolved_dx, self.resolved_length())

    def coupling(self) -> VertexCoupling:
        return coupling_for_rescaled(self.kind, self.tilde, self.v)

    def coefficients(self) -> RescaledCoefficients:
        return rescaled_coefficients(self.kind, self.tilde, self.v)

    def coupling_label(self) -> str:
        if self.kind == CouplingKind.KIRCHHOFF:
            return "kirchhoff"
        return f"{self.kind.value}:{self.tilde:g}"


@dataclass
class ExperimentReport:
    """Measured outcome of one scattering run; all norms are L2 on the graph."""

    label: str
    coupling_label: str
    kind: str
    tilde: float
    v: float
    delta: float
    log_time_factor: float
    x0: float
    dx: float
    dt: float
    edge_length: float
    n_points: int
    scheme: str
    incoming_edge: int
    t1: float
    t2: float
    t3: float
    e1: float
    e2_out: float
    e2_sup: float
    snapshot_times: list
    e3: list
    sup_e3: float
    ratio_time: float
    ratios: tuple
    ratio_targets: tuple
    ratio_errors: tuple
    max_ratio_error: float
    ratios_at_snapshots: list
    mass_initial: float
    mass_drift: float
    energy_initial: float
    energy_drift: float
    far_end_max: float
    runtime_seconds: float

    def to_dict(self) -> dict:
        def cast(value):
            if isinstance(value, (np.floating, np.integer)):
                return value.item()
            if isinstance(value, (list, tuple)):
                return [cast(item) for item in value]
            return value

        return {key: cast(value) for key, value in self.__dict__.items()}


def _rotate(field: GraphField, shift: int) -> GraphField:
    if shift % 3 == 0:
        return field
    return GraphField(field.grid, np.roll(field.edges, shift, axis=0))


def _snapshot_times(schedule, dt: float, n_snapshots: int) -> tuple[list[float], float]:
    window = schedule.t3 - schedule.t2
    lo = max(8.0 * dt, window / 50.0)
    rel = np.geomspace(lo, window, n_snapshots)
    times = [schedule.t2 + r for r in rel]
    ratio_time = min(schedule.t2 + 1.0, schedule.t3)
    times.append(ratio_time)
    times.sort()
    merged: list[float] = []
    for s in times:
        if not merged or s - merged[-1] > 4.0 * dt:
            merged.append(s)
        elif abs(s - ratio_time) < 1e-12:
            merged[-1] = s
    return merged, ratio_time


def run_scattering_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run one cut-off-soliton scattering experiment and measure it.

    The initial state is evolved through the phase schedule; comparisons
    are evaluated with the solution rotated so the incoming edge is edge 1,
    which makes reports directly comparable across incoming_edge choices.
    """
    t_begin = time.perf_counter()
    grid = config.grid()
    sched = config.schedule()
    coupling = config.coupling()
    coeffs = config.coefficients()
    x0, v = config.resolved_x0, config.v
    dt = config.resolved_dt

    rot = config.incoming_edge - 1
    state = _rotate(initial_datum(grid, x0, v, config.delta), rot)
    evolve_cfg = EvolveConfig(
        dt=dt,
        coupling=coupling,
        scheme=config.scheme,
        check_interval=config.check_interval,
        far_end_threshold=config.far_end_threshold,
    )

    mass0 = mass(state)
    energy0 = energy(state, coupling)
    far_end_max = 0.0

    def advance_graph(current: GraphField, t_from: float, t_to: float) -> GraphField:
        nonlocal far_end_max
        final, trace = evolve(current, (t_from, t_to), evolve_cfg)
        far_end_max = max(far_end_max, float(np.max(trace.far_end)))
        return final

    state = advance_graph(state, 0.0, sched.t1)
    e1 = _norm_diff(_rotate(state, -rot), incoming_reference(grid, x0, v, sched.t1))

    state = advance_graph(state, sched.t1, sched.t2)
    probe = _rotate(state, -rot)
    e2_out = _norm_diff(probe, outgoing_part(grid, x0, v, coeffs, sched.t2))
    e2_sup = _norm_diff(probe, superposition_reference(grid, x0, v, coeffs, sched.t2))

    bundle = outgoing_reference_bundle(grid, sched, coeffs)
    times, ratio_time = _snapshot_times(sched, dt, config.n_snapshots)
    e3: list[float] = []
    ratios_at: list[tuple] = []
    ratios_at_ratio_time = None
    t_prev = sched.t2
    for s in times:
        state = advance_graph(state, t_prev, s)
        bundle = advance_bundle(bundle, s, dt)
        probe = _rotate(state, -rot)
        e3.append(_norm_diff(probe, bundle.total()))
        m_edges = edge_masses(probe)
        r = tuple(np.sqrt(m_edges / m_edges.sum()))
        ratios_at.append(r)
        if abs(s - ratio_time) < 1e-9:
            ratios_at_ratio_time = r
        t_prev = s
    if ratios_at_ratio_time is None:
        ratios_at_ratio_time = ratios_at[-1]

    targets = (abs(coeffs.r), abs(coeffs.t), abs(coeffs.t))
    ratio_errors = tuple(abs(m - g) for m, g in zip(ratios_at_ratio_time, targets))
    mass_final = mass(state)
    energy_final = energy(state, coupling)

    return ExperimentReport(
        label=config.label,
        coupling_label=config.coupling_label(),
        kind=config.kind.value,
        tilde=config.tilde,
        v=v,
        delta=config.delta,
        log_time_factor=config.log_time_factor,
        x0=x0,
        dx=grid.dx,
        dt=dt,
        edge_length=grid.length,
        n_points=grid.n_points,
        scheme=config.scheme,
        incoming_edge=config.incoming_edge,
        t1=sched.t1,
        t2=sched.t2,
        t3=sched.t3,
        e1=e1,
        e2_out=e2_out,
        e2_sup=e2_sup,
        snapshot_times=list(times),
        e3=e3,
        sup_e3=float(np.max(e3)),
        ratio_time=ratio_time,
        ratios=ratios_at_ratio_time,
        ratio_targets=targets,
        ratio_errors=ratio_errors,
        max_ratio_error=float(np.max(ratio_errors)),
        ratios_at_snapshots=ratios_at,
        mass_initial=mass0,
        mass_drift=abs(mass_final - mass0) / mass0,
        energy_initial=energy0,
        energy_drift=abs(energy_final - energy0) / max(abs(energy0), 1e-30),
        far_end_max=far_end_max,
        runtime_seconds=time.perf_counter() - t_begin,
    )


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    v: float
    coupling_label: str
    kind: str
    tilde: float
    status: str
    message: str = ""
    report: ExperimentReport | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


_CSV_COLUMNS = (
    "v,coupling,tilde,status,e1,e2_out,e2_sup,sup_e3,"
    "ratio1,ratio2,ratio3,ratio_err1,ratio_err2,ratio_err3,"
    "mass_drift,energy_drift,far_end_max,runtime_s,message"
)


@dataclass
class SweepResult:
    rows: list
    slopes: dict

    def to_csv(self, path) -> None:
        lines = [_CSV_COLUMNS]
        for row in self.rows:
            if row.ok:
                r = row.report
                cells = [
                    f"{row.v:g}", row.coupling_label, f"{row.tilde:g}", row.status,
                    f"{r.e1:.9e}", f"{r.e2_out:.9e}", f"{r.e2_sup:.9e}", f"{r.sup_e3:.9e}",
                    f"{r.ratios[0]:.9e}", f"{r.ratios[1]:.9e}", f"{r.ratios[2]:.9e}",
                    f"{r.ratio_errors[0]:.9e}", f"{r.ratio_errors[1]:.9e}", f"{r.ratio_errors[2]:.9e}",
                    f"{r.mass_drift:.3e}", f"{r.energy_drift:.3e}", f"{r.far_end_max:.3e}",
                    f"{r.runtime_seconds:.2f}", "",
                ]
            else:
                cells = [f"{row.v:g}", row.coupling_label, f"{row.tilde:g}", row.status]
                cells += [""] * 14 + [row.message.replace(",", ";")]
            lines.append(",".join(cells))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def rows_for(self, coupling_label: str) -> list:
        return [row for row in self.rows if row.coupling_label == coupling_label and row.ok]


def run_sweep(base: ExperimentConfig, v_list, couplings, workers: int = 1) -> SweepResult:
    """Run the velocity sweep for each requested coupling.

    Failed members (truncation breach, numeric failure, bad parameters) are
    recorded as failed rows without stopping the sweep.  Fitted log-log
    slopes of the error metrics against v are attached per coupling.
    """
    v_list = [float(v) for v in v_list]
    if len(v_list) < 3:
        raise InvalidParameterError("sweep needs at least three velocities")
    if any(b <= a for a, b in zip(v_list, v_list[1:])):
        raise InvalidParameterError("sweep velocities must be strictly increasing")
    specs = [normalize_coupling_spec(c) for c in couplings]

    def member(kind: CouplingKind, tilde: float, v: float) -> SweepRow:
        cfg = replace(base, kind=kind, tilde=tilde, v=v)
        label = cfg.coupling_label()
        try:
            report = run_scattering_experiment(cfg)
            return SweepRow(v, label, kind.value, tilde, "ok", report=report)
        except (TruncationViolationError, NumericFailureError, InvalidParameterError) as exc:
            return SweepRow(v, label, kind.value, tilde, "failed", message=str(exc))

    jobs = [(kind, tilde, v) for kind, tilde in specs for v in v_list]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda job: member(*job), jobs))
    else:
        rows = [member(*job) for job in jobs]

    slopes: dict[str, dict] = {}
    for kind, tilde in specs:
        label = f"{kind.value}:{tilde:g}" if kind != CouplingKind.KIRCHHOFF else "kirchhoff"
        good = [row for row in rows if row.coupling_label == label and row.ok]
        entry: dict = {"n_ok": len(good)}
        if len(good) >= 3:
            vs = np.array([row.v for row in good])
            entry["e1_slope"] = _safe_slope(vs, [row.report.e1 for row in good])
            entry["e2_slope"] = _safe_slope(vs, [row.report.e2_out for row in good])
            entry["sup_e3_slope"] = _safe_slope(vs, [row.report.sup_e3 for row in good])
            errs = [row.report.max_ratio_error for row in good]
            entry["ratio_error_slope"] = _safe_slope(vs, errs)
            entry["ratio_error_decreasing"] = bool(np.all(np.diff(errs) < 0.0))
        slopes[label] = entry
    return SweepResult(rows=rows, slopes=slopes)


def _safe_slope(vs, errors) -> float:
    errors = np.asarray(errors, dtype=np.float64)
    if np.any(errors <= 0.0) or np.any(~np.isfinite(errors)):
        return float("nan")
    return fit_loglog_slope(np.asarray(vs), errors)


# ---------------------------------------------------------------------------
# reusable study helpers (shared by the verify suites and by tests)


def gaussian_packet(
    grid: GridSpec,
    center: float = 12.0,
    width: float = 2.0,
    wavenumber: float = 5.0,
    amplitudes=(1.0, 0.6, 0.3 + 0.2j),
) -> GraphField:
    """Inward-moving Gaussian wave packet with distinct per-edge amplitudes."""
    x = grid.x
    envelope = np.exp(-((x - center) ** 2) / (2.0 * width**2)) * np.exp(-1j * wavenumber * x)
    a1, a2, a3 = amplitudes
    return GraphField.from_edges(grid, a1 * envelope, a2 * envelope, a3 * envelope)


def compact_bump(
    grid: GridSpec, center: float = 4.0, half_width: float = 2.5, carrier: float = 0.0
) -> GraphField:
    """Smooth compactly supported bump on edge 1 (zero at the vertex).

    A positive carrier moves the bump toward the vertex at group speed
    2*carrier, so it scatters early and the remainder disperses freely.
    """
    x = grid.x
    u = (x - center) / half_width
    inside = np.abs(u) < 1.0
    values = np.zeros_like(x)
    values[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    field = GraphField.zeros(grid)
    field.edges[0] = values * np.exp(-1j * carrier * x)
    return field


def propagator_contracts(
    coupling: VertexCoupling,
    dx: float = 0.02,
    length: float = 40.0,
    t_a: float = 0.2,
    t_b: float = 2.8,
) -> dict:
    """Defect measurements for the exact linear propagator on a Gaussian
    packet: semigroup composition, time reversal, and mass conservation.

    A delta or delta-prime state carries a genuine derivative jump at the
    vertex whenever the field amplitude there is nonzero.  Sampling such a
    state on the grid and handing it back to the propagator loses the part
    of the jump's spectrum above the Nyquist wavenumber, an O(dx^{3/2})
    splice error that has nothing to do with the propagator itself (one
    application from smooth data is spectrally exact).  The defaults
    therefore place the composition splice and the reversal endpoint at
    vertex-quiet instants: at t_a the packet body is still several widths
    short of the vertex, and by t_a + t_b every component fast enough to
    have reached the vertex has also cleared it, while the whole transit
    happens inside the single application over t_b.  The horizon also
    keeps every dispersing component many widths away from the truncated
    far end, and it lets the trapezoid mass functional settle (that
    functional wobbles at O(dx^2) while field sits on the vertex of a
    delta or delta-prime coupling).
    """
    grid = GridSpec.from_length(dx, length)
    packet = gaussian_packet(grid)
    m0 = mass(packet)
    scale = lp_norm(packet, 2)

    both = apply_linear_propagator(packet, coupling, t_a + t_b)
    stepped = apply_linear_propagator(apply_linear_propagator(packet, coupling, t_a), coupling, t_b)
    semigroup = _norm_diff(both, stepped) / scale

    back = apply_linear_propagator(both, coupling, -(t_a + t_b))
    reversal = _norm_diff(back, packet) / scale

    mass_drift = abs(mass(both) - m0) / m0
    return {"semigroup": semigroup, "reversal": reversal, "mass_drift": mass_drift}


def delta_zero_matches_kirchhoff(dx: float = 0.02, length: float = 40.0, t: float = 1.7) -> float:
    """Sup-norm difference between Delta(0) and Kirchhoff evolutions."""
    grid = GridSpec.from_length(dx, length)
    packet = gaussian_packet(grid)
    a = apply_linear_propagator(packet, VertexCoupling.delta(0.0), t)
    b = apply_linear_propagator(packet, VertexCoupling.kirchhoff(), t)
    return lp_norm(a - b, np.inf)


def cross_scheme_study(
    coupling: VertexCoupling,
    dx: float = 0.02,
    length: float = 30.0,
    t_end: float = 0.4,
    dt0: float = 0.02,
    levels: int = 4,
) -> dict:
    """Crank-Nicolson linear step versus the exact propagator under dt
    refinement at fixed dx; also measures CN mass drift per step.

    The comparison target is the CN solution at the finest level rather
    than the exact propagator, so the fixed O(dx^2) spatial offset between
    the schemes cancels and the dt order is visible on its own.
    """
    grid = GridSpec.from_length(dx, length)
    packet = gaussian_packet(grid, center=length / 2.0, wavenumber=2.0)
    dts = [dt0 / 2**level for level in range(levels)]
    finals = []
    for dt in dts:
        state = packet
        n_steps = int(round(t_end / dt))
        for _ in range(n_steps):
            state = crank_nicolson_step(state, coupling, dt)
        finals.append(state)
    errors = [_norm_diff(f, finals[-1]) for f in finals[:-1]]
    orders = [float(np.log2(errors[i] / errors[i + 1])) for i in range(len(errors) - 1)]

    one = crank_nicolson_step(packet, coupling, dts[0])
    mass_step_drift = abs(mass(one) - mass(packet)) / mass(packet)

    exact = apply_linear_propagator(packet, coupling, t_end)
    exact_gap = _norm_diff(finals[-1], exact) / lp_norm(packet, 2)
    return {
        "dts": dts,
        "errors": errors,
        "orders": orders,
        "mass_step_drift": mass_step_drift,
        "exact_gap": exact_gap,
    }


def _outbound_soliton(grid: GridSpec, x0: float, v: float) -> GraphField:
    """Soliton on edge 1 moving away from the vertex, ramped to vanish at it."""
    x = grid.x
    field = GraphField.zeros(grid)
    field.edges[0] = smooth_ramp(x) * moving_soliton(x, 0.0, x0, v)
    return field


def conservation_study(
    coupling: VertexCoupling,
    dt_list=(0.008, 0.004, 0.002),
    t_end: float = 20.0,
    dx: float = 0.05,
    v: float = 2.0,
    x0: float = 15.0,
    length: float = 80.0,
) -> dict:
    """Mass and energy drift of the nonlinear split-step scheme.

    All dt values integrate to the same final time, so the drifts are
    comparable and the dt order of the energy drift can be read off the
    refinement ladder directly.  The default ladder ends at dt = 0.002
    (the reference resolution, 10^4 steps for the default horizon); going
    much finer is pointless because the energy drift falls under the
    accumulated-roundoff floor of the functional and the measured order
    collapses.  The soliton travels away from the vertex the whole time,
    keeping the measurement free of vertex-crossing transients.

    The truncation monitor is relaxed here: splitting error radiates a
    trace of fast spectral junk (~1e-10 in mass at the coarsest dt) that
    reaches the far end long before the soliton does.  The domain is
    closed, so the conservation measurements are unaffected; the monitor
    only needs to catch the soliton body itself getting near the wall.
    """
    grid = GridSpec.from_length(dx, length)
    field = _outbound_soliton(grid, x0, v)
    results = {"dts": list(dt_list), "mass_drifts": [], "energy_drifts": []}
    for dt in dt_list:
        cfg = EvolveConfig(
            dt=dt, coupling=coupling, check_interval=1000, far_end_threshold=1e-8
        )
        _, trace = evolve(field, (0.0, t_end), cfg)
        results["mass_drifts"].append(float(trace.mass_drift.max()))
        results["energy_drifts"].append(float(trace.energy_drift.max()))
    drifts = results["energy_drifts"]
    results["energy_orders"] = [
        float(np.log2(drifts[i] / drifts[i + 1])) for i in range(len(drifts) - 1)
    ]
    return results


def line_soliton_fidelity(
    v: float = 4.0,
    x0: float = 14.0,
    t_end: float = 5.0,
    dx: float = 0.05,
    dt: float = 0.002,
    length: float = 40.0,
    join: int = 1,
    far_end_threshold: float = 1e-7,
) -> float:
    """L2 error of a soliton crossing the two-edge degenerate line.

    The pulse starts on edge `join`, runs into the vertex, and continues
    onto the next edge; the result is compared against the closed-form
    translating soliton, so any sign or convention slip shows up at O(1).

    The truncation monitor threshold is loose by default: the initial
    datum cuts the soliton's exponential tail at the vertex, and that
    missing piece (mass 4 e^{-2 x0}, about 8e-9 for the default start)
    radiates freely in both directions.  It belongs to the measured error
    budget, while a genuine leak of the soliton body would exceed any
    such threshold at once.
    """
    grid = GridSpec.from_length(dx, length)
    field = GraphField.zeros(grid)
    x = grid.x
    field.edges[join - 1] = smooth_ramp(x) * moving_soliton(x, 0.0, x0, -v)
    cfg = EvolveConfig(
        dt=dt, two_edge=join, check_interval=1000, far_end_threshold=far_end_threshold
    )
    final, _ = evolve(field, (0.0, t_end), cfg)
    target = GraphField.zeros(grid)
    target.edges[join - 1] = moving_soliton(x, t_end, x0, -v)
    target.edges[join % 3] = moving_soliton(x, t_end, -x0, v)
    return _norm_diff(final, target)


def dispersive_decay_study(
    coupling: VertexCoupling,
    dx: float = 0.15,
    length: float = 2000.0,
    times=None,
) -> dict:
    """Sup-norm decay of the linear flow from a compact bump; the fitted
    log-log slope should sit near the free-dispersion value -1/2.

    The default datum is a narrow bump near the vertex with carrier 5, so
    the vertex interaction finishes and the stationary-phase envelope takes
    over before the first sample at t = 1; a slower or broader datum is
    still in its pre-dispersal plateau there and biases the fitted slope.
    The edge is long enough that the fastest spectral content stays short
    of the far end through t = 100 instead of aliasing into the sup.
    """
    grid = GridSpec.from_length(dx, length)
    field = compact_bump(grid, center=3.0, half_width=2.0, carrier=5.0)
    if times is None:
        times = np.geomspace(1.0, 100.0, 12)
    samples, slope = dispersive_decay_probe(field, coupling, times)
    return {"times": list(np.asarray(times)), "sup_norms": list(samples), "slope": slope}


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        note = f"  ({self.detail})" if self.detail else ""
        return f"[{status}] {self.name}: measured {self.measured:.3e}, tolerance {self.tolerance:.3e}{note}"


def _check(name: str, measured: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(measured < tolerance), float(measured), float(tolerance), detail)


def _suite_unitarity() -> list:
    ks = np.geomspace(0.1, 100.0, 20)
    worst = 0.0
    for strength in (0.1, 1.0, 10.0):
        couplings = [
            VertexCoupling.kirchhoff(),
            VertexCoupling.delta(strength),
            VertexCoupling.delta_prime(strength),
        ]
        for coupling in couplings:
            for k in ks:
                worst = max(worst, scattering_coefficients(coupling, k).unitarity_defect)
    checks = [_check("scattering unitarity |r|^2 + 2|t|^2 = 1", worst, 1e-12)]

    rt = scattering_coefficients(VertexCoupling.kirchhoff(), 1.0)
    defect = max(abs(rt.r + 1.0 / 3.0), abs(rt.t - 2.0 / 3.0))
    checks.append(_check("kirchhoff constants r = -1/3, t = 2/3", defect, 1e-15))

    tilde = rescaled_coefficients(CouplingKind.DELTA, 1.0, 16.0)
    expected_r = -(1.0 + 2.0j) / (3.0 + 2.0j)
    expected_t = 2.0 / (3.0 + 2.0j)
    defect = max(abs(tilde.r - expected_r), abs(tilde.t - expected_t))
    checks.append(_check("rescaled delta coefficients closed form", defect, 1e-14))

    worst = 0.0
    for kind, value in ((CouplingKind.DELTA, 0.7), (CouplingKind.DELTA_PRIME, 1.3)):
        for v in (8.0, 32.0):
            tilde = rescaled_coefficients(kind, value, v)
            direct = scattering_coefficients(coupling_for_rescaled(kind, value, v), v / 2.0)
            worst = max(worst, abs(tilde.r - direct.r), abs(tilde.t - direct.t))
    checks.append(_check("rescaled equals direct at k = v/2", worst, 1e-14))
    return checks


def _suite_kernel() -> list:
    worst = 0.0
    for a in (0.5, 2.0):
        for t in (0.5, 2.0):
            for z in (0.5, 2.0):
                lhs, rhs = kernel_identity_check(a, t, z)
                worst = max(worst, abs(lhs - rhs))
    return [_check("resolvent-to-propagator kernel identity", worst, 1e-6)]


def _suite_propagator() -> list:
    checks = []
    for coupling in (
        VertexCoupling.kirchhoff(),
        VertexCoupling.delta(1.0),
        VertexCoupling.delta_prime(1.0),
    ):
        got = propagator_contracts(coupling, dx=0.02, length=40.0)
        label = coupling.label()
        checks.append(_check(f"semigroup composition [{label}]", got["semigroup"], 1e-8))
        checks.append(_check(f"time reversal [{label}]", got["reversal"], 1e-8))
        checks.append(_check(f"linear mass conservation [{label}]", got["mass_drift"], 1e-8))
    checks.append(
        _check("delta(0) equals kirchhoff", delta_zero_matches_kirchhoff(dx=0.02, length=40.0), 1e-14)
    )
    return checks


def _suite_cross_scheme() -> list:
    study = cross_scheme_study(VertexCoupling.delta(1.0), dx=0.04, length=30.0)
    worst_order = min(study["orders"])
    return [
        CheckResult(
            "crank-nicolson dt order vs refined reference",
            worst_order > 1.8,
            worst_order,
            1.8,
            "order must exceed tolerance",
        ),
        _check("crank-nicolson mass drift per step", study["mass_step_drift"], 1e-10),
    ]


def _suite_conservation() -> list:
    study = conservation_study(VertexCoupling.kirchhoff(), dt_list=(0.002,), t_end=4.0)
    return [
        _check("nonlinear mass drift (2000 steps)", study["mass_drifts"][0], 1e-8),
        _check("nonlinear energy drift (2000 steps)", study["energy_drifts"][0], 1e-6),
    ]


def _suite_soliton() -> list:
    err = line_soliton_fidelity()
    return [_check("two-edge soliton transit fidelity", err, 1e-3)]


_SUITES = {
    "unitarity": _suite_unitarity,
    "kernel": _suite_kernel,
    "propagator": _suite_propagator,
    "cross_scheme": _suite_cross_scheme,
    "conservation": _suite_conservation,
    "soliton": _suite_soliton,
}

SUITE_NAMES = tuple(_SUITES)


def verify(suites=("all",)) -> dict:
    """Run the named verification suites; 'all' expands to every suite.
    Returns {suite name: [CheckResult, ...]}; failures are entries, not
    exceptions."""
    if isinstance(suites, str):
        suites = (suites,)
    names: list[str] = []
    for name in suites:
        if name == "all":
            names.extend(_SUITES)
        elif name in _SUITES:
            names.append(name)
        else:
            raise InvalidParameterError(f"unknown suite {name!r}; choose from {SUITE_NAMES + ('all',)}")
    results = {}
    for name in dict.fromkeys(names):
        try:
            results[name] = _SUITES[name]()
        except (NumericFailureError, TruncationViolationError) as exc:
            results[name] = [CheckResult(f"{name} suite execution", False, float("nan"), 0.0, str(exc))]
    return results
