"""Closed-form solitons, the cut-off initial state, the interaction-time
schedule, and the fictitious-line reference evolutions that the measured
graph dynamics is compared against.

The comparison targets come in three flavours:

* incoming_reference: the exact soliton of the degenerate line through
  edges 1 and 2, valid while the pulse has not yet reached the vertex.
* superposition_reference: incoming soliton plus linearly scattered
  outgoing solitons, the natural target while the pulse crosses.
* ReferenceBundle: after the crossing each outgoing channel is embedded in
  a full-line cubic NLS solution (edge j is the positive half-line, edge
  j+1 the negative one) and advanced with a periodic split-step scheme.
  The reflected channel and the two transmitted channels need one line
  evolution each, since both transmitted channels start from the same
  profile.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.fft import fft, ifft, next_fast_len

from .graph import GraphField, GridSpec, InvalidParameterError
from .linops import RescaledCoefficients
from .evolution import TruncationViolationError

__all__ = [
    "SolitonParams",
    "PhaseSchedule",
    "ReferenceBundle",
    "soliton_profile",
    "moving_soliton",
    "smooth_ramp",
    "initial_datum",
    "phase_schedule",
    "tail_mass",
    "incoming_reference",
    "incoming_part",
    "outgoing_part",
    "superposition_reference",
    "outgoing_reference_bundle",
    "free_line_nls_evolve",
    "advance_bundle",
]


def soliton_profile(x):
    """Ground-state profile sqrt(2) sech(x); solves phi'' + phi^3 = phi."""
    return np.sqrt(2.0) / np.cosh(x)


def moving_soliton(x, t: float, center: float, velocity: float):
    """Soliton e^{i v x/2} e^{-i v^2 t/4} e^{i t} phi(x - center - v t).

    Exact solution of i u_t = -u_xx - |u|^2 u on the line for any center
    and velocity; the profile translates rigidly at the given velocity.
    """
    x = np.asarray(x, dtype=np.float64)
    phase = 0.5 * velocity * x + (1.0 - 0.25 * velocity * velocity) * t
    return np.exp(1j * phase) * soliton_profile(x - center - velocity * t)


@dataclass(frozen=True)
class SolitonParams:
    """Center and velocity of a line soliton (amplitude is fixed at sqrt 2)."""

    center: float
    velocity: float

    def sample(self, x, t: float):
        return moving_soliton(x, t, self.center, self.velocity)


def _ramp_piece(s):
    out = np.zeros_like(s, dtype=np.float64)
    pos = s > 0.0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smooth_ramp(x):
    """C-infinity transition: 0 on (-inf, 1], 1 on [2, inf), monotone between.

    Built from g(s) = e^{-1/s} (s > 0) as g(x-1) / (g(x-1) + g(2-x)).
    """
    x = np.asarray(x, dtype=np.float64)
    a = _ramp_piece(x - 1.0)
    b = _ramp_piece(2.0 - x)
    denom = a + b
    safe = denom > 0.0
    out = np.zeros_like(x)
    out[safe] = a[safe] / denom[safe]
    out[x >= 2.0] = 1.0
    return out


def initial_datum(grid: GridSpec, x0: float, v: float, delta: float = 0.4) -> GraphField:
    """Cut-off soliton on edge 1 heading toward the vertex at speed v.

    Edge 1 carries smooth_ramp(x) e^{-i v x / 2} phi(x - x0); edges 2 and 3
    start at zero.  The ramp vanishes identically on [0, 1], so the state
    satisfies every vertex condition exactly, at the price of a mass
    deficit bounded by the sech^2 tail beyond x0 - 2.
    """
    if v <= 0.0:
        raise InvalidParameterError(f"velocity must be positive, got {v}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    x_min = v ** (1.0 - delta)
    if x0 < x_min * (1.0 - 1e-12):
        raise InvalidParameterError(
            f"initial center x0 = {x0:.6g} is below the minimum v^(1-delta) = {x_min:.6g}"
        )
    x = grid.x
    field = GraphField.zeros(grid)
    field.edges[0] = smooth_ramp(x) * moving_soliton(x, 0.0, x0, -v)
    return field


@dataclass(frozen=True)
class PhaseSchedule:
    """Pre-interaction, interaction and observation-window boundaries.

    t1 and t2 bracket the vertex crossing symmetrically around x0 / v with
    half-width v^(-delta); t3 = t2 + T ln v closes the post-interaction
    observation window.
    """

    t1: float
    t2: float
    t3: float
    x0: float
    v: float
    delta: float
    log_time_factor: float

    @property
    def crossing_time(self) -> float:
        return self.x0 / self.v

    @property
    def interaction_width(self) -> float:
        return self.t2 - self.t1


def phase_schedule(x0: float, v: float, delta: float, log_time_factor: float) -> PhaseSchedule:
    if v <= 1.0:
        raise InvalidParameterError(f"scattering schedule needs v > 1, got {v}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    if log_time_factor <= 0.0:
        raise InvalidParameterError(f"log-time factor must be positive, got {log_time_factor}")
    half = v ** (-delta)
    t_star = x0 / v
    t1 = t_star - half
    t2 = t_star + half
    t3 = t2 + log_time_factor * np.log(v)
    return PhaseSchedule(t1, t2, t3, x0, v, delta, log_time_factor)


def tail_mass(a: float) -> float:
    """Mass of the soliton tail beyond distance a from its center:
    integral of 2 sech^2 over (a, inf) = 4 e^{-2a} / (1 + e^{-2a})."""
    e = np.exp(-2.0 * a)
    return 4.0 * e / (1.0 + e)


# ---------------------------------------------------------------------------
# closed-form comparison targets


def incoming_reference(grid: GridSpec, x0: float, v: float, t: float) -> GraphField:
    """Exact soliton of the degenerate two-edge line through edges 1 and 2.

    Edge 1 carries the incoming pulse, edge 2 its continuation past the
    vertex; edge 3 is zero.  Valid as a comparison target while the pulse
    body is away from the vertex on edge 1.
    """
    x = grid.x
    field = GraphField.zeros(grid)
    field.edges[0] = moving_soliton(x, t, x0, -v)
    field.edges[1] = moving_soliton(x, t, -x0, v)
    return field


def incoming_part(grid: GridSpec, x0: float, v: float, t: float) -> GraphField:
    """Incoming soliton on edge 1 alone (no continuation)."""
    field = GraphField.zeros(grid)
    field.edges[0] = moving_soliton(grid.x, t, x0, -v)
    return field


def outgoing_part(
    grid: GridSpec, x0: float, v: float, coeffs: RescaledCoefficients, t: float
) -> GraphField:
    """Outgoing solitons weighted by the rescaled scattering coefficients:
    reflected on edge 1, transmitted on edges 2 and 3."""
    u = moving_soliton(grid.x, t, -x0, v)
    return GraphField.from_edges(grid, coeffs.r * u, coeffs.t * u, coeffs.t * u)


def superposition_reference(
    grid: GridSpec, x0: float, v: float, coeffs: RescaledCoefficients, t: float
) -> GraphField:
    """Incoming plus scattered outgoing solitons: the crossing-window target."""
    return incoming_part(grid, x0, v, t) + outgoing_part(grid, x0, v, coeffs, t)


# ---------------------------------------------------------------------------
# post-interaction reference bundle (nonlinearly evolved on fictitious lines)


@dataclass(frozen=True)
class ReferenceBundle:
    """The three outgoing-channel references at a common time.

    Channel j lives on a fictitious line: positive coordinates are edge j,
    negative ones edge j+1 (cyclic), and the remaining edge carries zero.
    Channel 1 is the reflected line field; channels 2 and 3 both fold the
    transmitted field, so only two line evolutions are stored.
    """

    t: float
    grid: GridSpec
    coeffs: RescaledCoefficients
    reflected: np.ndarray
    transmitted: np.ndarray
    origin: int
    line_dx: float

    @property
    def n_line(self) -> int:
        return self.reflected.shape[0]

    def _fold(self, line: np.ndarray, lead_edge: int) -> GraphField:
        n = self.grid.n_points
        idx = np.arange(n)
        field = GraphField.zeros(self.grid)
        field.edges[lead_edge - 1] = line[self.origin + idx]
        field.edges[lead_edge % 3] = line[self.origin - idx]
        return field

    def component(self, j: int) -> GraphField:
        """Graph snapshot of channel j (reflected for j=1, transmitted else)."""
        if j not in (1, 2, 3):
            raise InvalidParameterError(f"channel index must be 1, 2 or 3, got {j}")
        line = self.reflected if j == 1 else self.transmitted
        return self._fold(line, j)

    def total(self) -> GraphField:
        """Sum of the three channel snapshots."""
        out = self.component(1)
        for j in (2, 3):
            out = out + self.component(j)
        return out

    def component_mass(self, j: int) -> float:
        line = self.reflected if j == 1 else self.transmitted
        w = np.full(self.n_line, self.line_dx)
        return float(w @ np.abs(line) ** 2)


def outgoing_reference_bundle(
    grid: GridSpec,
    schedule: PhaseSchedule,
    coeffs: RescaledCoefficients,
    pad: float = 20.0,
) -> ReferenceBundle:
    """Build the channel bundle at t2 from the scattering coefficients.

    Each line field starts as coeff * e^{i(v y/2 + (1 - v^2/4) t2)}
    phi(y - (v t2 - x0)); the center offset v t2 - x0 equals v^(1-delta)
    for any admissible x0.  The line half-width covers the graph edges
    plus a safety pad so folding never reads past the array.
    """
    dx = grid.dx
    half_width = grid.length + pad
    n_side = int(np.ceil(half_width / dx))
    n_line = next_fast_len(2 * n_side)
    origin = n_line // 2
    if origin < grid.n_points or n_line - origin <= grid.n_points:
        raise InvalidParameterError("line domain too small to fold onto the graph edges")
    y = (np.arange(n_line) - origin) * dx
    t2 = schedule.t2
    offset = schedule.v * t2 - schedule.x0
    phase = 0.5 * schedule.v * y + (1.0 - 0.25 * schedule.v**2) * t2
    base = np.exp(1j * phase) * soliton_profile(y - offset)
    return ReferenceBundle(
        t=t2,
        grid=grid,
        coeffs=coeffs,
        reflected=coeffs.r * base,
        transmitted=coeffs.t * base,
        origin=origin,
        line_dx=dx,
    )


_MULTIPLIER_CACHE: dict[tuple, np.ndarray] = {}


def _line_multiplier(n_line: int, dx: float, dt: float) -> np.ndarray:
    key = (n_line, dx, dt)
    mult = _MULTIPLIER_CACHE.get(key)
    if mult is None:
        k = 2.0 * np.pi * np.fft.fftfreq(n_line, d=dx)
        mult = np.exp(-1j * dt * k * k)
        _MULTIPLIER_CACHE[key] = mult
    return mult


def _boundary_mass(values: np.ndarray, dx: float, fraction: float) -> float:
    n_edge = max(2, int(np.ceil(fraction * values.shape[0])))
    chunk = np.concatenate([values[:n_edge], values[-n_edge:]])
    return float(dx * np.sum(np.abs(chunk) ** 2))


def free_line_nls_evolve(
    values: np.ndarray,
    dx: float,
    t_span: tuple[float, float],
    dt: float,
    boundary_threshold: float = 1e-10,
    boundary_fraction: float = 0.05,
    check_interval: int = 200,
) -> np.ndarray:
    """Periodic split-step integration of i u_t = -u_xx - |u|^2 u on a line
    truncation.  Mass sitting in the outer boundary_fraction of the domain
    is monitored; exceeding boundary_threshold raises, since the periodic
    wrap-around would silently re-inject it.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 < t0:
        raise InvalidParameterError("t_span must be increasing")
    u = np.array(values, dtype=np.complex128)
    if t1 == t0:
        return u
    n_steps = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
    h = (t1 - t0) / n_steps
    mult = _line_multiplier(u.shape[0], dx, h)
    for s in range(1, n_steps + 1):
        u *= np.exp(0.5j * h * np.abs(u) ** 2)
        u = ifft(fft(u) * mult)
        u *= np.exp(0.5j * h * np.abs(u) ** 2)
        if s % check_interval == 0 or s == n_steps:
            bm = _boundary_mass(u, dx, boundary_fraction)
            if bm > boundary_threshold:
                raise TruncationViolationError(t0 + s * h, bm, boundary_threshold)
    return u


def advance_bundle(bundle: ReferenceBundle, t: float, dt: float, **monitor_kwargs) -> ReferenceBundle:
    """Advance both line fields of the bundle to time t with the periodic
    split-step scheme.  t may not precede the bundle's current time."""
    if t < bundle.t - 1e-12:
        raise InvalidParameterError(
            f"cannot advance bundle backwards: requested t = {t:.6g} < current {bundle.t:.6g}"
        )
    if abs(t - bundle.t) <= 1e-15 * max(1.0, abs(t)):
        return bundle
    span = (bundle.t, t)
    refl = free_line_nls_evolve(bundle.reflected, bundle.line_dx, span, dt, **monitor_kwargs)
    trans = free_line_nls_evolve(bundle.transmitted, bundle.line_dx, span, dt, **monitor_kwargs)
    return replace(bundle, t=t, reflected=refl, transmitted=trans)
