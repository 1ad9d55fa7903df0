"""Linear theory: scattering coefficients, resolvents, exact propagators."""

import numpy as np
import pytest

from gnls.graph import (
    GraphField,
    GridSpec,
    InvalidParameterError,
    VertexCoupling,
    edge_masses,
    lp_norm,
    mass,
)
from gnls.linops import (
    TWO_EDGE_MATRICES,
    apply_half_line_propagators,
    apply_linear_propagator,
    apply_two_edge_propagator,
    coupling_for_rescaled,
    dispersive_decay_probe,
    fit_loglog_slope,
    kernel_identity_check,
    rescaled_coefficients,
    resolvent_kernel,
    scattering_coefficients,
)
from gnls.graph import CouplingKind

COUPLINGS = [
    VertexCoupling.kirchhoff(),
    VertexCoupling.delta(3.0),
    VertexCoupling.delta_prime(1.5),
]


def packet(grid, center=15.0, width=2.0, carrier=3.0):
    """Gaussian packet moving toward the vertex at group speed 2*carrier."""
    x = grid.x
    return np.exp(-((x - center) ** 2) / (2.0 * width**2)) * np.exp(-1j * carrier * x)


def quiet_field(grid, center=15.0, width=2.0, carrier=3.0):
    row = packet(grid, center, width, carrier)
    return GraphField.from_edges(grid, row, 0.6 * row, (0.3 + 0.2j) * row)


# ---------------------------------------------------------------------------
# stationary scattering coefficients


class TestScatteringCoefficients:
    def test_kirchhoff_values(self):
        for k in (0.3, 1.0, 7.0):
            c = scattering_coefficients(VertexCoupling.kirchhoff(), k)
            assert c.r == pytest.approx(-1.0 / 3.0)
            assert c.t == pytest.approx(2.0 / 3.0)

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    @pytest.mark.parametrize("k", [0.1, 1.0, 10.0, 100.0])
    def test_unitarity(self, coupling, k):
        c = scattering_coefficients(coupling, k)
        assert c.unitarity_defect < 1e-14

    def test_delta_zero_is_kirchhoff(self):
        a = scattering_coefficients(VertexCoupling.delta(0.0), 2.3)
        b = scattering_coefficients(VertexCoupling.kirchhoff(), 2.3)
        assert a.r == b.r and a.t == b.t

    def test_strong_delta_approaches_dirichlet(self):
        c = scattering_coefficients(VertexCoupling.delta(1e6), 1.0)
        assert abs(c.r + 1.0) < 1e-5
        assert abs(c.t) < 1e-5

    def test_delta_prime_limits(self):
        # beta*k large: decoupled Neumann edges, full reflection
        c = scattering_coefficients(VertexCoupling.delta_prime(1e6), 1.0)
        assert abs(c.r - 1.0) < 1e-5
        assert abs(c.t) < 1e-5
        # beta*k small: r -> 1/3, t -> -2/3
        c = scattering_coefficients(VertexCoupling.delta_prime(1e-6), 1.0)
        assert abs(c.r - 1.0 / 3.0) < 1e-5
        assert abs(c.t + 2.0 / 3.0) < 1e-5

    @pytest.mark.parametrize("k", [0.0, -1.0, np.nan, 2.0 + 1.0j])
    def test_wavenumber_domain(self, k):
        with pytest.raises(InvalidParameterError):
            scattering_coefficients(VertexCoupling.kirchhoff(), k)


class TestRescaledCoefficients:
    def test_frozen_kirchhoff(self):
        c = rescaled_coefficients(CouplingKind.KIRCHHOFF, 0.0, 16.0)
        assert c.r == pytest.approx(-1.0 / 3.0, abs=1e-15)
        assert c.t == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_frozen_delta_unit_strength(self):
        c = rescaled_coefficients(CouplingKind.DELTA, 1.0, 16.0)
        assert c.r == pytest.approx((-7.0 - 4.0j) / 13.0, abs=1e-15)
        assert c.t == pytest.approx((6.0 - 4.0j) / 13.0, abs=1e-15)

    def test_frozen_delta_prime_unit_strength(self):
        c = rescaled_coefficients(CouplingKind.DELTA_PRIME, 1.0, 16.0)
        assert c.r == pytest.approx((13.0 - 4.0j) / 37.0, abs=1e-15)
        assert c.t == pytest.approx((-24.0 - 4.0j) / 37.0, abs=1e-15)

    @pytest.mark.parametrize("kind,tilde", [
        (CouplingKind.KIRCHHOFF, 0.0),
        (CouplingKind.DELTA, 0.7),
        (CouplingKind.DELTA, 4.0),
        (CouplingKind.DELTA_PRIME, 0.4),
        (CouplingKind.DELTA_PRIME, 5.0),
    ])
    @pytest.mark.parametrize("v", [4.0, 32.0])
    def test_matches_direct_formula_at_half_velocity(self, kind, tilde, v):
        """The rescaled pair equals the plain coefficients evaluated at
        k = v/2 with the velocity-scaled vertex strength."""
        scaled = rescaled_coefficients(kind, tilde, v)
        direct = scattering_coefficients(coupling_for_rescaled(kind, tilde, v), v / 2.0)
        assert scaled.r == pytest.approx(direct.r, abs=1e-14)
        assert scaled.t == pytest.approx(direct.t, abs=1e-14)

    def test_unitarity(self):
        for kind, tilde in ((CouplingKind.DELTA, 2.5), (CouplingKind.DELTA_PRIME, 0.3)):
            c = rescaled_coefficients(kind, tilde, 8.0)
            assert abs(abs(c.r) ** 2 + 2 * abs(c.t) ** 2 - 1.0) < 1e-14

    def test_strong_delta_limit(self):
        c = rescaled_coefficients(CouplingKind.DELTA, 1e8, 8.0)
        assert abs(c.r + 1.0) < 1e-7
        assert abs(c.t) < 1e-7

    def test_parameter_domains(self):
        with pytest.raises(InvalidParameterError):
            rescaled_coefficients(CouplingKind.KIRCHHOFF, 1.0, 8.0)
        with pytest.raises(InvalidParameterError):
            rescaled_coefficients(CouplingKind.DELTA, -0.5, 8.0)
        with pytest.raises(InvalidParameterError):
            rescaled_coefficients(CouplingKind.DELTA_PRIME, 0.0, 8.0)
        with pytest.raises(InvalidParameterError):
            rescaled_coefficients(CouplingKind.DELTA, 1.0, 0.0)

    def test_coupling_for_rescaled(self):
        assert coupling_for_rescaled(CouplingKind.DELTA, 1.5, 8.0).strength == pytest.approx(12.0)
        assert coupling_for_rescaled(CouplingKind.DELTA_PRIME, 1.5, 8.0).strength == pytest.approx(0.1875)
        assert coupling_for_rescaled(CouplingKind.KIRCHHOFF, 0.0, 8.0) == VertexCoupling.kirchhoff()


# ---------------------------------------------------------------------------
# resolvent kernels


def _x_derivative(coupling, k, y, i, j, h=1e-5):
    """One-sided 2nd-order x-derivative of R_ij(x, y) at x = 0."""
    r0 = resolvent_kernel(coupling, k, 0.0, y)[i, j]
    r1 = resolvent_kernel(coupling, k, h, y)[i, j]
    r2 = resolvent_kernel(coupling, k, 2.0 * h, y)[i, j]
    return (-3.0 * r0 + 4.0 * r1 - r2) / (2.0 * h)


class TestResolventKernel:
    K = 1.2 + 0.8j
    Y = 0.9

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_solves_helmholtz_away_from_source(self, coupling):
        """Each entry solves -u'' - k^2 u = 0 in x away from x = y."""
        k, y = self.K, self.Y
        h = 1e-3
        for x in (0.3, 2.0):
            rm = resolvent_kernel(coupling, k, x - h, y)
            r0 = resolvent_kernel(coupling, k, x, y)
            rp = resolvent_kernel(coupling, k, x + h, y)
            upp = (rm - 2.0 * r0 + rp) / h**2
            defect = np.max(np.abs(-upp - k**2 * r0))
            assert defect < 1e-5, f"Helmholtz defect {defect:.2e} at x={x}"

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_unit_derivative_jump_at_source(self, coupling):
        k, y = self.K, self.Y
        h = 1e-6
        eps = 1e-4
        d_minus = (resolvent_kernel(coupling, k, y - eps + h, y)
                   - resolvent_kernel(coupling, k, y - eps - h, y)) / (2.0 * h)
        d_plus = (resolvent_kernel(coupling, k, y + eps + h, y)
                  - resolvent_kernel(coupling, k, y + eps - h, y)) / (2.0 * h)
        jump = d_plus - d_minus
        off = jump - np.diag(np.diag(jump))
        assert np.max(np.abs(off)) < 1e-3
        assert np.allclose(np.diag(jump), -1.0, atol=1e-3)

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_vertex_condition_in_x(self, coupling):
        k, y = self.K, self.Y
        vals = resolvent_kernel(coupling, k, 0.0, y)
        derivs = np.array([[_x_derivative(coupling, k, y, i, j) for j in range(3)]
                           for i in range(3)])
        if coupling.kind == CouplingKind.DELTA_PRIME:
            assert np.max(np.abs(derivs - derivs[0])) < 1e-8
            defect = np.abs(vals.sum(axis=0) - coupling.beta * derivs[0])
        else:
            assert np.max(np.abs(vals - vals[0])) < 1e-12
            defect = np.abs(derivs.sum(axis=0) - coupling.alpha * vals[0])
        assert np.max(defect) < 1e-8

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_symmetric_green_function(self, coupling):
        k = self.K
        a = resolvent_kernel(coupling, k, 0.4, 1.7)
        b = resolvent_kernel(coupling, k, 1.7, 0.4)
        assert np.allclose(a, b.T, atol=1e-14)

    def test_off_diagonal_depends_on_sum_only(self):
        k = self.K
        a = resolvent_kernel(VertexCoupling.delta(2.0), k, 0.5, 1.5)
        b = resolvent_kernel(VertexCoupling.delta(2.0), k, 1.9, 0.1)
        assert a[0, 1] == pytest.approx(b[0, 1], abs=1e-15)

    def test_delta_zero_is_kirchhoff(self):
        k = self.K
        a = resolvent_kernel(VertexCoupling.delta(0.0), k, 0.7, 1.1)
        b = resolvent_kernel(VertexCoupling.kirchhoff(), k, 0.7, 1.1)
        assert np.allclose(a, b, atol=0.0)

    def test_decay_in_upper_half_plane(self):
        r = resolvent_kernel(VertexCoupling.kirchhoff(), 1.0 + 1.0j, 40.0, 0.5)
        assert np.max(np.abs(r)) < 1e-15

    def test_parameter_domains(self):
        with pytest.raises(InvalidParameterError):
            resolvent_kernel(VertexCoupling.kirchhoff(), 1.0 - 0.5j, 1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            resolvent_kernel(VertexCoupling.kirchhoff(), 1.0 + 0.5j, -1.0, 1.0)


# ---------------------------------------------------------------------------
# propagators


class TestHalfLinePropagators:
    def test_zero_time_is_identity_on_minus(self):
        grid = GridSpec.from_length(0.1, 30.0)
        psi = packet(grid)
        minus, plus = apply_half_line_propagators(psi, grid, 0.0)
        assert np.array_equal(minus, psi)
        assert np.all(plus[1:] == 0.0)

    def test_linearity(self):
        grid = GridSpec.from_length(0.1, 30.0)
        a, b = packet(grid, 10.0), packet(grid, 18.0, carrier=1.0)
        m1, p1 = apply_half_line_propagators(a, grid, 0.7)
        m2, p2 = apply_half_line_propagators(b, grid, 0.7)
        m3, p3 = apply_half_line_propagators(2.0 * a + 1j * b, grid, 0.7)
        assert np.allclose(m3, 2.0 * m1 + 1j * m2, atol=1e-13)
        assert np.allclose(p3, 2.0 * p1 + 1j * p2, atol=1e-13)

    def test_mass_splits_between_images(self):
        """Before anything reaches the cut ends, the pair of restrictions
        partitions the line mass of the evolved extension."""
        grid = GridSpec.from_length(0.05, 30.0)
        psi = packet(grid, center=10.0)
        f0 = GraphField.from_edges(grid, psi, 0 * psi, 0 * psi)
        total0 = mass(f0)
        for t in (0.4, 1.2):
            minus, plus = apply_half_line_propagators(psi, grid, t)
            f = GraphField.from_edges(grid, minus, plus, 0 * psi)
            assert mass(f) == pytest.approx(total0, rel=1e-10)

    def test_packet_crosses_origin(self):
        grid = GridSpec.from_length(0.05, 30.0)
        psi = packet(grid, center=10.0, carrier=3.0)
        norm0 = np.linalg.norm(psi)
        # at t = 3 the center sits at 10 - 2*3*3 = -8, on the image side
        minus, plus = apply_half_line_propagators(psi, grid, 3.0)
        assert np.linalg.norm(plus) > 0.9 * norm0
        assert np.linalg.norm(minus) < 0.3 * norm0
        center = np.sum(grid.x * np.abs(plus) ** 2) / np.sum(np.abs(plus) ** 2)
        assert center == pytest.approx(8.0, abs=0.5)

    def test_shape_validated(self):
        grid = GridSpec.from_length(0.1, 30.0)
        with pytest.raises(InvalidParameterError):
            apply_half_line_propagators(np.zeros(7), grid, 0.1)


class TestLinearPropagator:
    def test_zero_time(self):
        grid = GridSpec.from_length(0.1, 30.0)
        f = quiet_field(grid)
        out = apply_linear_propagator(f, VertexCoupling.kirchhoff(), 0.0)
        assert np.array_equal(out.edges, f.edges)
        assert out.edges is not f.edges

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_mass_conserved_through_transit(self, coupling):
        """The packet crosses the vertex completely between the endpoints."""
        grid = GridSpec.from_length(0.02, 40.0)
        f = quiet_field(grid, center=12.0, width=2.0, carrier=5.0)
        out = apply_linear_propagator(f, coupling, 3.0)
        assert mass(out) == pytest.approx(mass(f), rel=1e-12)

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_semigroup_split_in_equal_halves(self, coupling):
        """One application over t agrees with two applications over t/2."""
        grid = GridSpec.from_length(0.05, 40.0)
        f = quiet_field(grid)
        t = 0.5
        whole = apply_linear_propagator(f, coupling, t)
        halved = apply_linear_propagator(
            apply_linear_propagator(f, coupling, 0.5 * t), coupling, 0.5 * t
        )
        gap = lp_norm(whole - halved, 2) / lp_norm(f, 2)
        assert gap < 1e-8, f"semigroup defect {gap:.3e}"

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_time_reversal(self, coupling):
        """Forward through the vertex and back; both splice instants are
        quiet there, which keeps the vertex kink fully resolved."""
        grid = GridSpec.from_length(0.02, 40.0)
        f = quiet_field(grid, center=12.0, width=2.0, carrier=5.0)
        out = apply_linear_propagator(f, coupling, 3.0)
        back = apply_linear_propagator(out, coupling, -3.0)
        gap = lp_norm(back - f, 2) / lp_norm(f, 2)
        assert gap < 1e-8, f"reversal defect {gap:.3e}"

    def test_linearity_in_the_field(self):
        grid = GridSpec.from_length(0.1, 30.0)
        f = quiet_field(grid)
        c = VertexCoupling.delta(2.0)
        a = apply_linear_propagator(3j * f, c, 0.6)
        b = apply_linear_propagator(f, c, 0.6)
        assert np.allclose(a.edges, 3j * b.edges, atol=1e-13)

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_edge_permutation_equivariance(self, coupling):
        grid = GridSpec.from_length(0.1, 30.0)
        f = quiet_field(grid)
        perm = [2, 0, 1]
        permuted = GraphField(grid, f.edges[perm])
        a = apply_linear_propagator(permuted, coupling, 0.9)
        b = apply_linear_propagator(f, coupling, 0.9)
        assert np.allclose(a.edges, b.edges[perm], atol=1e-14)

    def test_delta_zero_matches_kirchhoff_exactly(self):
        grid = GridSpec.from_length(0.1, 30.0)
        f = quiet_field(grid)
        a = apply_linear_propagator(f, VertexCoupling.delta(0.0), 1.1)
        b = apply_linear_propagator(f, VertexCoupling.kirchhoff(), 1.1)
        assert np.array_equal(a.edges, b.edges)


ORACLE_T_FINAL = 6.0


@pytest.fixture(scope="module")
def scattering_setup():
    """Incoming single-edge packet plus its plane-wave spectral density."""
    grid = GridSpec.from_length(0.1, 60.0)
    row = packet(grid, center=15.0, width=2.0, carrier=3.0)
    field = GraphField.from_edges(grid, row, 0 * row, 0 * row)

    n_line = 1 << 14
    buf = np.zeros(n_line, dtype=np.complex128)
    buf[: grid.n_points] = row
    amp = np.fft.fft(buf)
    k_line = 2.0 * np.pi * np.fft.fftfreq(n_line, d=grid.dx)
    incoming = k_line < 0.0
    weights = np.abs(amp[incoming]) ** 2
    k_in = -k_line[incoming]
    stray = np.abs(amp[~incoming]) ** 2
    assert stray.sum() < 1e-12 * weights.sum()
    return grid, field, k_in, weights


class TestScatteringMassOracle:
    """Propagated mass splits must match the stationary coefficients.

    The incoming packet is expanded over incoming plane waves by FFT; the
    predicted reflected and transmitted masses are the |r(k)|^2 and |t(k)|^2
    weighted averages over the packet's spectral density.  The propagator is
    built by an unrelated image construction, so the agreement ties the time
    domain evolution to the stationary formulas.
    """

    def predicted_split(self, coupling, k_in, weights):
        r2 = np.empty_like(weights)
        t2 = np.empty_like(weights)
        for idx, k in enumerate(k_in):
            c = scattering_coefficients(coupling, k)
            r2[idx] = abs(c.r) ** 2
            t2[idx] = abs(c.t) ** 2
        total = weights.sum()
        return (r2 * weights).sum() / total, (t2 * weights).sum() / total

    @pytest.mark.parametrize("coupling", COUPLINGS, ids=lambda c: c.label())
    def test_mass_split_matches_coefficients(self, scattering_setup, coupling):
        grid, field, k_in, weights = scattering_setup
        predicted_r2, predicted_t2 = self.predicted_split(coupling, k_in, weights)
        out = apply_linear_propagator(field, coupling, ORACLE_T_FINAL)
        em = edge_masses(out)
        total = mass(field)
        assert em[1] == pytest.approx(em[2], rel=1e-12)
        assert em[0] / total == pytest.approx(predicted_r2, rel=2e-3)
        assert em[1] / total == pytest.approx(predicted_t2, rel=2e-3)

    def test_strong_delta_blocks_transmission(self, scattering_setup):
        grid, field, _, _ = scattering_setup
        out = apply_linear_propagator(field, VertexCoupling.delta(1e5), ORACLE_T_FINAL)
        em = edge_masses(out)
        assert em[1] / mass(field) < 1e-4
        assert em[0] / mass(field) == pytest.approx(1.0, abs=1e-3)


class TestTwoEdgePropagator:
    def test_matrices_are_involutions(self):
        for T in TWO_EDGE_MATRICES.values():
            assert np.allclose(T @ T, np.eye(3))

    def test_field_routing(self):
        """Joined edges exchange the image part; the third edge reflects
        with a Dirichlet sign."""
        grid = GridSpec.from_length(0.05, 30.0)
        row = packet(grid, 10.0)
        t = 1.3
        minus, plus = apply_half_line_propagators(row, grid, t)

        f1 = GraphField.from_edges(grid, row, 0 * row, 0 * row)
        out = apply_two_edge_propagator(f1, 1, t)
        assert np.allclose(out.edges[0], minus, atol=1e-13)
        assert np.allclose(out.edges[1], plus, atol=1e-13)
        assert np.allclose(out.edges[2], 0.0, atol=1e-13)

        f3 = GraphField.from_edges(grid, 0 * row, 0 * row, row)
        out = apply_two_edge_propagator(f3, 1, t)
        assert np.allclose(out.edges[2], minus - plus, atol=1e-13)
        assert np.allclose(out.edges[0], 0.0, atol=1e-13)

    def test_mass_conserved(self):
        grid = GridSpec.from_length(0.05, 30.0)
        f = quiet_field(grid, center=10.0)
        for j in (1, 2, 3):
            out = apply_two_edge_propagator(f, j, 0.9)
            assert mass(out) == pytest.approx(mass(f), rel=1e-10)

    def test_zero_time_and_validation(self):
        grid = GridSpec.from_length(0.1, 30.0)
        f = quiet_field(grid)
        out = apply_two_edge_propagator(f, 2, 0.0)
        assert np.array_equal(out.edges, f.edges)
        with pytest.raises(InvalidParameterError):
            apply_two_edge_propagator(f, 4, 0.1)


# ---------------------------------------------------------------------------
# exponential-kernel identity


class TestKernelIdentity:
    @pytest.mark.parametrize("a", [0.5, 2.0, 8.0])
    @pytest.mark.parametrize("t", [0.3, 1.0])
    @pytest.mark.parametrize("z", [-3.0, 0.0, 2.0])
    def test_both_quadratures_agree(self, a, t, z):
        lhs, rhs = kernel_identity_check(a, t, z)
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))

    def test_scaling_relation(self):
        """The integral is invariant under (a, t, z) -> (a/s, s^2 t, s z)."""
        lhs1, _ = kernel_identity_check(2.0, 0.5, 1.0)
        lhs2, _ = kernel_identity_check(1.0, 2.0, 2.0)
        assert lhs1 == pytest.approx(lhs2, abs=1e-9)

    def test_stiff_limit_recovers_free_kernel(self):
        a, t, z = 400.0, 0.7, 1.3
        lhs, _ = kernel_identity_check(a, t, z)
        free = np.exp(1j * z**2 / (4.0 * t)) / (2.0 * np.sqrt(np.pi * t) * np.exp(1j * np.pi / 4.0))
        assert a * lhs == pytest.approx(free, rel=1e-2)

    def test_parameter_domains(self):
        with pytest.raises(InvalidParameterError):
            kernel_identity_check(-1.0, 0.5, 0.0)
        with pytest.raises(InvalidParameterError):
            kernel_identity_check(1.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# decay diagnostics


class TestSlopeFit:
    def test_recovers_exact_power_law(self):
        xs = np.array([1.0, 2.0, 4.0, 8.0])
        ys = 3.0 * xs**-1.7
        assert fit_loglog_slope(xs, ys) == pytest.approx(-1.7, abs=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(42)
        xs = np.array([1.0, 3.0, 9.0, 27.0])
        ys = xs**-0.5 * np.exp(rng.normal(scale=0.05, size=4))
        base = fit_loglog_slope(xs, ys)
        scaled = fit_loglog_slope(170.0 * xs, 0.003 * ys)
        assert scaled == pytest.approx(base, abs=1e-12)

    def test_input_validation(self):
        with pytest.raises(InvalidParameterError):
            fit_loglog_slope([1.0, 2.0], [1.0, 2.0])
        with pytest.raises(InvalidParameterError):
            fit_loglog_slope([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])
        with pytest.raises(InvalidParameterError):
            fit_loglog_slope([1.0, 2.0, 3.0], [1.0, 2.0])


class TestDispersiveDecayProbe:
    def test_free_decay_rate(self):
        """A packet that scatters before the first sample time decays at
        the stationary-phase rate afterwards."""
        grid = GridSpec.from_length(0.15, 800.0)
        x = grid.x
        row = np.exp(-((x - 3.0) ** 2)) * np.exp(-5j * x)
        f = GraphField.from_edges(grid, row, 0 * row, 0 * row)
        times = [2.0, 5.0, 12.0, 30.0]
        samples, slope = dispersive_decay_probe(f, VertexCoupling.kirchhoff(), times)
        sups = [s[1] for s in samples]
        assert all(a > b for a, b in zip(sups, sups[1:]))
        assert slope == pytest.approx(-0.5, abs=0.05)

    def test_positive_times_required(self):
        f = GraphField.zeros(GridSpec(0.1, 32))
        with pytest.raises(InvalidParameterError):
            dispersive_decay_probe(f, VertexCoupling.kirchhoff(), [0.0, 1.0, 2.0])
