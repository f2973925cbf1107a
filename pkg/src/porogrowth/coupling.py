"""Time advancement: backward Euler in time, fixed-point linearization.

Each accepted step performs, per sweep m: (1) the poroelastic solve with
lagged fractions and growth terms, (2) the oxygen solve with the fresh
displacement and Darcy flux, (3) the four population solves with the
fresh oxygen and stress-derived switches but lagged sources. Convergence
is the max over all fields of the relative infinity-norm change between
sweeps. Growth distortions update once per accepted step, after
convergence, never inside the sweep.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import adr, poroelastic
from .constitutive import (
    growth_distortion_step,
    kinetics_fields,
    switch_Hc,
    switch_Hr,
)
from .errors import NonConvergenceError, PorogrowthError
from .mesh import build_mesh
from .params import EPS_PHI
from .state import (
    MixtureState,
    SPECIES,
    StepDiagnostics,
    Trajectory,
    initial_state,
    nodal_strain,
    sample_xi_field,
)

#: fields entering the convergence test, in reporting order
CONVERGENCE_FIELDS = ("u", "p", "c", "phi_n", "phi_v", "phi_q", "phi_ecm")


@dataclass
class FixedPointReport:
    """Residual history of one time step's fixed-point iteration."""

    iterations: int = 0
    residuals: list = field(default_factory=list)
    converged: bool = False
    wall_time: float = 0.0


@dataclass
class _Iterate:
    """Mutable working copy of the fields updated by the sweeps."""

    u: np.ndarray
    p: np.ndarray
    c: np.ndarray
    phi: np.ndarray  # (4, N) stacked species fractions

    @classmethod
    def from_state(cls, state):
        return cls(u=state.u.copy(), p=state.p.copy(), c=state.c.copy(),
                   phi=state.phi_fields())

    def field(self, name):
        if name in ("u", "p", "c"):
            return getattr(self, name)
        return self.phi[SPECIES.index(name.removeprefix("phi_"))]


def _relative_change(new, old):
    scale = np.max(np.abs(old), initial=0.0) + 1e-30
    return np.max(np.abs(new - old), initial=0.0) / scale


#: extrapolation cap of the secant acceleration (safeguard)
_GAMMA_MAX = 0.95


class _Accelerator:
    """Depth-one Anderson (secant) acceleration of the sweep map.

    The sweep output G(x) is combined with the previous one using the
    scalar secant coefficient gamma = <f, f - f_prev> / |f - f_prev|^2,
    f = G(x) - x, with all fields normalized to comparable magnitude.
    The accelerated point must stay physical (nonnegative fractions,
    fluid fraction above the solver floor); otherwise the plain sweep
    output is kept. The fixed point itself is untouched -- only the
    path towards it changes, which matters in the strongly compacted
    regime where plain substitution contracts arbitrarily slowly.
    """

    def __init__(self):
        self.scale = None
        self.f_prev = None
        self.g_prev = None

    @staticmethod
    def _flatten(iterate):
        return np.concatenate([iterate.u, iterate.p, iterate.c,
                               iterate.phi.ravel()])

    def _unflatten(self, vec, like):
        n = like.u.shape[0]
        return _Iterate(
            u=vec[:n].copy(), p=vec[n:2 * n].copy(), c=vec[2 * n:3 * n].copy(),
            phi=vec[3 * n:].reshape(4, n).copy())

    def push(self, iterate, swept):
        """Return the next iterate given the sweep input and output."""
        x = self._flatten(iterate)
        g = self._flatten(swept)
        if self.scale is None:
            n = iterate.u.shape[0]
            blocks = [g[:n], g[n:2 * n], g[2 * n:3 * n], g[3 * n:]]
            self.scale = np.concatenate([
                np.full(b.shape, np.max(np.abs(b)) + 1e-30) for b in blocks])
        f = (g - x) / self.scale
        accelerated = None
        if self.f_prev is not None:
            df = f - self.f_prev
            denom = float(df @ df)
            if denom > 0.0:
                gamma = float(f @ df) / denom
                gamma = min(max(gamma, -_GAMMA_MAX), _GAMMA_MAX)
                accelerated = g - gamma * (g - self.g_prev)
        self.f_prev = f
        self.g_prev = g
        if accelerated is None:
            return swept
        candidate = self._unflatten(accelerated, swept)
        if (np.min(candidate.phi) < 0.0
                or np.min(1.0 - candidate.phi.sum(axis=0)) <= EPS_PHI
                or np.min(candidate.c) < 0.0):
            return swept
        return candidate


def _sweep(mesh, iterate, state_n, dt, scenario, params):
    """One fixed-point sweep; returns the next iterate."""
    t_b, v_b = scenario.boundary_data(params)
    phi_m = iterate.phi
    g = state_n.g_fields()

    # step 1: poroelastic solve with lagged coefficients
    system = poroelastic.assemble(
        mesh, phi_m, g, state_n.u, dt, t_b, v_b, params,
        dirichlet_side=scenario.darcy_dirichlet_side)
    u_new, p_new, v_new = poroelastic.solve(system)

    # step 2: oxygen with the fresh displacement and Darcy flux
    oxygen = adr.build_oxygen_problem(
        mesh, phi_m, iterate.c, u_new, state_n.u, v_new, dt, scenario, params)
    c_new = adr.solve_adr(oxygen, dt, state_n.c)

    # step 3: populations, gated by the freshest stress and oxygen
    phi_s_m = phi_m.sum(axis=0)
    r_nodes = np.abs(phi_s_m * nodal_strain(mesh, u_new) - g[0] * phi_m[0])
    h_r = switch_Hr(r_nodes, params.r_bar, inverted=scenario.h_r_inverted)
    h_c = switch_Hc(c_new, scenario.c_threshold(params))
    sigma, source = kinetics_fields(
        phi_m, 1.0 - phi_s_m, c_new, h_r, h_c, scenario.k_g(params), params)
    phi_new = np.empty_like(phi_m)
    for eta in range(4):
        problem = adr.build_species_problem(
            eta, mesh, sigma[eta], source[eta], u_new, state_n.u, dt, params)
        phi_new[eta] = adr.solve_adr(problem, dt, state_n.phi_fields()[eta])

    return _Iterate(u=u_new, p=p_new, c=c_new, phi=phi_new)


def fixed_point_step(state_n, mesh, dt, scenario, params,
                     tol=None, max_iter=None):
    """Advance one time step; returns (state, FixedPointReport).

    Raises NonConvergenceError (carrying the report) when max_iter
    sweeps do not meet tol, and NonphysicalStateError if an intermediate
    state violates the closure.
    """
    tol = scenario.tol if tol is None else tol
    max_iter = scenario.max_iter if max_iter is None else max_iter
    t0 = time.perf_counter()
    report = FixedPointReport()

    iterate = _Iterate.from_state(state_n)
    accelerator = _Accelerator()
    for _ in range(max_iter):
        new = _sweep(mesh, iterate, state_n, dt, scenario, params)
        residual = max(
            _relative_change(new.field(name), iterate.field(name))
            for name in CONVERGENCE_FIELDS)
        report.residuals.append(residual)
        report.iterations += 1
        if residual < tol:
            iterate = new
            report.converged = True
            break
        iterate = accelerator.push(iterate, new)
    report.wall_time = time.perf_counter() - t0
    if not report.converged:
        raise NonConvergenceError(
            f"fixed point did not converge in {max_iter} sweeps "
            f"(last residual {report.residuals[-1]})", report)

    # growth distortions update once per accepted step
    g_next = np.empty_like(state_n.g_fields())
    g_now = state_n.g_fields()
    if scenario.growth_model == "G0":
        g_next[:] = g_now
    else:
        phi_fl = 1.0 - iterate.phi.sum(axis=0)
        ux = nodal_strain(mesh, iterate.u)
        r_nodes = np.abs((1.0 - phi_fl) * ux - g_now[0] * iterate.phi[0])
        h_r = switch_Hr(r_nodes, params.r_bar, inverted=scenario.h_r_inverted)
        h_c = switch_Hc(iterate.c, scenario.c_threshold(params))
        sigma, source = kinetics_fields(
            iterate.phi, phi_fl, iterate.c, h_r, h_c,
            scenario.k_g(params), params)
        net = source - sigma * iterate.phi
        for eta in range(4):
            safe_phi = np.where(iterate.phi[eta] > EPS_PHI, iterate.phi[eta], 1.0)
            g_next[eta] = growth_distortion_step(
                g_now[eta], iterate.phi[eta], net[eta] / safe_phi, dt, "G1")

    state = MixtureState(
        u=iterate.u, p=iterate.p,
        phi_n=iterate.phi[0], phi_v=iterate.phi[1],
        phi_q=iterate.phi[2], phi_ecm=iterate.phi[3],
        c=iterate.c,
        g_n=g_next[0], g_v=g_next[1], g_q=g_next[2], g_ecm=g_next[3],
    )
    return state, report


def _advance(state, mesh, dt, scenario, params):
    """One nominal step, optionally bisecting dt on nonconvergence."""
    try:
        return fixed_point_step(state, mesh, dt, scenario, params)
    except NonConvergenceError:
        if not scenario.auto_dt_halving:
            raise
    last_report = None
    for bisection in range(1, 5):
        sub_dt = dt / 2**bisection
        try:
            current = state
            for _ in range(2**bisection):
                current, last_report = fixed_point_step(
                    current, mesh, sub_dt, scenario, params)
            return current, last_report
        except NonConvergenceError as exc:
            last_report = exc.report
    raise NonConvergenceError(
        "fixed point failed after 4 time-step bisections", last_report)


def _record(trajectory, state, mesh, params):
    mid = mesh.mid_node()
    xi = sample_xi_field(state, params, mesh)
    phi_fl_mid = float(state.phi_fl_field()[mid])
    series = trajectory.mid_series
    series["phi_n"].append(float(state.phi_n[mid]))
    series["phi_v"].append(float(state.phi_v[mid]))
    series["phi_q"].append(float(state.phi_q[mid]))
    series["phi_ecm"].append(float(state.phi_ecm[mid]))
    series["phi_fl"].append(phi_fl_mid)
    series["c"].append(float(state.c[mid]))
    series["p"].append(float(state.p[mid]))
    series["xi"].append(int(xi[mid]))
    trajectory.xi_series.append(xi)


def run(scenario, params):
    """Full simulation over [0, t_end]; returns a Trajectory.

    Snapshots are kept every output_stride steps (plus the first and
    last); the mid-node series and xi map are recorded at every step.
    A step failure aborts with the partial trajectory attached to the
    raised error.
    """
    mesh = build_mesh(scenario.length, scenario.node_count)
    state = initial_state(mesh, params, scenario)
    trajectory = Trajectory(
        mesh=mesh, times=[0.0], states=[state], series_times=[0.0],
        mid_series={k: [] for k in
                    ("phi_n", "phi_v", "phi_q", "phi_ecm", "phi_fl",
                     "c", "p", "xi")},
        xi_series=[], diagnostics=[])
    _record(trajectory, state, mesh, params)

    t = 0.0
    for step in range(1, scenario.n_steps + 1):
        try:
            state, report = _advance(state, mesh, scenario.dt, scenario, params)
        except PorogrowthError as exc:
            exc.partial_trajectory = trajectory
            raise
        t = step * scenario.dt
        trajectory.series_times.append(t)
        trajectory.diagnostics.append(StepDiagnostics(
            step=step, time=t, iterations=report.iterations,
            residual=report.residuals[-1]))
        _record(trajectory, state, mesh, params)
        if step % scenario.output_stride == 0 or step == scenario.n_steps:
            if t > trajectory.times[-1]:
                trajectory.times.append(t)
                trajectory.states.append(state)
    return trajectory
