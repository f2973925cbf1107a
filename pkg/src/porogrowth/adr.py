"""Scalar 1D advection-diffusion-reaction solver with exponential fitting.

The edge flux between nodes i and i+1 is the Scharfetter-Gummel form

    J = (D_e / h) * (B(-t_e) w_i - B(t_e) w_{i+1}),   t_e = v_e h / D_e,

with B the Bernoulli function. For v = 0 this is the centered
three-point diffusion stencil; for constant coefficients in steady state
it is nodally exact; with lumped mass the system matrix is an M-matrix,
so nonnegative data produce nonnegative solutions at any Peclet number.
"""

from dataclasses import dataclass, field

import numpy as np

from .constitutive import nutrient_diffusivity, oxygen_sink
from .errors import InvalidProblemError, NonphysicalStateError
from .linalg import solve_banded, tridiagonal_as_banded
from .params import EPS_PHI


def bernoulli(t):
    """B(t) = t / (exp(t) - 1), with B(0) = 1.

    A truncated series of (exp(t)-1)/t is used for |t| < 1e-2 to avoid
    cancellation near zero.
    """
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-2
    ts = np.where(small, t, 0.0)
    # (exp(t)-1)/t = 1 + t/2 + t^2/6 + t^3/24 + t^4/120 + t^5/720 + O(t^6)
    series = 1.0 + ts / 2.0 + ts**2 / 6.0 + ts**3 / 24.0 + ts**4 / 120.0 + ts**5 / 720.0
    tb = np.where(small, 1.0, t)
    with np.errstate(over="ignore"):
        direct = np.where(small, 1.0, tb / np.expm1(tb))
    out = np.where(small, 1.0 / series, direct)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DirichletBC:
    value: float


@dataclass(frozen=True)
class ZeroDiffusiveFluxBC:
    """Zero-gradient end: only the advective flux w v n crosses it."""


@dataclass(frozen=True)
class AdrProblem:
    """One linear transport problem on the mesh.

    diffusion and velocity live on elements, reaction and source on
    nodes. Exactly one boundary condition per end.
    """

    mesh: object
    diffusion: np.ndarray = field(repr=False)   # (N-1,), must be > 0
    velocity: np.ndarray = field(repr=False)    # (N-1,)
    reaction: np.ndarray = field(repr=False)    # (N,), sigma >= 0
    source: np.ndarray = field(repr=False)      # (N,)
    bc_left: object = ZeroDiffusiveFluxBC()
    bc_right: object = ZeroDiffusiveFluxBC()

    def __post_init__(self):
        ne, n = self.mesh.n_elements, self.mesh.node_count
        for name, arr, size in (
            ("diffusion", self.diffusion, ne),
            ("velocity", self.velocity, ne),
            ("reaction", self.reaction, n),
            ("source", self.source, n),
        ):
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (size,):
                raise InvalidProblemError(
                    f"{name} has shape {arr.shape}, want ({size},)")
            object.__setattr__(self, name, arr)
        if np.any(self.diffusion <= 0.0):
            raise InvalidProblemError("diffusion must be positive on every element")
        for bc in (self.bc_left, self.bc_right):
            if not isinstance(bc, (DirichletBC, ZeroDiffusiveFluxBC)):
                raise InvalidProblemError(f"unsupported boundary spec {bc!r}")


def edge_coefficients(nodal_diffusion, nodal_velocity):
    """Per-element (D_e, v_e) from nodal fields.

    Harmonic mean for the diffusivity, arithmetic mean for the velocity.
    """
    d = np.asarray(nodal_diffusion, dtype=float)
    v = np.asarray(nodal_velocity, dtype=float)
    d_e = 2.0 * d[:-1] * d[1:] / (d[:-1] + d[1:])
    v_e = 0.5 * (v[:-1] + v[1:])
    return d_e, v_e


def assemble_adr(problem, dt, previous_field, mass_lumping=True):
    """Tridiagonal system of one backward-Euler step.

    dt = None selects steady mode (no mass term). Returns
    (lower, diag, upper, rhs). mass_lumping=False switches the time and
    reaction terms to the consistent linear-element mass matrix; this is
    intended for convergence studies only, as it forfeits the M-matrix
    property.
    """
    mesh = problem.mesh
    n, h = mesh.node_count, mesh.h
    prev = np.asarray(previous_field, dtype=float)
    if prev.shape != (n,):
        raise InvalidProblemError(f"previous field has shape {prev.shape}")

    d_e = problem.diffusion
    v_e = problem.velocity
    t_e = v_e * h / d_e
    g = d_e / h
    b_plus = g * bernoulli(t_e)    # multiplies w_{i+1} in the edge flux
    b_minus = g * bernoulli(-t_e)  # multiplies w_i

    lower = np.zeros(n - 1)
    diag = np.zeros(n)
    upper = np.zeros(n - 1)
    rhs = np.zeros(n)

    # flux divergence: row i gains J_{i,i+1} - J_{i-1,i}
    diag[:-1] += b_minus
    upper[:] = -b_plus
    diag[1:] += b_plus
    lower[:] = -b_minus

    inv_dt = 0.0 if dt is None else 1.0 / dt
    if mass_lumping:
        m = mesh.lumped_masses()
        diag += m * (inv_dt + problem.reaction)
        rhs += m * (inv_dt * prev + problem.source)
    else:
        # consistent mass: element block (h/6) [[2,1],[1,2]] applied to
        # the 1/dt, reaction and source terms
        sig = problem.reaction
        wl = (inv_dt + sig[:-1]) * h / 6.0
        wr = (inv_dt + sig[1:]) * h / 6.0
        diag[:-1] += 2.0 * wl
        diag[1:] += 2.0 * wr
        upper += wl
        lower += wr
        # previous field and source on the rhs (consistent load)
        fl = inv_dt * prev + problem.source
        rhs[:-1] += h / 6.0 * (2.0 * fl[:-1] + fl[1:])
        rhs[1:] += h / 6.0 * (fl[:-1] + 2.0 * fl[1:])

    # boundary terms
    if isinstance(problem.bc_left, ZeroDiffusiveFluxBC):
        diag[0] -= v_e[0]          # advective flux w v n with n = -1
    else:
        diag[0], upper[0] = 1.0, 0.0
        rhs[0] = problem.bc_left.value
    if isinstance(problem.bc_right, ZeroDiffusiveFluxBC):
        diag[-1] += v_e[-1]        # advective flux w v n with n = +1
    else:
        diag[-1], lower[-1] = 1.0, 0.0
        rhs[-1] = problem.bc_right.value

    return lower, diag, upper, rhs


def solve_adr(problem, dt, previous_field, mass_lumping=True):
    """Assemble and solve one step; returns the nodal field."""
    lower, diag, upper, rhs = assemble_adr(problem, dt, previous_field, mass_lumping)
    return solve_banded(tridiagonal_as_banded(lower, diag, upper), rhs)


# --- problem builders used by the coupling loop ----------------------

def interpolate_flux_to_nodes(mesh, element_flux):
    """Element-midpoint Darcy flux averaged onto nodes."""
    v = np.empty(mesh.node_count)
    v[0] = element_flux[0]
    v[-1] = element_flux[-1]
    v[1:-1] = 0.5 * (element_flux[:-1] + element_flux[1:])
    return v


def build_oxygen_problem(mesh, phi_lagged, c_lagged, u_new, u_prev,
                         v_darcy_new, dt, scenario, params):
    """Oxygen transport problem of one fixed-point sweep.

    phi_lagged is the stacked (4, N) species array at iterate m; the
    fluid velocity is v_fl = V/phi_fl + (u - u_prev)/dt. Zero diffusive
    flux at the scaffold wall, Dirichlet c_ext at the fluid interface.
    """
    phi_fl = 1.0 - phi_lagged.sum(axis=0)
    if np.min(phi_fl) <= EPS_PHI:
        raise NonphysicalStateError(
            f"lagged fluid fraction below {EPS_PHI}: min = {np.min(phi_fl)}")
    v_nodes = interpolate_flux_to_nodes(mesh, v_darcy_new)
    v_fl = v_nodes / phi_fl + (u_new - u_prev) / dt
    d_nodes = nutrient_diffusivity(phi_fl, params)
    d_e, v_e = edge_coefficients(d_nodes, v_fl)
    _, q_hat = oxygen_sink(phi_lagged[0], phi_lagged[1], phi_lagged[2],
                           c_lagged, params)
    return AdrProblem(
        mesh=mesh,
        diffusion=d_e,
        velocity=v_e,
        reaction=-q_hat,
        source=np.zeros(mesh.node_count),
        bc_left=ZeroDiffusiveFluxBC(),
        bc_right=DirichletBC(scenario.c_ext(params)),
    )


def build_species_problem(eta, mesh, sigma_row, source_row, u_new, u_prev,
                          dt, params):
    """Population-balance problem for one species of the (n,v,q,ecm) set.

    sigma_row / source_row are the nodal consumption diagonal and
    production row already evaluated from lagged fractions and the fresh
    oxygen/stress fields. Advection is the solid velocity; both ends are
    zero-diffusive-flux (phases leave only by advection).
    """
    v_s = (u_new - u_prev) / dt
    d_nodes = np.full(mesh.node_count, params.D_eta)
    d_e, v_e = edge_coefficients(d_nodes, v_s)
    return AdrProblem(
        mesh=mesh,
        diffusion=d_e,
        velocity=v_e,
        reaction=sigma_row,
        source=source_row,
        bc_left=ZeroDiffusiveFluxBC(),
        bc_right=ZeroDiffusiveFluxBC(),
    )
