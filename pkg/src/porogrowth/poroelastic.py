"""Linearized poroelastic saddle-point solve of one fixed-point sweep.

Unknowns are the nodal pairs (u_i, p_i), interleaved so the assembled
matrix stays banded with kl = ku = 3. Equal-order continuous piecewise
linear interpolation is used for both fields; element coefficients are
evaluated at midpoints as the mean of the nodal values.

Weak form, with test functions w (momentum) and q (continuity):

    int a u' w' - int p w' = T_b w(L) + int G w' - int f_u w
    int K p' q' + (1/dt) int u' q = (1/dt) int (u_prev)' q
                                    - V_b q(end) + int f_p q

where a = H_A phi_s, G = H_A g_n phi_n + H_B sum(phi_eta g_eta), and
f_u, f_p are optional manufactured-solution forcings. Essential rows
(u = 0 at the wall, p = 0 on the Dirichlet side) are replaced.
"""

from dataclasses import dataclass, field

import numpy as np

from .constitutive import permeability
from .errors import NonphysicalStateError
from .linalg import BandedMatrix, solve_banded
from .params import EPS_PHI


@dataclass
class PoroelasticSystem:
    """Assembled interleaved system plus the data needed to postprocess."""

    mesh: object
    matrix: BandedMatrix = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    permeability_e: np.ndarray = field(repr=False)  # per-element K
    bc_record: dict = field(default_factory=dict)


def _midpoint(values):
    return 0.5 * (values[:-1] + values[1:])


def assemble(mesh, phi_lagged, g_lagged, u_prev, dt, t_b, v_b, params,
             forcing_u=None, forcing_p=None, dirichlet_side="left"):
    """Assemble one sweep's linear system.

    phi_lagged is the stacked (4, N) species array, g_lagged the stacked
    (4, N) growth distortions, u_prev the displacement at the previous
    time level. dt = None drops the strain-rate coupling (steady mode).
    dirichlet_side picks which end carries p = 0; the Darcy velocity
    datum v_b applies at the opposite end.
    """
    n = mesh.node_count
    h = mesh.h
    phi_fl = 1.0 - phi_lagged.sum(axis=0)
    if np.min(phi_fl) <= EPS_PHI or np.max(phi_fl) >= 1.0:
        raise NonphysicalStateError(
            f"lagged fluid fraction out of range: [{np.min(phi_fl)}, {np.max(phi_fl)}]")
    phi_s = 1.0 - phi_fl

    a_e = params.H_A * _midpoint(phi_s)
    k_e = permeability(_midpoint(phi_fl), params)
    growth = (
        params.H_A * g_lagged[0] * phi_lagged[0]
        + params.H_B * (
            g_lagged[1] * phi_lagged[1]
            + g_lagged[2] * phi_lagged[2]
            + g_lagged[3] * phi_lagged[3])
    )
    g_e = _midpoint(growth)
    inv_dt = 0.0 if dt is None else 1.0 / dt

    matrix = BandedMatrix(n=2 * n, kl=3, ku=3)
    rhs = np.zeros(2 * n)
    band = matrix.data
    ku = matrix.ku

    def add_entries(rows, cols, values):
        np.add.at(band, (ku + rows - cols, cols), values)

    e = np.arange(n - 1)
    iu, ip = 2 * e, 2 * e + 1          # left-node dof indices
    ju, jp = iu + 2, ip + 2            # right-node dof indices
    ones = np.ones(n - 1)

    # momentum rows: int a u' w' - int p w'
    add_entries(iu, iu, a_e / h)
    add_entries(iu, ju, -a_e / h)
    add_entries(ju, ju, a_e / h)
    add_entries(ju, iu, -a_e / h)
    add_entries(iu, ip, 0.5 * ones)
    add_entries(iu, jp, 0.5 * ones)
    add_entries(ju, ip, -0.5 * ones)
    add_entries(ju, jp, -0.5 * ones)
    # growth prestress on the rhs: + int G w'
    np.add.at(rhs, iu, -g_e)
    np.add.at(rhs, ju, g_e)

    # continuity rows: int K p' q' + (1/dt) int u' q
    add_entries(ip, ip, k_e / h)
    add_entries(ip, jp, -k_e / h)
    add_entries(jp, jp, k_e / h)
    add_entries(jp, ip, -k_e / h)
    for row in (ip, jp):
        add_entries(row, iu, -0.5 * inv_dt * ones)
        add_entries(row, ju, 0.5 * inv_dt * ones)
    du_prev = 0.5 * inv_dt * np.diff(u_prev)
    np.add.at(rhs, ip, du_prev)
    np.add.at(rhs, jp, du_prev)

    # natural boundary data
    rhs[2 * (n - 1)] += t_b
    if dirichlet_side == "left":
        rhs[2 * (n - 1) + 1] -= v_b
    else:
        rhs[1] -= v_b

    # optional manufactured forcings (trapezoid load)
    weights = mesh.lumped_masses()
    if forcing_u is not None:
        rhs[0::2] -= weights * np.asarray(forcing_u, dtype=float)
    if forcing_p is not None:
        rhs[1::2] += weights * np.asarray(forcing_p, dtype=float)

    # essential rows
    matrix.zero_row(0)
    matrix.set(0, 0, 1.0)
    rhs[0] = 0.0
    p_row = 1 if dirichlet_side == "left" else 2 * (n - 1) + 1
    matrix.zero_row(p_row)
    matrix.set(p_row, p_row, 1.0)
    rhs[p_row] = 0.0

    return PoroelasticSystem(
        mesh=mesh, matrix=matrix, rhs=rhs, permeability_e=k_e,
        bc_record={"T_b": t_b, "V_b": v_b, "dirichlet_side": dirichlet_side})


def solve(system):
    """Solve for (u, p) and the per-element Darcy flux V = -K p'."""
    x = solve_banded(system.matrix, system.rhs)
    u = x[0::2]
    p = x[1::2]
    v = -system.permeability_e * np.diff(p) / system.mesh.h
    return u, p, v
