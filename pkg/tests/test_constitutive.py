import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porogrowth import constitutive as con
from porogrowth.errors import NonphysicalStateError, SingularPermeabilityError
from porogrowth.params import ModelParams

PARAMS = ModelParams()


# --- permeability -----------------------------------------------------

def test_permeability_shape_values():
    assert con.permeability_shape(0.5) == pytest.approx(0.5)
    assert con.permeability_shape(0.9) == pytest.approx(8.1)
    assert con.permeability_shape(0.0) == 0.0


def test_permeability_scaling():
    assert con.permeability(0.9, PARAMS) == pytest.approx(8.1 * PARAMS.K_ref)


def test_permeability_monotone_in_phi_fl():
    phi = np.linspace(0.05, 0.95, 50)
    psi = con.permeability_shape(phi)
    assert np.all(np.diff(psi) > 0.0)


@pytest.mark.parametrize("phi", [-0.1, 1.0, 1.2])
def test_permeability_singular_or_negative(phi):
    with pytest.raises(SingularPermeabilityError):
        con.permeability_shape(phi)


# --- diffusivity --------------------------------------------------------

def test_diffusivity_limits():
    # pure fluid recovers the fluid value; pure solid the partitioned one
    assert con.nutrient_diffusivity(1.0, PARAMS) == pytest.approx(PARAMS.D_c_fl)
    assert con.nutrient_diffusivity(0.0, PARAMS) == pytest.approx(
        PARAMS.K_eq * PARAMS.D_c_s)


def test_diffusivity_monotone_and_bounded():
    phi = np.linspace(0.0, 1.0, 101)
    d = con.nutrient_diffusivity(phi, PARAMS)
    lo = PARAMS.K_eq * PARAMS.D_c_s
    assert np.all(np.diff(d) > 0.0)
    assert np.all(d >= lo - 1e-20)
    assert np.all(d <= PARAMS.D_c_fl + 1e-20)


def test_diffusivity_mixture_value():
    # k = 0.075: D(0.9) = D_fl (0.225 + 1.665) / (3 - 0.8325)
    expected = 1e-5 * (3 * 0.075 - 2 * 0.9 * (0.075 - 1)) / (3 + 0.9 * (0.075 - 1))
    assert con.nutrient_diffusivity(0.9, PARAMS) == pytest.approx(expected)


# --- stress -------------------------------------------------------------

def random_stress_inputs(rng):
    u_x = rng.uniform(-1e-3, 1e-3)
    p = rng.uniform(-10.0, 10.0)
    phis = rng.uniform(0.0, 0.05, size=4)
    phi_s = phis.sum()
    g = rng.uniform(-1e-3, 1e-3, size=4)
    return u_x, p, phi_s, phis, g


def test_stress_identities_randomized():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        u_x, p, phi_s, phis, g = random_stress_inputs(rng)
        s = con.total_stress(u_x, p, phi_s, *phis, *g, PARAMS)
        # r mu = |tau_max|
        assert abs(s.r * PARAMS.mu - abs(s.tau_max)) <= 1e-12 * (abs(s.tau_max) + 1e-30)
        # Frobenius norm of the anisotropic stress part is 2 mu r; the
        # difference of the principal stresses carries their cancellation
        # error, so scale by their magnitude
        t_aniso = abs(s.sigma_I - s.sigma_II)
        scale = abs(s.sigma_I) + abs(s.sigma_II) + 1e-30
        assert abs(t_aniso - 2.0 * PARAMS.mu * s.r) <= 1e-12 * scale
        # r matches the standalone indicator
        assert s.r == pytest.approx(
            con.anisotropy_r(phi_s, u_x, g[0], phis[0]), rel=1e-14, abs=1e-30)


def test_stress_axial_value():
    u_x, p = 1e-3, 2.0
    phis = (0.01, 0.02, 0.03, 0.04)
    g = (1e-4, 2e-4, 3e-4, 4e-4)
    phi_s = sum(phis)
    s = con.total_stress(u_x, p, phi_s, *phis, *g, PARAMS)
    dev = phi_s * u_x - g[0] * phis[0]
    iso = PARAMS.H_B * (phis[1] * g[1] + phis[2] * g[2] + phis[3] * g[3])
    assert s.T_xx == pytest.approx(PARAMS.H_A * dev - p - iso, rel=1e-14)
    assert s.sigma_I == s.T_xx


def test_pressure_offsets_axial_stress_only():
    # adding dp to the pore pressure shifts both principal stresses by
    # -dp and leaves the shear (and r) untouched
    s0 = con.total_stress(1e-3, 0.0, 0.04, 0.01, 0.01, 0.01, 0.01,
                          0.0, 0.0, 0.0, 0.0, PARAMS)
    s1 = con.total_stress(1e-3, 5.0, 0.04, 0.01, 0.01, 0.01, 0.01,
                          0.0, 0.0, 0.0, 0.0, PARAMS)
    assert s1.T_xx == pytest.approx(s0.T_xx - 5.0)
    assert s1.sigma_II == pytest.approx(s0.sigma_II - 5.0)
    assert s1.tau_max == pytest.approx(s0.tau_max)
    assert s1.r == pytest.approx(s0.r)


# --- switches -----------------------------------------------------------

def test_switch_Hr():
    r_bar = PARAMS.r_bar
    assert con.switch_Hr(2.0 * r_bar, r_bar) == 1
    assert con.switch_Hr(0.5 * r_bar, r_bar) == 0
    assert con.switch_Hr(r_bar, r_bar) == 0  # tie stays isotropic
    assert con.switch_Hr(2.0 * r_bar, r_bar, inverted=True) == 0
    arr = con.switch_Hr(np.array([0.0, 1.0]), r_bar)
    assert arr.tolist() == [0, 1]


def test_switch_Hc():
    assert con.switch_Hc(PARAMS.c_thr * 1.01, PARAMS.c_thr) == 1
    assert con.switch_Hc(PARAMS.c_thr, PARAMS.c_thr) == 0
    assert con.switch_Hc(0.0, PARAMS.c_thr) == 0


# --- kinetics -----------------------------------------------------------

def test_kinetics_matrix_sparsity_and_values():
    phi = np.array([0.01, 0.02, 0.03, 0.04])
    c = 4e-6
    k = con.kinetics(phi, 0.9, c, h_r=1, h_c=1, k_g=PARAMS.k_g1, params=PARAMS)
    monod = c / (PARAMS.K_sat + c)
    assert k.P[0, 0] == pytest.approx(0.9 * monod * PARAMS.k_g1)
    assert k.P[0, 2] == pytest.approx(PARAMS.beta)
    assert k.P[1, 2] == 0.0
    assert k.P[2, 0] == pytest.approx(1.0 / PARAMS.tau_m)
    assert k.P[2, 1] == pytest.approx(PARAMS.beta)
    expected_p42 = (c * PARAMS.E * PARAMS.k_GAG / PARAMS.V_cell
                    * (1.0 - 0.04 / PARAMS.phi_ecm_max))
    assert k.P[3, 1] == pytest.approx(expected_p42)
    # all other entries vanish
    mask = np.zeros((4, 4), dtype=bool)
    for ij in ((0, 0), (0, 2), (1, 2), (2, 0), (2, 1), (3, 1)):
        mask[ij] = True
    assert np.all(k.P[~mask] == 0.0)


def test_kinetics_cross_conservation_randomized():
    # the q-outflow beta splits between the two H_r channels and the
    # n-outflow 1/tau_m reappears as q production: consumption of the
    # donor always matches the matching production entries
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        phi = rng.uniform(0.0, 0.05, size=4)
        c = rng.uniform(0.0, 6.4e-6)
        h_r = int(rng.integers(0, 2))
        h_c = int(rng.integers(0, 2))
        k_g = rng.uniform(0.0, 1e-5)
        k = con.kinetics(phi, 1.0 - phi.sum(), c, h_r, h_c, k_g, PARAMS)
        starve = PARAMS.k_qui * (1 - h_c)
        # beta channel: P[0,2] + P[1,2] = beta, matching C[2,2] net of
        # starvation and apoptosis
        assert k.P[0, 2] + k.P[1, 2] == pytest.approx(PARAMS.beta, abs=1e-25)
        assert k.C[2, 2] == pytest.approx(
            PARAMS.beta + starve + PARAMS.k_apo, rel=1e-12)
        # tau_m channel: the n -> q transfer shows up on both sides
        assert k.P[2, 0] == pytest.approx(1.0 / PARAMS.tau_m)
        assert k.C[0, 0] == pytest.approx(1.0 / PARAMS.tau_m + starve, rel=1e-12)
        # v consumption mirrors its H_r production into q
        assert k.C[1, 1] == pytest.approx(
            k.P[2, 1] + starve + PARAMS.k_apo, rel=1e-12)


def test_kinetics_fields_matches_pointwise_matrices():
    rng = np.random.default_rng(3)
    n = 17
    phi = rng.uniform(0.0, 0.04, size=(4, n))
    phi_fl = 1.0 - phi.sum(axis=0)
    c = rng.uniform(1e-7, 6e-6, size=n)
    h_r = rng.integers(0, 2, size=n)
    h_c = rng.integers(0, 2, size=n)
    sigma, source = con.kinetics_fields(phi, phi_fl, c, h_r, h_c,
                                        PARAMS.k_g2, PARAMS)
    for i in range(n):
        k = con.kinetics(phi[:, i], phi_fl[i], c[i], int(h_r[i]),
                         int(h_c[i]), PARAMS.k_g2, PARAMS)
        assert np.allclose(source[:, i], k.P @ phi[:, i], rtol=1e-14)
        assert np.allclose(sigma[:, i], np.diag(k.C), rtol=1e-14)


def test_ecm_production_saturates():
    phi = np.array([0.01, 0.02, 0.0, PARAMS.phi_ecm_max + 0.01])
    k = con.kinetics(phi, 0.8, 5e-6, 1, 1, PARAMS.k_g1, PARAMS)
    assert k.P[3, 1] == 0.0


def test_kinetics_rejects_nonphysical():
    phi = np.array([0.01, 0.01, 0.01, 0.01])
    with pytest.raises(NonphysicalStateError):
        con.kinetics(phi, 1.0, 5e-6, 1, 1, 0.0, PARAMS)
    with pytest.raises(NonphysicalStateError):
        con.kinetics(-phi, 0.9, 5e-6, 1, 1, 0.0, PARAMS)
    with pytest.raises(NonphysicalStateError):
        con.kinetics(phi, 0.9, -1e-9, 1, 1, 0.0, PARAMS)


# --- oxygen sink --------------------------------------------------------

def test_oxygen_sink_value():
    q_c, q_hat = con.oxygen_sink(0.005, 0.001, 0.001, 3.2e-6, PARAMS)
    uptake = PARAMS.R_n * 0.005 + PARAMS.R_v * 0.001 + PARAMS.R_q * 0.001
    assert q_hat == pytest.approx(-uptake / 6.4e-6, rel=1e-14)
    assert q_c == pytest.approx(q_hat * 3.2e-6, rel=1e-14)
    assert q_c == pytest.approx(-uptake / 2.0, rel=1e-14)


def test_oxygen_sink_michaelis_menten_limits():
    # c >> K_half: sink saturates at the total uptake rate
    q_c, _ = con.oxygen_sink(0.01, 0.0, 0.0, 1.0, PARAMS)
    assert q_c == pytest.approx(-PARAMS.R_n * 0.01, rel=1e-5)
    # c = 0: no consumption
    q_c, q_hat = con.oxygen_sink(0.01, 0.0, 0.0, 0.0, PARAMS)
    assert q_c == 0.0
    assert q_hat < 0.0


@given(c=st.floats(min_value=0.0, max_value=1e-5),
       phi_n=st.floats(min_value=0.0, max_value=0.2))
@settings(max_examples=50, deadline=None)
def test_oxygen_sink_never_positive(c, phi_n):
    q_c, q_hat = con.oxygen_sink(phi_n, 0.0, 0.0, c, PARAMS)
    assert q_c <= 0.0
    assert q_hat <= 0.0


# --- growth distortion --------------------------------------------------

def test_growth_model_g0_holds_constant():
    g = np.array([1e-4, 2e-4])
    out = con.growth_distortion_step(g, np.array([0.1, 0.1]), 1e-6, 3600.0, "G0")
    assert np.array_equal(out, g)
    assert out is not g  # a copy, never an alias


def test_growth_model_g1_forward_euler():
    g = np.zeros(3)
    phi = np.array([0.1, 0.0, 0.1])
    out = con.growth_distortion_step(g, phi, 3e-6, 100.0, "G1")
    assert out[0] == pytest.approx(1e-4)
    assert out[1] == 0.0  # absent constituent never grows
    assert out[2] == pytest.approx(1e-4)


def test_growth_model_rejects_bad_inputs():
    with pytest.raises(ValueError):
        con.growth_distortion_step(np.zeros(2), np.zeros(2), 0.0, -1.0, "G0")
    with pytest.raises(ValueError):
        con.growth_distortion_step(np.zeros(2), np.zeros(2), 0.0, 1.0, "G7")
