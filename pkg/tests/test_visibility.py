from __future__ import annotations

import math

import numpy as np
import pytest

from gravidec import (
    InternalStateSpec,
    PhysicalConstants,
    SchwarzschildSpec,
    SuperpositionConfig,
    VisibilityCurve,
    decoherence_time,
    decoherence_time_schwarzschild,
    default_constants,
    exact_visibility,
    gaussian_visibility,
    hawking_temperature,
    highT_visibility,
    natural_units,
    proper_time_lab,
    redshifted_frequency,
    visibility_curve,
)
from gravidec.constants import SOLAR_MASS
from gravidec.errors import DomainError

CONSTS = default_constants()


def _omega_for_nbar(nbar: float, temperature: float) -> float:
    """Angular frequency at which a thermal mode has the requested occupation."""
    return math.log1p(1.0 / nbar) * CONSTS.k_B * temperature / CONSTS.hbar


def test_exact_visibility_single_mode_frozen():
    # nbar = 1, omega*dtau = 0.2: V = (1 + 8 sin^2 0.1)^(-1/2)
    w = _omega_for_nbar(1.0, 300.0)
    spec = InternalStateSpec.from_frequencies((w,), 300.0)
    v = exact_visibility(spec, 0.2 / w, CONSTS)
    assert math.isclose(v, 0.9623691086642649, rel_tol=1e-12)


def test_exact_visibility_three_modes_frozen():
    """Product of single-mode factors at (nbar, phase) = (.5,.1), (1,.2), (2,.3)."""
    t = 300.0
    product = 1.0
    for nbar, delta in ((0.5, 0.1), (1.0, 0.2), (2.0, 0.3)):
        w = _omega_for_nbar(nbar, t)
        spec = InternalStateSpec.from_frequencies((w,), t)
        product *= exact_visibility(spec, delta / w, CONSTS)
    assert math.isclose(product, 0.7736245429834346, rel_tol=1e-12)


def test_exact_visibility_factorizes_over_modes():
    t = 120.0
    freqs = (3e11, 7e11, 1.9e12)
    dtau = 2e-13
    v = exact_visibility(InternalStateSpec.from_frequencies(freqs, t), dtau, CONSTS)
    product = 1.0
    for w in freqs:
        product *= exact_visibility(InternalStateSpec.from_frequencies((w,), t), dtau, CONSTS)
    assert math.isclose(v, product, rel_tol=1e-12)


def test_exact_visibility_is_even_and_bounded():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n_modes = int(rng.integers(1, 5))
        t = float(10 ** rng.uniform(0.5, 3))
        freqs = tuple(
            float(_omega_for_nbar(10 ** rng.uniform(-2, 0.7), t)) for _ in range(n_modes)
        )
        spec = InternalStateSpec.from_frequencies(freqs, t)
        dtau = float(rng.uniform(0.0, 0.5) / max(freqs))
        v = exact_visibility(spec, dtau, CONSTS)
        assert 0.0 <= v <= 1.0
        assert v == exact_visibility(spec, -dtau, CONSTS)
    assert exact_visibility(spec, 0.0, CONSTS) == 1.0


def test_exact_visibility_zero_temperature():
    spec = InternalStateSpec.from_frequencies((1e12,), 0.0)
    assert exact_visibility(spec, 123.0, CONSTS) == 1.0


def test_exact_visibility_rejects_marker_and_mode_limit():
    marker = InternalStateSpec.high_temperature_limit(10.0, 300.0)
    with pytest.raises(DomainError):
        exact_visibility(marker, 1e-12, CONSTS)
    spec = InternalStateSpec.from_frequencies((1e12, 2e12, 3e12), 300.0)
    with pytest.raises(DomainError):
        exact_visibility(spec, 1e-12, CONSTS, mode_limit=2)


def test_high_t_visibility_convergence_to_inverse_e():
    """At N theta^2 = 2 the high-T law approaches 1/e with error ~ 1/N."""
    nat = natural_units()
    prev = None
    for n in (1e2, 1e4, 1e6):
        v = highT_visibility(n, 1.0, 1.0, 1.0, math.sqrt(2.0 / n), nat)
        err = abs(v - math.exp(-1.0)) / math.exp(-1.0)
        assert err < 2.0 / n
        if prev is not None:
            assert err < prev
        prev = err


def test_high_t_visibility_at_decoherence_time():
    # lab-scale parameters: V(tau_dec) = 1/e to high accuracy at N = 1e23
    n, t, dx, g = 1e23, 300.0, 1e-3, 9.81
    tau = decoherence_time(n, t, dx, g, CONSTS)
    v = highT_visibility(n, t, dx, g, tau, CONSTS)
    assert math.isclose(v, math.exp(-1.0), rel_tol=1e-6)


def test_high_t_visibility_monotone_noninc():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = 10 ** rng.uniform(1, 20)
        t = 10 ** rng.uniform(0, 3)
        dx = 10 ** rng.uniform(-9, -2)
        g = 10 ** rng.uniform(-1, 2)
        tt = 10 ** rng.uniform(-8, 0)
        base = highT_visibility(n, t, dx, g, tt, CONSTS)
        k = float(rng.uniform(1.1, 4.0))
        assert highT_visibility(n, t, dx, g, k * tt, CONSTS) <= base
        assert highT_visibility(n, k * t, dx, g, tt, CONSTS) <= base
        assert highT_visibility(n, t, k * dx, g, tt, CONSTS) <= base
        assert highT_visibility(n, t, dx, k * g, tt, CONSTS) <= base
        assert highT_visibility(k * n, t, dx, g, tt, CONSTS) <= base


def test_high_t_visibility_even_in_delta_x():
    v_pos = highT_visibility(1e10, 300.0, 1e-4, 9.81, 1e-3, CONSTS)
    v_neg = highT_visibility(1e10, 300.0, -1e-4, 9.81, 1e-3, CONSTS)
    assert v_pos == v_neg


def test_gaussian_matches_high_t_at_small_theta():
    n, t, dx, g = 1e23, 300.0, 1e-3, 9.81
    tau = decoherence_time(n, t, dx, g, CONSTS)
    for frac in (0.1, 0.5, 1.0, 2.0):
        vg = gaussian_visibility(n, t, dx, g, frac * tau, CONSTS)
        vh = highT_visibility(n, t, dx, g, frac * tau, CONSTS)
        assert math.isclose(vg, vh, rel_tol=1e-10)
        assert math.isclose(vg, math.exp(-(frac**2)), rel_tol=1e-12)


def test_decoherence_time_frozen_value():
    tau = decoherence_time(1e23, 300.0, 1e-3, 9.81, CONSTS)
    assert math.isclose(tau, 1.04317944179253e-06, rel_tol=1e-13)


def test_decoherence_time_degenerate_inputs_tagged_infinite():
    assert decoherence_time(0.0, 300.0, 1e-3, 9.81, CONSTS) == math.inf
    assert decoherence_time(1e23, 0.0, 1e-3, 9.81, CONSTS) == math.inf
    assert decoherence_time(1e23, 300.0, 0.0, 9.81, CONSTS) == math.inf
    assert decoherence_time(1e23, 300.0, 1e-3, 0.0, CONSTS) == math.inf
    # and the laws report no decoherence there
    assert highT_visibility(0.0, 300.0, 1e-3, 9.81, 1.0, CONSTS) == 1.0
    assert gaussian_visibility(1e23, 0.0, 1e-3, 9.81, 1.0, CONSTS) == 1.0


def test_decoherence_time_rejects_negative():
    with pytest.raises(DomainError):
        decoherence_time(-1.0, 300.0, 1e-3, 9.81, CONSTS)
    with pytest.raises(DomainError):
        decoherence_time(1e23, -300.0, 1e-3, 9.81, CONSTS)


def test_decoherence_time_sign_independent():
    a = decoherence_time(1e23, 300.0, 1e-3, 9.81, CONSTS)
    assert decoherence_time(1e23, 300.0, -1e-3, 9.81, CONSTS) == a
    assert decoherence_time(1e23, 300.0, 1e-3, -9.81, CONSTS) == a


def test_scaling_ratios_exact():
    # linear in 1/dx and in 1/sqrt(N): the ratios are exact in float arithmetic
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = 10 ** rng.uniform(2, 23)
        t = 10 ** rng.uniform(0, 3)
        dx = 10 ** rng.uniform(-9, -2)
        g = 10 ** rng.uniform(-1, 2)
        assert decoherence_time(n, t, dx, g, CONSTS) / decoherence_time(
            n, t, 2 * dx, g, CONSTS
        ) == 2.0
        assert decoherence_time(n, t, dx, g, CONSTS) / decoherence_time(
            4 * n, t, dx, g, CONSTS
        ) == 2.0


def test_natural_units_identity():
    nat = natural_units()
    # exact with power-of-two inputs
    tau = decoherence_time(8.0, 4.0, 0.5, 2.0, nat)
    assert tau * 4.0 * 2.0 * 0.5 * math.sqrt(8.0 / 2.0) == 1.0
    rng = np.random.default_rng(23)
    for _ in range(20):
        n, t, dx, g = (float(10 ** rng.uniform(-2, 6)) for _ in range(4))
        tau = decoherence_time(n, t, dx, g, nat)
        assert math.isclose(tau * t * g * dx * math.sqrt(n / 2.0), 1.0, rel_tol=1e-12)


def test_schwarzschild_frozen_values():
    sw = SchwarzschildSpec(5 * SOLAR_MASS, 14770.632775277025)
    assert math.isclose(sw.schwarzschild_radius(CONSTS), 14770.632775277025, rel_tol=1e-15)
    with pytest.warns(UserWarning):
        tau = decoherence_time_schwarzschild(1e23, 1.0, 1e-9, sw, CONSTS)
    assert math.isclose(tau, 1.0091064278082099e-09, rel_tol=1e-12)


def test_schwarzschild_matches_local_acceleration_form():
    m = 5 * SOLAR_MASS
    r = 1e9  # comfortably weak-field
    sw = SchwarzschildSpec(m, r)
    g_local = CONSTS.G * m / r**2
    a = decoherence_time_schwarzschild(1e20, 4.0, 1e-6, sw, CONSTS)
    b = decoherence_time(1e20, 4.0, 1e-6, g_local, CONSTS)
    assert math.isclose(a, b, rel_tol=1e-12)


def test_schwarzschild_domain():
    sw = SchwarzschildSpec(5 * SOLAR_MASS, 1.0)  # inside the horizon
    with pytest.raises(DomainError):
        decoherence_time_schwarzschild(1e23, 1.0, 1e-9, sw, CONSTS)
    with pytest.raises(DomainError):
        SchwarzschildSpec(0.0, 1.0)


def test_hawking_temperature_frozen():
    assert math.isclose(
        hawking_temperature(SOLAR_MASS, CONSTS), 6.168429712630827e-08, rel_tol=1e-13
    )
    # twice the mass, half the temperature
    assert math.isclose(
        hawking_temperature(2 * SOLAR_MASS, CONSTS),
        0.5 * hawking_temperature(SOLAR_MASS, CONSTS),
        rel_tol=1e-15,
    )


def test_redshifted_frequency_signs():
    w = 1e12
    assert redshifted_frequency(w, 0.0, CONSTS) == w
    assert redshifted_frequency(w, -9.81, CONSTS) < w  # below reference height
    assert redshifted_frequency(w, +9.81, CONSTS) > w


def test_proper_time_lab_frozen():
    dtau = proper_time_lab(1.0, 9.81, 1.0, CONSTS)
    assert math.isclose(dtau, 1.0915097049885998e-16, rel_tol=1e-15)


def test_high_t_collapse_pointwise():
    # one spot check of the frequency-independence; the acceptance suite sweeps it
    t = 300.0
    w = 1e-3 * CONSTS.k_B * t / CONSTS.hbar
    n_modes = 3
    spec = InternalStateSpec.from_frequencies((w, 0.7 * w, 0.4 * w), t)
    dtau = 1e-3 / w
    v_exact = exact_visibility(spec, dtau, CONSTS)
    theta = CONSTS.k_B * t * dtau / CONSTS.hbar
    v_high = math.exp(-0.5 * n_modes * math.log1p(theta * theta))
    assert abs(math.log(v_exact) - math.log(v_high)) / abs(math.log(v_high)) < 1e-2


def test_superposition_config():
    cfg = SuperpositionConfig.from_positions(1e-22, 0.0, 1e-3, 1.0)
    assert cfg.delta_x == 1e-3
    with pytest.raises(DomainError):
        SuperpositionConfig(mass=1e-22, x1=0.0, x2=1e-3, delta_x=2e-3, hold_time=1.0)
    with pytest.raises(DomainError):
        SuperpositionConfig.from_positions(0.0, 0.0, 1e-3, 1.0)


def test_visibility_curve_validation():
    with pytest.raises(DomainError):
        VisibilityCurve(times=np.array([0.0, 1.0]), values=np.array([1.0, 0.5]), law="nope")
    with pytest.raises(DomainError):
        VisibilityCurve(times=np.array([1.0, 0.0]), values=np.array([0.5, 1.0]), law="high-T")
    with pytest.raises(DomainError):
        VisibilityCurve(times=np.array([0.0, 1.0]), values=np.array([1.0, 1.5]), law="high-T")
    with pytest.raises(DomainError):
        VisibilityCurve(times=np.array([0.0, 1.0]), values=np.array([0.9, 0.5]), law="high-T")


def test_visibility_curve_laws():
    times = np.linspace(0.0, 2e-6, 20)
    for law in ("high-T", "gaussian"):
        curve = visibility_curve(law, times, 1e23, 300.0, 1e-3, 9.81, CONSTS)
        assert curve.law == law
        assert curve.values[0] == 1.0
        assert np.all(np.diff(curve.values) <= 0)
    w = _omega_for_nbar(0.5, 300.0)
    curve = visibility_curve(
        "exact-product", times, 1.0, 300.0, 1e-3, 9.81, CONSTS, frequencies=(w,)
    )
    assert curve.law == "exact-product"
    with pytest.raises(DomainError):
        visibility_curve("exact-product", times, 1.0, 300.0, 1e-3, 9.81, CONSTS)
    with pytest.raises(DomainError):
        visibility_curve("master-equation", times, 1.0, 300.0, 1e-3, 9.81, CONSTS)
