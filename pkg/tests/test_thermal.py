import math

import numpy as np
import pytest

from officesim.errors import ConfigError, NumericError
from officesim.thermal import (
    Boundary,
    ZoneParams,
    ZoneState,
    build_network,
    load_envelope_table,
    solve_step,
    steady_state,
    step,
    step_heat_flows,
    with_overrides,
)


@pytest.fixture(scope="module")
def south():
    return build_network("4A")[1]


def test_equilibrium_is_fixed_point(south):
    s = ZoneState(20.0, 20.0)
    assert step(s, south, Boundary(outdoor=20.0), 600) == s


def test_runs_to_closed_form_steady_state(south):
    b = Boundary(outdoor=5.0, solar=300.0, internal_gains=1500.0, hvac_sensible=-400.0, ventilation_ach=0.5)
    # hand-derived: at equilibrium all heat leaves through g_out, and the mass
    # node sits above the air by the solar input over the coupling conductance
    g = south.envelope_ua + 1.2 * 1005.0 * south.volume * (south.infiltration_ach + 0.5) / 3600.0
    q_solar = 300.0 * south.window_solar_aperture * 0.4
    ta = 5.0 + (1500.0 - 400.0 + q_solar) / g
    tm = ta + q_solar / south.mass_coupling
    exact = steady_state(south, b)
    assert exact.air_temperature == pytest.approx(ta, rel=1e-12)
    assert exact.mass_temperature == pytest.approx(tm, rel=1e-12)
    s = ZoneState(20.0, 20.0)
    for _ in range(20000):
        s = step(s, south, b, 900)
    assert abs(s.air_temperature - ta) <= 1e-6 * abs(ta)
    assert abs(s.mass_temperature - tm) <= 1e-6 * abs(tm)


def _one_node(ua=100.0, c=3.6e5):
    return ZoneParams(
        zone_id="box", floor_area=10.0, volume=1.0, air_capacitance=c, mass_capacitance=1.0,
        envelope_ua=ua, mass_coupling=0.0, infiltration_ach=0.0, window_solar_aperture=0.0,
        ventilation_max_ach=0.0,
    )


def test_one_node_matches_discrete_closed_form():
    p = _one_node()
    dt = 300.0
    s = ZoneState(30.0, 30.0)
    for n in range(1, 25):
        s = step(s, p, Boundary(outdoor=10.0), dt)
        exact = 10.0 + 20.0 * (1.0 + dt * p.envelope_ua / p.air_capacitance) ** (-n)
        assert s.air_temperature == pytest.approx(exact, rel=1e-12)


def test_one_node_matches_exponential_at_time_constant():
    ua, c = 100.0, 3.6e5
    tau = c / ua
    n = 1_000_000
    dt = tau / n
    ta, tm = 1.0, 0.0
    for _ in range(n):
        ta, tm = solve_step(ta, tm, c, 1.0, ua, 0.0, 0.0, 0.0, 0.0, dt)
    # backward Euler error at t = tau is about 1/(2n) relative
    assert abs(ta - math.exp(-1.0)) / math.exp(-1.0) <= 1e-6


@pytest.mark.parametrize("dt", [60.0, 600.0, 900.0])
def test_energy_balance_per_step(south, dt):
    rng = np.random.default_rng(1)
    s = ZoneState(24.0, 22.0)
    for _ in range(200):
        b = Boundary(
            outdoor=rng.uniform(-10, 40), solar=rng.uniform(0, 900), internal_gains=rng.uniform(0, 3000),
            hvac_sensible=rng.uniform(-8000, 5000), ventilation_ach=rng.choice([0.0, 2.0]),
        )
        nxt = step(s, south, b, dt)
        stored = (south.air_capacitance * (nxt.air_temperature - s.air_temperature)
                  + south.mass_capacitance * (nxt.mass_temperature - s.mass_temperature))
        flows = dt * step_heat_flows(s, nxt, south, b)
        scale = max(abs(stored), abs(flows), 1.0)
        assert abs(stored - flows) <= 1e-9 * scale
        s = nxt


def test_free_float_stays_within_bounds(south):
    rng = np.random.default_rng(7)
    outdoor = rng.uniform(-5, 35, 500)
    s = ZoneState(18.0, 25.0)
    lo = min(18.0, 25.0, outdoor.min())
    hi = max(18.0, 25.0, outdoor.max())
    for t in outdoor:
        s = step(s, south, Boundary(outdoor=float(t)), 600)
        assert lo - 1e-12 <= s.air_temperature <= hi + 1e-12
        assert lo - 1e-12 <= s.mass_temperature <= hi + 1e-12


def test_network_geometry_and_ordering():
    net = {z.zone_id: z for z in build_network("4A")}
    assert sum(z.floor_area for z in net.values()) == pytest.approx(511.0, rel=0.01)
    env = load_envelope_table()["4A"]
    core = net["core"]
    assert core.envelope_ua == pytest.approx(env.roof_u * core.floor_area, rel=1e-12)
    assert core.window_solar_aperture == 0.0
    ua_2b = sum(z.envelope_ua for z in build_network("2B"))
    ua_6a = sum(z.envelope_ua for z in build_network("6A"))
    assert ua_2b >= ua_6a


def test_envelope_u_values_do_not_loosen_with_colder_zones():
    table = load_envelope_table()
    order = ["1A", "2A", "2B", "3A", "3B", "3C", "4A", "4B", "4C", "5A", "5B", "6A", "6B", "7"]
    walls = [table[z].wall_u for z in order if z in table]
    roofs = [table[z].roof_u for z in order if z in table]
    assert all(a >= b for a, b in zip(walls, walls[1:]))
    assert all(a >= b for a, b in zip(roofs, roofs[1:]))


def test_unknown_zone_and_bad_dt(south):
    with pytest.raises(ConfigError):
        build_network("9Z")
    with pytest.raises(ConfigError):
        step(ZoneState(20, 20), south, Boundary(outdoor=20), 901)
    with pytest.raises(ConfigError):
        step(ZoneState(20, 20), south, Boundary(outdoor=20), 0)


def test_non_finite_boundary_is_numeric_error(south):
    with pytest.raises(NumericError):
        step(ZoneState(20, 20), south, Boundary(outdoor=float("nan")), 600)
    with pytest.raises(NumericError):
        step(ZoneState(20, 20), south, Boundary(outdoor=20, internal_gains=float("inf")), 600)


def test_singular_steady_state(south):
    p = with_overrides(_one_node(), mass_coupling=0.0, window_solar_aperture=1.0)
    with pytest.raises(NumericError):
        steady_state(p, Boundary(outdoor=10.0, solar=500.0))


def test_invalid_params_rejected():
    with pytest.raises(ConfigError):
        with_overrides(_one_node(), envelope_ua=0.0)
