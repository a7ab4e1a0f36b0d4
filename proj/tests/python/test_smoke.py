import math

import kdvspec


def test_hierarchy_text():
    assert kdvspec.hierarchy_f(1) == "1/2*V + c1"
    assert kdvspec.hierarchy_skdv(0) == "-V_x"
    assert kdvspec.hierarchy_H(0) == "z - V"
    assert kdvspec.verify_identities(1)


def test_c_from_E():
    E = [1 + 0j, 2 + 0j, 3 + 0j]
    assert abs(kdvspec.c_from_E(E, 1) + 3.0) < 1e-12


def test_curve_and_trace():
    c = kdvspec.Curve([-1 + 0j, 0j, 1 + 0j])
    assert c.genus == 1
    assert c.basis_verified
    assert abs(c.lam[0] - 0.456946581) < 1e-6
    assert abs(c.phi(-0.5 + 0j)) < 1e-8
    res = c.trace()
    assert len(res["arcs"]) == 2
    assert sum(1 for a in res["arcs"] if a["semi_infinite"]) == 1
    assert not res["crossings"]


def test_lame_scenario():
    s = kdvspec.lame(1 + 0j, 1j)
    assert abs(s.lambda1_expected - math.pi / 4) < 1e-12
    c = kdvspec.Curve(s.branch_points)
    assert abs(c.lam[0] - math.pi / 4) < 1e-8
    assert abs(c.mean_V + math.pi / 2) < 1e-7


def test_crossing_scenario():
    s = kdvspec.lame(1 - 0.85j, 0j, variant="conjugate_pair")
    c = kdvspec.Curve(s.branch_points)
    res = c.trace()
    assert len(res["crossings"]) == 1
    dirs = res["crossings"][0]["directions"]
    assert len(dirs) == 4
    assert abs((dirs[1] - dirs[0]) - math.pi / 2) < 1e-6


def test_free_discriminant():
    d = kdvspec.discriminant(math.pi, lambda x: 0j, 1 + 0j)
    assert abs(d - math.cos(math.pi)) < 1e-8


def test_weierstrass():
    # lemniscatic lattice: wp at the middle half-period vanishes
    assert abs(kdvspec.wp(1 + 0j, 1j, 1 + 1j)) < 1e-10
    assert abs(kdvspec.wzeta(1 + 0j, 1j, 1 + 0j) - math.pi / 4) < 1e-12
