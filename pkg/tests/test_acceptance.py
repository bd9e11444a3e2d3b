"""Acceptance gate: one printed PASS/FAIL line per criterion.

Every check runs at the stated scale. Seeds are fixed up front and are not
tuned to the outcome. Run with ``pytest -v -s tests/test_acceptance.py`` to
see only the gate, or as part of the full suite.
"""
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from discrete_poisson.geometry import DomainBox, center_nodes, chi_statistics, extract_contacts, generate
from discrete_poisson.homogenize import alpha_sweep, simulate, structure_tensor_check
from discrete_poisson.theory import (
    MaterialParams,
    OrientationDistribution,
    aux_integrals,
    closed_expectations,
    expectation_oracle,
    nu_interval,
    predict_cone,
    predict_general,
    predict_limit,
    stationary_gammas,
)

pytestmark = pytest.mark.slow

KINDS = ["voronoi", "rand-voronoi", "random", "centered"]
ALPHAS = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0]
DESK = DomainBox.from_size(75.0, 75.0)
GAMMA_GRID = [round(0.1 * k, 1) for k in range(1, 31)]
ORACLE_SEED = 20261019
DESK_SEED = 1


@pytest.fixture
def report(capsys):
    """Print the gate line outside pytest's capture, then assert."""
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def desk():
    out = {}
    for kind in KINDS:
        t = generate(kind, DESK, 1.0, DESK_SEED)
        out[kind] = (t, extract_contacts(t))
    return out


@pytest.fixture(scope="module")
def sweeps(desk):
    return {kind: alpha_sweep(t, ALPHAS, contacts=c) for kind, (t, c) in desk.items()}


def test_criterion_1_limits(report):
    expected = {"ps": (1 / 3, 2 / 3), "pe": (1 / 4, 5 / 8), "3d": (1 / 4, 1 / 2)}
    worst = 0.0
    for mode, (nu, e) in expected.items():
        r0, r1 = predict_limit(0.0, mode), predict_limit(1.0, mode)
        worst = max(worst, abs(r0.nu - nu), abs(r0.E - e), abs(r1.nu), abs(r1.E - 1.0))
    report(1, worst <= 1e-14, f"max deviation from the limit table {worst:.1e}")


def test_criterion_2_stationary(report):
    g2 = stationary_gammas(2)[-1]
    g3 = stationary_gammas(3)[1]
    target = {"ps": (g2, (-0.122, 0.098)), "pe": (g2, (-0.139, 0.089)), "3d": (g3, (-0.091, 0.034))}
    dev = []
    for mode, (g, (lo, hi)) in target.items():
        a, b = nu_interval(mode, gamma=g)
        dev.append(max(abs(min(a, b) - lo), abs(max(a, b) - hi)))
    ok = abs(g2 - 2.24670) <= 1e-4 and abs(g3 - 2.09440) <= 1e-4 and max(dev) <= 1e-3
    report(2, ok, f"gamma2={g2:.6f} gamma3={g3:.6f} max interval deviation {max(dev):.1e}")


def test_criterion_3_oracle(report):
    fails, worst_z, worst_m = [], 0.0, 0.0
    for dim in (2, 3):
        for k, gamma in enumerate(GAMMA_GRID):
            dist = OrientationDistribution.cone(gamma, dim)
            exact = closed_expectations(dist)
            est = expectation_oracle(dist, 1_000_000, seed=[ORACLE_SEED, dim, k])
            z = max(_max_z(exact.n_sym, est.n_sym, est.n_sym_se), _max_z(exact.t_sym, est.t_sym, est.t_sym_se))
            dm = abs(exact.m_vol - est.m_vol)
            worst_z, worst_m = max(worst_z, z), max(worst_m, dm)
            if z > 3.0 or dm > 5e-3:
                fails.append(f"d{dim}:g{gamma}:z{z:.2f}")
    report(3, not fails, f"60 rows, max z {worst_z:.2f}, max |dm_vol| {worst_m:.1e}, failing {fails}")


def _max_z(exact, est, se):
    diff, se = np.abs(exact - est), np.asarray(se)
    tiny = se <= 1e-15
    return float(np.where(tiny, np.where(diff <= 1e-12, 0.0, np.inf), diff / np.where(tiny, 1.0, se)).max())


def test_criterion_4_general_vs_cone(report):
    worst, checked = 0.0, 0
    for mode in ("ps", "pe", "3d"):
        dim = 3 if mode == "3d" else 2
        for gamma in GAMMA_GRID:
            i1, i2 = aux_integrals(OrientationDistribution.cone(gamma, dim))
            for alpha in ALPHAS:
                try:
                    cone = predict_cone(alpha, gamma, mode)
                except ValueError:
                    continue
                gen = predict_general(alpha, i1, i2, mode)
                worst = max(worst, abs(gen.nu - cone.nu), abs(gen.E - cone.E))
                checked += 1
    report(4, worst <= 1e-8, f"{checked} (mode, gamma, alpha) points, max deviation {worst:.1e}")


def test_criterion_5_voronoi_closed_loop(report):
    t = generate("voronoi", DomainBox.from_size(50.0, 50.0), 1.0, DESK_SEED)
    res = simulate(t, MaterialParams(1.0, 1.0), 1e-3, 0.0)
    nu, e = res.constants.nu, res.constants.E
    resid = max(res.residual_force, res.residual_moment)
    ok = abs(nu) <= 0.01 and abs(e - 1.0) <= 0.02 and resid < 1e-9
    report(5, ok, f"nu={nu:.2e} E/E0={e:.4f} residual={resid:.1e}")


def test_criterion_6_statistics(report):
    i1, i2 = {k: [] for k in KINDS[1:]}, {k: [] for k in KINDS[1:]}
    for seed in range(1, 11):
        rand = generate("random", DESK, 1.0, seed)
        for kind, t in (("rand-voronoi", generate("rand-voronoi", DESK, 1.0, seed)),
                        ("random", rand), ("centered", center_nodes(rand))):
            s = chi_statistics(extract_contacts(t))
            i1[kind].append(s.I1)
            i2[kind].append(s.I2)
    m1 = {k: float(np.mean(v)) for k, v in i1.items()}
    m2 = {k: float(np.mean(v)) for k, v in i2.items()}
    ok = (abs(m1["rand-voronoi"] - 0.977) <= 0.01 and abs(m2["rand-voronoi"] - 0.914) <= 0.03
          and abs(m2["random"] - 0.289) <= 0.05 and abs(m2["centered"] - 0.387) <= 0.05)
    report(6, ok, f"rand-voronoi I1={m1['rand-voronoi']:.4f} I2={m2['rand-voronoi']:.4f}; "
                  f"random I2={m2['random']:.4f}; centered I2={m2['centered']:.4f}")


def test_criterion_7_trend(report, sweeps):
    nu = {k: [r.nu_num for r in rows] for k, rows in sweeps.items()}
    a_ok = all(all(x > y for x, y in zip(v, v[1:])) for v in nu.values())
    v0 = {k: v[0] for k, v in nu.items()}
    b_ok = (v0["voronoi"] > v0["rand-voronoi"] > v0["centered"] >= v0["random"] - 0.01)
    c_ok = all(r.nu_num >= r.nu_pred for k in ("voronoi", "rand-voronoi") for r in sweeps[k] if r.alpha < 1)
    at01 = " ".join(f"{k}={v:.4f}" for k, v in v0.items())
    report(7, a_ok and b_ok and c_ok, f"(a) {a_ok} (b) {b_ok} (c) {c_ok}; nu at alpha=0.1: {at01}")


def test_criterion_8_structure_tensor(report, desk):
    errs = {}
    for kind, (_, c) in desk.items():
        worst = 0.0
        for alpha in (0.1, 1.0, 3.0):
            struct, analytic = structure_tensor_check(c, MaterialParams(1.0, alpha))
            worst = max(worst, float(np.abs(struct - analytic).max() / np.abs(analytic).max()))
        errs[kind] = worst
    detail = " ".join(f"{k}={v:.2%}" for k, v in errs.items())
    report(8, max(errs.values()) <= 0.01, f"max entrywise error relative to max entry: {detail}")


PROPERTY_TESTS = [
    "tests/test_geometry.py::TestTessellations::test_partition_closure",
    "tests/test_geometry.py::TestTessellations::test_volume_closure",
    "tests/test_solver.py::TestElementStiffness::test_symmetric_psd",
    "tests/test_solver.py::TestElementStiffness::test_rigid_modes_in_nullspace",
    "tests/test_solver.py::TestElementStiffness::test_energy_identity",
    "tests/test_solver.py::TestAssembly::test_global_rigid_nullspace",
    "tests/test_homogenize.py::TestExtractConstants::test_inverse_of_macro_tensor",
    "tests/test_geometry.py::TestTessellations::test_deterministic_serialization",
    "tests/test_geometry.py::TestPointPlacement::test_deterministic",
]


def test_criterion_9_property_suites(report):
    root = Path(__file__).resolve().parent.parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_TESTS],
                          cwd=root, capture_output=True, text=True)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(9, proc.returncode == 0, summary)


def test_criterion_10_governing_node(report):
    rand = generate("random", DESK, 1.0, DESK_SEED)
    cent = center_nodes(rand)
    params = MaterialParams(1.0, 1.0)
    e_r = simulate(rand, params).constants.E
    e_c = simulate(cent, params).constants.E
    rel = abs(e_r - e_c) / max(e_r, e_c)
    report(10, rel > 0.005 and math.isfinite(rel), f"E random={e_r:.4f} centered={e_c:.4f} differ by {rel:.2%}")
