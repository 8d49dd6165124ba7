"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np

from lymphflow.bifurcation import BebType, beb_f1, beb_f2, beta_sequence, classify_beb
from lymphflow.constitutive import (PowerLawProfile, Rahbar, Reciprocal, fit_pressure_law,
                                    profile_integral, shape_factor, synthetic_pressure_data)
from lymphflow.cycle import find_limit_cycle, flow_minus, flow_plus, oscillation_conditions, SINGULARITY_GUARD
from lymphflow.filippov import Field, State, lie2
from lymphflow.integrator import EventKind, IntegratorConfig, arc_durations, simulate
from lymphflow.params import NondimParams, nondimensionalize, reference_discrepancy, reference_kinetics
from lymphflow.pde import (LeadingOrderBC, LeadingOrderConfig, PowerLaw, PressureBC, VesselConfig,
                           averaged_mass, cell_centres, leading_order_dt, leading_order_mass,
                           poiseuille_flux, solve_averaged, solve_leading_order)

REF = NondimParams(5.01, 6.23, 3.33, 1.07)


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_01_nondimensional_groups(capsys):
    phys = reference_kinetics()
    t0 = time.perf_counter()
    nd = nondimensionalize(phys)
    elapsed = time.perf_counter() - t0
    disc = reference_discrepancy(nd)
    ok = (abs(nd.alpha - 5.01) <= 0.01 and abs(nd.gamma - 3.33) <= 0.01 and elapsed < 1e-3
          and set(disc) >= {"beta", "zeta"})
    report(capsys, 1, ok,
           f"alpha={nd.alpha:.4f} gamma={nd.gamma:.4f} beta={nd.beta:.4f} (reference 6.23, diff {disc['beta']:+.4f}) "
           f"zeta={nd.zeta:.4f} (reference 1.07, diff {disc['zeta']:+.4f}) in {elapsed * 1e6:.0f} us")


def test_criterion_02_limit_cycle(capsys):
    t0 = time.perf_counter()
    chk = oscillation_conditions(REF)
    rep = find_limit_cycle(REF)
    tr = simulate((1.0, 1.0 + 1e-6), REF, IntegratorConfig(max_time=40.0))
    elapsed = time.perf_counter() - t0
    down = tr.events_of(EventKind.CROSS_DOWN)
    n_sim = down[-1].state.n
    period_sim = down[-1].t - down[-2].t
    dn = abs(rep.n_star - n_sim)
    dp = abs(rep.period - period_sim) / rep.period
    ok = bool(chk) and rep.residual <= 1e-9 and dn <= 1e-6 and dp <= 1e-5 and elapsed < 5
    report(capsys, 2, ok,
           f"n*={rep.n_star:.12f} sim={n_sim:.12f} |dn|={dn:.2e}; period={rep.period:.10f} "
           f"rel diff {dp:.2e}; residual {rep.residual:.1e}; {elapsed:.2f} s")


def test_criterion_03_removable_singularities(capsys):
    t0 = time.perf_counter()
    z = float(REF.zeta)
    e_minus = abs(flow_minus(SINGULARITY_GUARD, 1.0, REF) - REF.beta / REF.alpha)
    e_plus = abs(flow_plus(z - SINGULARITY_GUARD, 0.2, REF)
                 - (REF.beta + REF.gamma) / (REF.alpha * (1 + REF.zeta)))
    elapsed = time.perf_counter() - t0
    ok = e_minus < 1e-6 and e_plus < 1e-6 and elapsed < 1
    report(capsys, 3, ok, f"|C- - beta/alpha|={e_minus:.2e}, |C+ - limit|={e_plus:.2e} at guard "
                          f"{SINGULARITY_GUARD:g}; {elapsed * 1e3:.1f} ms")


def test_criterion_04_lie_derivative_anchors(capsys):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        a, b, g, z = rng.uniform(0.1, 10.0, 4)
        p = NondimParams(a, b, g, z)
        s1 = State(b / a - 1.0, 1.0)
        s2 = State((b + g) / a - 1.0, 1.0)
        r1 = lie2(s1, p, Field.F1) - (b - a)
        r2 = lie2(s2, p, Field.F2) - (b + g - a * (z + 1))
        scale = max(1.0, a * a * (abs(s2.n) + 1) ** 2 + a * (b + g + z))
        worst = max(worst, abs(r1) / scale, abs(r2) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-13 and elapsed < 1
    report(capsys, 4, ok, f"max scaled deviation {worst:.1e} over 1000 draws; {elapsed * 1e3:.0f} ms")


def test_criterion_05_beb_classification(capsys):
    t0 = time.perf_counter()
    base = NondimParams(0.3, 0.5, 0.5, 2.0)
    kinds = {g: classify_beb(base.replace(gamma=g)).kind for g in (0.5, 0.6, 0.8)}
    c1, c2 = beb_f1(base), beb_f2(base)
    expected = {0.5: ["RV", "BV", "VV", "VB", "VR"], 0.6: ["RV", "BB", "VR"],
                0.8: ["RV", "RB", "RR", "BR", "VR"], 1.0: ["RR", "BR", "VR"]}
    seqs = {g: beta_sequence(base.replace(gamma=g)) for g in expected}
    elapsed = time.perf_counter() - t0
    ok = (kinds == {0.5: BebType.PERSISTENCE, 0.6: BebType.DEGENERATE, 0.8: BebType.NONSMOOTH_FOLD}
          and c1.valid and c2.valid
          and math.isclose(c1.transversality_value, 1 / 0.3, rel_tol=1e-12)
          and math.isclose(c2.transversality_value, 1 / 0.9, rel_tol=1e-12)
          and seqs == expected and elapsed < 10)
    seq_txt = "; ".join(f"{g}: {'-'.join(s)}" for g, s in seqs.items())
    report(capsys, 5, ok, f"{ {g: k.value for g, k in kinds.items()} }, transversality "
                          f"{c1.transversality_value:.4f}/{c2.transversality_value:.4f}, sequences {seq_txt}; "
                          f"{elapsed:.2f} s")


def test_criterion_06_time_of_flight(capsys):
    rng = np.random.default_rng(6)
    z = float(REF.zeta)
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    while count < 20:
        x0 = (rng.uniform(0.05, 1.0), rng.uniform(0.2, 2.0))
        tr = simulate(x0, REF, IntegratorConfig(max_time=4.0))
        arcs = arc_durations(tr)
        if not arcs:
            continue
        fld, na, nb, dt = arcs[int(rng.integers(len(arcs)))]
        ref = math.log(na / nb) if fld == Field.F1 else math.log((z - na) / (z - nb))
        worst = max(worst, abs(dt - ref))
        count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 2
    report(capsys, 6, ok, f"max |duration - log formula| = {worst:.1e} over 20 arcs; {elapsed:.2f} s")


def _identifiable(law):
    # the data fix only these combinations; the remaining direction is a gauge
    if law.tag == "rahbar":
        return np.array([law.Sp, law.P0 * law.a, law.P0 * law.b, law.P0 * math.exp(-law.Sp * law.z0)])
    return np.array([law.g / law.lam, law.z0 / law.lam, law.a, law.b])


def test_criterion_07_constitutive_round_trip(capsys):
    t0 = time.perf_counter()
    z = np.linspace(0.6, 1.6, 50)
    lines, ok = [], True
    for truth, init in ((Rahbar(2.0, 3.0, 1.0, 0.5, 1.5), [2.2, 3.3, 1.1, 0.55, 1.65]),
                        (Reciprocal(1.0, 2.0, 1.0, 0.3, 0.2), [1.1, 2.2, 1.1, 0.33, 0.22])):
        clean = synthetic_pressure_data(truth, z)
        law, _ = fit_pressure_law(clean, truth.tag, init)
        rel = np.max(np.abs(law.coefficients() - truth.coefficients()) / np.abs(truth.coefficients()))
        noisy = synthetic_pressure_data(truth, z, noise=0.01, seed=7)
        _, rep = fit_pressure_law(noisy, truth.tag, init)
        at_truth = float(np.linalg.norm(truth.phi(noisy[:, 0]) - noisy[:, 1]))
        noise_ok = rep.residual_norm <= at_truth + 1e-12
        ok = ok and rel <= 1e-6 and noise_ok
        comb = _identifiable(law) / _identifiable(truth) - 1.0
        lines.append(f"{truth.tag}: max rel coeff error {rel:.2e} (identifiable combinations "
                     f"{np.max(np.abs(comb)):.1e}), noisy residual {rep.residual_norm:.4e} vs truth {at_truth:.4e}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1
    report(capsys, 7, ok, "; ".join(lines) + f"; {elapsed:.2f} s")


def test_criterion_08_shape_factors(capsys):
    t0 = time.perf_counter()
    exact = shape_factor(PowerLawProfile(2.0)) == 8 / 3
    worst = max(abs(profile_integral(PowerLawProfile(g)) - 2 * (2 + g) / (1 + g)) for g in (1, 2, 5, 9))
    elapsed = time.perf_counter() - t0
    ok = exact and worst <= 1e-8 and elapsed < 1
    report(capsys, 8, ok, f"shape_factor(2) == 8/3: {exact}; quadrature vs closed form {worst:.1e}; "
                          f"{elapsed * 1e3:.0f} ms")


def test_criterion_09_pde_conservation(capsys):
    t0 = time.perf_counter()
    # leading order: uniform state over 10^4 steps
    lo = LeadingOrderConfig(tau=1.0, sigma=0.1)
    R0 = np.full(20, 1.3)
    dt = leading_order_dt(R0, lo, lo.length / 20)
    res = solve_leading_order(R0, LeadingOrderBC(r_left=1.3, r_right=1.3), lo, t_end=1e4 * dt, dt=dt)
    lo_uniform = float(np.max(np.abs(res.final.R - 1.3)))
    # leading order: mass balance with boundary fluxes
    x = cell_centres(40, 1.0)
    Rm = 1.0 + 0.1 * np.sin(math.pi * x)
    res = solve_leading_order(Rm, LeadingOrderBC(grad_left=-1.0, grad_right=-0.5),
                              LeadingOrderConfig(tau=2.0, sigma=0.05), t_end=0.01)
    m0 = leading_order_mass(Rm, 1.0)
    lo_mass = abs(leading_order_mass(res.final.R, 1.0) - m0
                  - (res.boundary_inflow - res.boundary_outflow)) / m0

    vessel = VesselConfig(length=0.01, rho=1000.0, nu=1e-5, G=1e4, R0=5e-4, law=PowerLaw(1.0))
    # averaged: uniform state over 10^4 steps
    R = 6e-4
    p = float(vessel.elastic_pressure(R))
    A = np.full(20, math.pi * R ** 2)
    res = solve_averaged(A, np.zeros(20), (PressureBC("inlet", p), PressureBC("outlet", p)), vessel,
                         t_end=1.0, dt=1e-4)
    av_uniform = max(float(np.max(np.abs(res.final.A - A))) / A[0], float(np.max(np.abs(res.final.Q))) / A[0])
    # averaged: mass balance under an oscillating inlet pressure
    A = np.full(50, math.pi * vessel.R0 ** 2)
    res = solve_averaged(A, np.zeros(50), (PressureBC("inlet", lambda t: 200.0 * math.sin(200 * t)),
                                           PressureBC("outlet", 0.0)), vessel, t_end=0.02)
    m0 = averaged_mass(A, vessel.length)
    av_mass = abs(averaged_mass(res.final.A, vessel.length) - m0
                  - (res.boundary_inflow - res.boundary_outflow)) / m0
    # averaged: steady Poiseuille throughput on 400 cells
    dp = 10.0
    A = np.full(400, math.pi * (vessel.R0 * (1 + 0.5 * dp / vessel.G)) ** 2)
    res = solve_averaged(A, np.zeros(400), (PressureBC("inlet", dp), PressureBC("outlet", 0.0)), vessel,
                         t_end=0.05)
    q_ref = poiseuille_flux(float(res.final.R[200]), -dp / vessel.length, vessel.rho, vessel.nu)
    pois = abs(float(np.mean(res.final.Q)) - q_ref) / abs(q_ref)
    elapsed = time.perf_counter() - t0
    ok = (lo_uniform <= 1e-12 and av_uniform <= 1e-12 and lo_mass <= 1e-8 and av_mass <= 1e-8
          and pois <= 0.02 and elapsed < 60)
    report(capsys, 9, ok, f"uniform drift lo {lo_uniform:.1e} / av {av_uniform:.1e}; mass balance lo "
                          f"{lo_mass:.1e} / av {av_mass:.1e}; Poiseuille rel error {pois:.1e}; {elapsed:.1f} s")


def _cli(tmp, args):
    return subprocess.run([sys.executable, "-m", "lymphflow", *args], cwd=tmp, capture_output=True, check=True)


def test_criterion_10_determinism(tmp_path, capsys):
    nd = ["--alpha", "5.01", "--beta", "6.23", "--gamma", "3.33", "--zeta", "1.07"]
    runs = [
        (["cycle", *nd, "--out", "{d}/cycle.json", "--polyline", "{d}/poly.csv"], ["cycle.json", "poly.csv"]),
        (["classify", *nd, "--out", "{d}/classify.json"], ["classify.json"]),
        (["simulate", *nd, "--x0", "1.0,1.2", "--t-max", "10", "--out", "{d}/traj.csv"],
         ["traj.csv", "traj.events.csv"]),
        (["bifurcate", "--diagram", "--alpha", "0.3", "--zeta", "2", "--beta-range", "0.05:1.2:41",
          "--gamma-range", "0.05:1.2:41", "--out", "{d}/diagram.csv"], ["diagram.csv"]),
        (["fit", "--law", "rahbar", "--truth", "2,3,1,0.5,1.5", "--noise", "0.01", "--seed", "3",
          "--init", "2.2,3.3,1.1,0.55,1.65", "--out", "{d}/fit.json"], ["fit.json"]),
        (["pde", "leading", "--t-end", "0.002", "--cells", "30", "--out", "{d}/lo.csv"], ["lo.csv"]),
    ]
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        d.mkdir()
        blobs = {}
        for args, files in runs:
            _cli(tmp_path, [a.format(d=d) for a in args])
            blobs.update({f: (d / f).read_bytes() for f in files})
        outputs.append(blobs)
    same = [f for f in outputs[0] if outputs[0][f] == outputs[1][f]]
    ok = len(same) == len(outputs[0]) and all(outputs[0].values())
    report(capsys, 10, ok, f"{len(same)}/{len(outputs[0])} output files byte-identical across two runs")
