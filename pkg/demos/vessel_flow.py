"""Vessel flow: radius diffusion, steady Poiseuille flow and a valve.

Run with ``python3 demos/vessel_flow.py`` (about ten seconds).

1. The leading-order radius equation smooths a small bulge at the rate its
   linearization predicts.
2. The averaged area-flux system driven by a fixed pressure drop settles on
   the Poiseuille throughput.
3. An outlet valve driven by the Ca2+ trace of the oscillator opens and
   closes once per cycle, while the mass bookkeeping stays closed.
"""

import math

import numpy as np

from lymphflow.constitutive import PowerLaw
from lymphflow.cycle import find_limit_cycle
from lymphflow.integrator import IntegratorConfig, simulate
from lymphflow.params import NondimParams
from lymphflow.pde import (LeadingOrderBC, LeadingOrderConfig, PressureBC, ValveBC, VesselConfig,
                           averaged_mass, cell_centres, poiseuille_flux, solve_averaged, solve_leading_order)


def radius_diffusion():
    tau, amp = 4.0, 1e-3
    cfg = LeadingOrderConfig(tau=tau, sigma=0.0, law=PowerLaw(1.0))
    x = cell_centres(40, 1.0)
    R0 = 1.0 + amp * np.cos(math.pi * x)
    res = solve_leading_order(R0, LeadingOrderBC(), cfg, t_end=0.3, save_dt=0.1)
    predicted = tau / 16.0 * math.pi ** 2
    print("Leading order: amplitude of the cos(pi x) bulge")
    for s in res.states:
        a = 2.0 / x.size * np.sum((s.R - 1.0) * np.cos(math.pi * x))
        print(f"  t = {s.t:.1f}: {a:.6e}   (linear theory {amp * math.exp(-predicted * s.t):.6e})")


def poiseuille():
    v = VesselConfig(length=0.01, rho=1000.0, nu=1e-5, G=1e4, R0=5e-4, law=PowerLaw(1.0))
    dp = 10.0
    A = np.full(400, math.pi * (v.R0 * (1 + 0.5 * dp / v.G)) ** 2)
    res = solve_averaged(A, np.zeros(400), (PressureBC("inlet", dp), PressureBC("outlet", 0.0)), v,
                         t_end=0.05, save_dt=0.01)
    print("\nAveraged system, 10 Pa over 1 cm:")
    q_ref = poiseuille_flux(float(res.final.R[200]), -dp / v.length, v.rho, v.nu)
    for s in res.states[1:]:
        print(f"  t = {s.t:.2f} s: mean Q = {np.mean(s.Q):.6e} m^3/s")
    print(f"  Poiseuille law: {q_ref:.6e} m^3/s")


def valve():
    # Ca2+ trace of the oscillator, one cycle stretched to 10 ms
    p = NondimParams(5.01, 6.23, 3.33, 1.07)
    period = find_limit_cycle(p).period
    tr = simulate((0.9253, 1.0 + 1e-6), p, IntegratorConfig(max_time=4 * period))
    times, calcium = tr.t * (0.01 / period), tr.c

    v = VesselConfig(length=0.01, rho=1000.0, nu=1e-5, G=1e4, R0=5e-4, law=PowerLaw(1.0))
    A = np.full(40, math.pi * v.R0 ** 2)
    outlet = ValveBC("outlet", r_minus=0.8 * v.R0, r_plus=1.1 * v.R0, threshold=1.0,
                     activation="sigmoid", steepness=20.0, trigger="calcium", calcium=(times, calcium))
    res = solve_averaged(A, np.zeros(40), (PressureBC("inlet", 10.0), outlet), v, t_end=0.035)
    print("\nOutlet valve driven by the Ca2+ oscillation (closes while C > 1):")
    for t, side, state in res.valve_events:
        print(f"  t = {t * 1e3:7.3f} ms: {side} valve {state}")
    m0, m1 = averaged_mass(A, v.length), averaged_mass(res.final.A, v.length)
    gap = (m1 - m0) - (res.boundary_inflow - res.boundary_outflow)
    print(f"  mass change minus net boundary flux: {gap / m0:.1e} (relative)")


if __name__ == "__main__":
    radius_diffusion()
    poiseuille()
    valve()
