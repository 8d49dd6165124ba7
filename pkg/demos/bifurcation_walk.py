"""Walking ``beta`` through the boundary equilibrium bifurcations.

Run with ``python3 demos/bifurcation_walk.py``.  With ``alpha = 0.3`` and
``zeta = 2`` the sign of ``alpha zeta - gamma`` decides what happens when a
regular equilibrium reaches ``C = 1``: it either turns into the
pseudo-equilibrium (persistence) or meets it and both disappear
(non-smooth fold).  ``gamma = 0.6`` sits exactly between the two.

Regime codes give the F1 and F2 equilibria as Regular, Virtual or Boundary.
"""

from lymphflow.bifurcation import beb_f1, beb_f2, beta_breakpoints, beta_scan, classify_beb
from lymphflow.params import NondimParams


def main():
    base = NondimParams(alpha=0.3, beta=0.3, gamma=0.5, zeta=2.0)
    c1, c2 = beb_f1(base), beb_f2(base)
    print("BEB certificates at alpha = 0.3, zeta = 2, gamma = 0.5")
    for c in (c1, c2):
        print(f"  {c.field}: beta* = {c.beta_star:.4f}, conditions {c.conditions}, "
              f"transversality {c.transversality_value:.4f}, det {c.jacobian_det:.4f}")

    for gamma in (0.5, 0.6, 0.8, 1.0):
        p = base.replace(gamma=gamma)
        cls = classify_beb(p)
        breaks = ", ".join(f"{float(b):.4f}" for b in beta_breakpoints(p))
        print(f"\ngamma = {gamma}: {cls.kind.value} (zeta - gamma/alpha = {cls.discriminant:+.4f}); "
              f"breakpoints beta = {breaks}")
        last = None
        for beta, lab in beta_scan(p, (0.05, 1.2, 400)):
            if lab.short != last:
                print(f"  from beta = {float(beta):.4f}: {lab.short}  pseudo-equilibrium {lab.pseudo.value}")
                last = lab.short


if __name__ == "__main__":
    main()
