#!/usr/bin/env python3
"""Generates the bundled model phase-shift tables (data/phase_shifts_*.txt).

These are smooth model parametrizations of low-energy e-Rb(5S) triplet
scattering, not ab-initio data:

  s-wave: effective-range form a_s[k] = a_s0 - (pi/3) alpha k with the
          static polarizability alpha of Rb, written as
          delta_s = atan(-k a_s[k]).
  p-wave: polarization background (pi/15) alpha k^2 plus a Breit-Wigner
          shape resonance at E_res with a threshold-law width
          Gamma(k) = gamma k^3.

All quantities in atomic units.  Regenerate with:  python3 tools/gen_phase_tables.py
"""

import math
import os
import sys

A_S0 = -16.05        # zero-energy s-wave scattering length, a0
ALPHA = 319.2        # Rb static dipole polarizability, a0^3
E_RES = 0.02 / 27.211386245988   # shape-resonance energy, hartree
GAMMA = 2.3          # width prefactor: Gamma(k) = GAMMA * k^3 (hartree)
K_SAT = 0.12         # beyond this the effective-range forms are held fixed
                     # (they are low-energy expansions; the potential there is
                     # deep in the cutoff region anyway)

K_MIN, K_MAX, N = 1e-4, 0.80, 1200


def delta_s(k):
    a = A_S0 - (math.pi / 3.0) * ALPHA * min(k, K_SAT)
    return math.atan(-k * a)


def delta_p(k):
    ks = min(k, K_SAT)
    bg = (math.pi / 15.0) * ALPHA * ks * ks
    e = 0.5 * ks * ks
    res = math.atan2(0.5 * GAMMA * ks ** 3, E_RES - e)
    # freeze tan(delta_p)/k^3 (the scattering volume) past K_SAT
    if k <= K_SAT:
        return bg + res
    vol = math.tan(bg + res) / K_SAT ** 3
    return math.atan(vol * k ** 3)


def main(outdir):
    ks = [K_MIN + (K_MAX - K_MIN) * i / (N - 1) for i in range(N)]
    with open(os.path.join(outdir, "phase_shifts_s.txt"), "w") as f:
        f.write("# model e-Rb(5S) triplet s-wave phase shifts\n")
        f.write(f"# a_s[k] = {A_S0} - (pi/3)*{ALPHA}*k  (a.u.)\n")
        f.write("# k_atomic_units delta_radians\n")
        for k in ks:
            f.write(f"{k:.8e} {delta_s(k):.10e}\n")
    with open(os.path.join(outdir, "phase_shifts_p.txt"), "w") as f:
        f.write("# model e-Rb(5S) triplet p-wave phase shifts\n")
        f.write(f"# background (pi/15)*{ALPHA}*k^2 + Breit-Wigner at "
                f"E_res = {E_RES:.6e} Ha, Gamma = {GAMMA}*k^3\n")
        f.write("# k_atomic_units delta_radians\n")
        for k in ks:
            f.write(f"{k:.8e} {delta_p(k):.10e}\n")


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
    os.makedirs(out, exist_ok=True)
    main(out)
