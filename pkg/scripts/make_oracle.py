#!/usr/bin/env python3
"""Generate the frozen reference table tests/data/weights_oracle.csv.

The interface weights c0, q0, a1, q2 at s_par = 0 are integrated directly in
the transverse wavenumber u with mpmath's tanh-sinh rule at 30 digits. The
Fresnel coefficients are coded here from scratch; nothing is imported from
evmirror, so the table is an independent check of the production
quadrature (which works in angle variables).

    python3 scripts/make_oracle.py [--points 256] [--n0 1.5] [--zmax 5]
"""

import argparse
import csv
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30


def reflection(n0, u):
    v = mp.sqrt(1 - u * u) if u < 1 else 1j * mp.sqrt(u * u - 1)
    w = mp.sqrt(n0 * n0 - u * u)
    r_te = (v - w) / (v + w)
    r_tm = (n0 * n0 * v - w) / (n0 * n0 * v + w)
    return v, r_te, r_tm


def integrands(n0, z):
    def base(u):
        v, rte, rtm = reflection(n0, u)
        return v, rte, rtm, mp.exp(2j * v * z)

    def c0(u):
        v, rte, rtm, e = base(u)
        return mp.re(u / v * (rte + (2 * u * u - 1) * rtm) * e) / 2

    def q0(u):
        v, rte, rtm, e = base(u)
        return 3 * mp.re(u / v * (-rte + (u * u + 1) * rtm) * e) / 4

    def a1(u):
        v, rte, rtm, e = base(u)
        return 3 * mp.im(u ** 3 * rtm * e) / 4

    def q2(u):
        v, rte, rtm, e = base(u)
        return 3 * mp.re(u ** 3 / v * (rte - (u * u - 1) * rtm) * e) / 16

    return c0, q0, a1, q2


def weights(n0, z):
    out = []
    for f in integrands(mp.mpf(n0), mp.mpf(z)):
        out.append(mp.quad(f, [0, 1]) + mp.quad(f, [1, mp.mpf(n0)]))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=256)
    ap.add_argument("--n0", type=float, default=1.5)
    ap.add_argument("--zmax", type=float, default=5.0)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1]
                                         / "tests" / "data" / "weights_oracle.csv"))
    args = ap.parse_args()
    rows = []
    for i in range(args.points):
        z = mp.mpf(args.zmax) * i / (args.points - 1)
        c0, q0, a1, q2 = weights(args.n0, z)
        rows.append([z, c0, q0, a1, q2, 1 + c0 - q0 / 3, 1 + c0 + 2 * q0 / 3])
    with open(args.out, "w", newline="") as fh:
        fh.write(f"# mpmath {mp.__version__} tanh-sinh, {mp.mp.dps} digits, raw u variable\n")
        fh.write(f"# n0 = {args.n0}, s_par = 0\n")
        wr = csv.writer(fh)
        wr.writerow(["z", "c0", "q0", "a1", "q2", "c_par", "c_perp"])
        for r in rows:
            wr.writerow([mp.nstr(x, 20) for x in r])


if __name__ == "__main__":
    main()
