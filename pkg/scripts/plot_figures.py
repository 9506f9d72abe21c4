"""Regenerate figure PNGs from evmirror CSV output.

Requires matplotlib, which the package itself does not use. Each figure is
produced by running one CLI command into ``--outdir`` and plotting the
resulting CSV, so the plotted numbers are exactly the tool's output.
"""

import argparse
import io
from contextlib import redirect_stdout
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from evmirror.cli import main as cli  # noqa: E402


def run(command, outdir, *overrides):
    path = outdir / f"{command}.csv"
    args = [command, "--out", str(path)]
    for o in overrides:
        args += ["--set", o]
    with redirect_stdout(io.StringIO()):
        if cli(args) != 0:
            raise SystemExit(f"evmirror {command} failed")
    return read(path)


def read(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(x) for x in l.split(",")] for l in lines[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="figures")
    args = parser.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    c = run("correlations", out)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for k in ("c0", "q0", "a1", "q2"):
        ax.plot(c["z"], c[k], label=k)
    ax.set_xlabel("k z")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "weights.png", dpi=150)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(c["z"], c["c_par"], label="c_par")
    ax.plot(c["z"], c["c_perp"], label="c_perp")
    ax.axhline(1.0, color="k", lw=0.5)
    ax.set_xlabel("k z")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "rates.png", dpi=150)

    f = run("force", out, 'field.polarization="CIRC"')
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(f["z"], f["angle_deg"])
    ax.set_xlabel("k z")
    ax.set_ylabel("force angle (deg)")
    fig.tight_layout()
    fig.savefig(out / "force_angle.png", dpi=150)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for pol in ("TE", "TM"):
        d = run("diffusion", out, f'field.polarization="{pol}"', "scan.stop=2.0")
        ax.plot(d["z"], d["trace"] / d["trace_free_space"], label=pol)
    ax.set_xlabel("k z")
    ax.set_ylabel("trace D / free-space trace")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "diffusion_ratio.png", dpi=150)


if __name__ == "__main__":
    main()
