"""Compare the compiled kernels with the NumPy fallback.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is timed on
identical inputs through both backends and the maximum absolute
difference of the outputs is reported.
"""

import argparse
import timeit

import numpy as np

from evmirror import kernels
from evmirror.correlations import clear_cache, weights
from evmirror.optics import EvanescentFieldConfig, Interface
from evmirror.semiclassical import AtomConfig, langevin_ensemble


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_pointwise(native, python, repeat):
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 40, 100_000)
    th = np.ascontiguousarray(rng.uniform(0, np.pi / 2, 15 * 64))
    cases = {
        "bessel J1 (1e5 points)": lambda mod: mod.bessel_array(1, x),
        "weight integrand (960 nodes)": lambda mod: mod.weight_integrand(th, 1, 1.5, 0.4, 0.7),
    }
    for name, call in cases.items():
        diff = np.abs(np.asarray(call(native)) - np.asarray(call(python))).max()
        t_n = _time(lambda: call(native), repeat)
        t_p = _time(lambda: call(python), repeat)
        yield name, t_n, t_p, diff


def bench_weights(repeat):
    glass = Interface(1.5)
    zs = np.linspace(0.0, 5.0, 32)

    def sweep():
        clear_cache()
        return np.array([weights(glass, z, 0.5).as_array() for z in zs])
    return sweep, _time(sweep, repeat)


def bench_langevin(n_traj):
    cfg = EvanescentFieldConfig.from_kappa(1.0, "TE", detuning_ratio=1000.0, s0=0.05)
    atom = AtomConfig(gamma_over_recoil=400.0)
    run = lambda: langevin_ensemble(atom, cfg, Interface(1.5), 50.0, n_traj, seed=1).final
    return run, _time(run, 1)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--n-traj", type=int, default=1000)
    args = parser.parse_args()

    native = kernels.get_backend("native")
    python = kernels.get_backend("python")
    rows = list(bench_pointwise(native, python, args.repeat))

    # whole-pipeline timings: swap the kernel module under the public API
    saved = {k: getattr(kernels, k) for k in ("bessel_array", "bessel_ratio_array",
                                              "weight_integrand", "langevin_run")}
    results = {}
    for label, mod in (("native", native), ("python", python)):
        for k in saved:
            setattr(kernels, k, getattr(mod, k))
        fn, t_w = bench_weights(args.repeat)
        out_w = fn()
        fn, t_l = bench_langevin(args.n_traj)
        out_l = fn()
        results[label] = (t_w, t_l, out_w, out_l)
    for k, v in saved.items():
        setattr(kernels, k, v)

    (wn, ln, own, oln), (wp, lp, owp, olp) = results["native"], results["python"]
    rows.append(("weights sweep (32 heights)", wn, wp, np.abs(own - owp).max()))
    rows.append((f"Langevin ({args.n_traj} trajectories)", ln, lp, np.abs(oln - olp).max()))

    print(f"{'kernel':34s} {'native [s]':>11s} {'python [s]':>11s} {'speed-up':>9s} "
          f"{'max |diff|':>11s}")
    for name, t_n, t_p, diff in rows:
        print(f"{name:34s} {t_n:11.4f} {t_p:11.4f} {t_p / t_n:9.1f} {diff:11.2e}")


if __name__ == "__main__":
    main()
