"""Command-line front end.

Every subcommand reads an optional TOML config, applies ``--set
section.key=value`` overrides, validates the result and writes one table as
CSV (``#`` header block, 17 significant digits) or JSON.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import copy
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .correlations import one_point_rates, weights
from .errors import (ConfigError, EvMirrorError, GridTooCoarse, InvalidDomain,
                     NonConvergence, NoReflection, StiffnessFailure,
                     UnsupportedPolarization)
from .optics import EvanescentFieldConfig, Interface
from .quadrature import QuadratureSpec

COMMANDS = ("correlations", "rates", "force", "diffusion", "pump", "bounce",
            "magnetize", "check")

DEFAULTS = {
    "interface": {"n0": 1.5},
    "field": {"polarization": "TE", "kappa": 1.0, "s0": 0.01, "detuning_ratio": 50.0},
    "atom": {"transition": "scalar", "je": 1.5, "gamma_over_recoil": 400.0,
             "gamma_inf": 1.0, "vdw_c3": 0.0},
    "scan": {"variable": "z", "start": 0.0, "stop": 5.0, "points": 256},
    "output": {"path": "", "format": "csv"},
    "quadrature": {"rel_tol": 1e-10, "abs_tol": 1e-12},
    "pump": {"z": 0.3, "J0": [0.0, 0.0, 0.0]},
    "bounce": {"p_inc": 50.0, "delta_p": 20.0, "include_rad_pressure": True,
               "n_traj": 0},
    "magnetize": {"z": 0.5, "width": 5.0, "n_out": 10, "t_end": 0.0},
}

# scan defaults that differ from the z scan
_SCAN_DEFAULTS = {
    "pump": {"variable": "t", "start": 0.0, "stop": 200.0, "points": 201},
    "magnetize": {"variable": "p_x", "start": -20.0, "stop": 20.0, "points": 401},
    "bounce": {"variable": "t", "start": 0.0, "stop": 0.0, "points": 2},
    "check": {"variable": "z", "start": 0.0, "stop": 1.0, "points": 2},
}
_SCAN_VARIABLE = {"correlations": "z", "rates": "z", "force": "z", "diffusion": "z",
                  "pump": "t", "magnetize": "p_x", "bounce": "t", "check": "z"}


def default_config(command):
    cfg = copy.deepcopy(DEFAULTS)
    cfg["scan"].update(_SCAN_DEFAULTS.get(command, {}))
    return cfg


def _merge(base, new, prefix=""):
    for key, value in new.items():
        name = f"{prefix}{key}"
        if key not in base:
            raise ConfigError("unknown key", name)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("expected a table", name)
            _merge(base[key], value, name + ".")
        else:
            base[key] = _coerce(base[key], value, name)


def _coerce(template, value, name):
    if isinstance(template, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", name)
        return value
    if isinstance(template, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", name)
        return value
    if isinstance(template, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", name)
        return float(value)
    if isinstance(template, list):
        if not isinstance(value, list) or len(value) != len(template):
            raise ConfigError(f"expected a list of {len(template)} numbers", name)
        return [_coerce(0.0, v, name) for v in value]
    if not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}", name)
    return value


def _parse_override(item):
    if "=" not in item:
        raise ConfigError("override must look like section.key=value", item)
    key, raw = item.split("=", 1)
    key = key.strip()
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    node = {}
    parts = key.split(".")
    cur = node
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
    cur[parts[-1]] = value
    return node


def load_config(command, path=None, overrides=()):
    """Resolve the run configuration for ``command``."""
    cfg = default_config(command)
    if path:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", "--config") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed TOML: {exc}", "--config") from exc
        _merge(cfg, data)
    for item in overrides:
        _merge(cfg, _parse_override(item))
    _validate(command, cfg)
    return cfg


def _validate(command, cfg):
    sc = cfg["scan"]
    if sc["variable"] != _SCAN_VARIABLE[command]:
        raise ConfigError(f"{command} scans {_SCAN_VARIABLE[command]!r}", "scan.variable")
    if sc["points"] < 2:
        raise ConfigError("must be >= 2", "scan.points")
    if command not in ("bounce", "check") and not sc["start"] < sc["stop"]:
        raise ConfigError("start must be < stop", "scan.stop")
    if cfg["output"]["format"] not in ("csv", "json"):
        raise ConfigError("must be 'csv' or 'json'", "output.format")
    _build_interface(cfg)
    _build_field(cfg)
    if command in ("bounce", "check"):
        _build_atom(cfg)
    _build_spec(cfg)


def _build_interface(cfg):
    try:
        return Interface(cfg["interface"]["n0"])
    except InvalidDomain as exc:
        raise ConfigError(str(exc), "interface.n0") from exc


def _build_field(cfg):
    f = cfg["field"]
    if f["polarization"] not in ("TE", "TM", "CIRC"):
        raise ConfigError("must be TE, TM or CIRC", "field.polarization")
    for key in ("kappa", "s0"):
        if not f[key] > 0:
            raise ConfigError("must be > 0", f"field.{key}")
    if f["detuning_ratio"] == 0:
        raise ConfigError("must be nonzero", "field.detuning_ratio")
    return EvanescentFieldConfig.from_kappa(f["kappa"], f["polarization"],
                                            detuning_ratio=f["detuning_ratio"], s0=f["s0"])


def _build_atom(cfg):
    from .semiclassical import AtomConfig
    a = cfg["atom"]
    try:
        return AtomConfig(gamma_over_recoil=a["gamma_over_recoil"], gamma_inf=a["gamma_inf"],
                          transition=a["transition"], je=a["je"], vdw_c3=a["vdw_c3"])
    except InvalidDomain as exc:
        key = "atom.transition" if "transition" in str(exc) or "J_e" in str(exc) else \
            "atom.gamma_over_recoil"
        raise ConfigError(str(exc), key) from exc


def _build_spec(cfg):
    q = cfg["quadrature"]
    try:
        return QuadratureSpec(rel_tol=q["rel_tol"], abs_tol=q["abs_tol"])
    except InvalidDomain as exc:
        raise ConfigError(str(exc), "quadrature") from exc


def _grid(cfg):
    sc = cfg["scan"]
    return np.linspace(sc["start"], sc["stop"], sc["points"])


def _pmap(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


class Table:
    """Columns, units, rows and extra header lines of one result."""

    def __init__(self, columns, units, rows, notes=None):
        self.columns = list(columns)
        self.units = list(units)
        self.rows = rows
        self.notes = notes or []


def cmd_correlations(cfg, threads=1, seed=None):
    iface, spec = _build_interface(cfg), _build_spec(cfg)

    def row(z):
        w = weights(iface, z, 0.0, spec)
        cp, cn = one_point_rates(iface, z, spec)
        return [z, w.c0, w.q0, w.a1, w.q2, cp, cn]
    return Table(["z", "c0", "q0", "a1", "q2", "c_par", "c_perp"],
                 ["1/k"] + ["1"] * 6, _pmap(row, _grid(cfg), threads))


def cmd_rates(cfg, threads=1, seed=None):
    from .scalar_atom import fluorescence_rate
    iface, field, spec = _build_interface(cfg), _build_field(cfg), _build_spec(cfg)

    def row(z):
        cp, cn = one_point_rates(iface, z, spec)
        return [z, fluorescence_rate(field, iface, z, spec), cp, cn]
    return Table(["z", "gamma_prime", "c_par", "c_perp"],
                 ["1/k", "Gamma'_inf", "1", "1"], _pmap(row, _grid(cfg), threads))


def cmd_force(cfg, threads=1, seed=None):
    from .scalar_atom import observables
    iface, field, spec = _build_interface(cfg), _build_field(cfg), _build_spec(cfg)

    def row(z):
        F = observables(field, iface, z, spec).force
        naive = field.Q * field.xi2 * np.exp(-2.0 * field.kappa * z)
        angle = np.degrees(np.arctan2(F[1], F[0]))
        return [z, F[0], F[1], F[2], angle, float(np.linalg.norm(F)), naive]
    u = "hbar k Gamma'_inf"
    return Table(["z", "Fx", "Fy", "Fz", "angle_deg", "F_abs", "F_abs_naive"],
                 ["1/k", u, u, u, "deg", u, u], _pmap(row, _grid(cfg), threads),
                 ["angle_deg: direction of F in the surface plane, measured from e_x "
                  "towards e_y", "F_abs_naive: free-space correlations only"])


def cmd_diffusion(cfg, threads=1, seed=None):
    from .scalar_atom import observables
    iface, field, spec = _build_interface(cfg), _build_field(cfg), _build_spec(cfg)

    def row(z):
        r = observables(field, iface, z, spec)
        D = r.diffusion
        ref = r.breakdown["D_free_reference"]
        return [z, D[0, 0], D[1, 1], D[2, 2], float(np.trace(D)), float(np.trace(ref))]
    u = "hbar^2 k^2 Gamma'_inf"
    return Table(["z", "D_xx", "D_yy", "D_zz", "trace", "trace_free_space"],
                 ["1/k", u, u, u, u, u], _pmap(row, _grid(cfg), threads),
                 ["trace_free_space: plane-wave scattering at the local free-space "
                  "rate, no interface"])


def cmd_pump(cfg, threads=1, seed=None):
    from .spin_half import TransitionCoefficients, integrate_pumping
    iface, field, spec = _build_interface(cfg), _build_field(cfg), _build_spec(cfg)
    coeffs = TransitionCoefficients.for_je(cfg["atom"]["je"])
    t = _grid(cfg)
    z = cfg["pump"]["z"]
    if z < 0:
        raise ConfigError("must be >= 0", "pump.z")
    J0 = cfg["pump"]["J0"]
    if np.linalg.norm(J0) > 1.0:
        raise ConfigError("|J0| must be <= 1", "pump.J0")
    transient = integrate_pumping(field, coeffs, iface, z, J0, t_end=float(t[-1]),
                                  steady_tol=0.0, spec=spec, t_eval=t)
    steady = integrate_pumping(field, coeffs, iface, z, J0, spec=spec)
    rows = [[ti, *Ji] for ti, Ji in zip(t, transient.J)]
    notes = [f"steady_state_J: {_fmt_list(steady.J_steady)}",
             f"steady_state_time: {_fmt(steady.t_steady)}"]
    return Table(["t", "J_x", "J_y", "J_z"], ["1/Gamma'_inf", "1", "1", "1"], rows, notes)


def cmd_check(cfg, threads=1, seed=None):
    from .semiclassical import check_validity
    atom, field = _build_atom(cfg), _build_field(cfg)
    b = cfg["bounce"]
    rows = [[c["condition"], c["lhs"], c["rhs"], int(c["satisfied"])]
            for c in check_validity(atom, field, b["p_inc"], b["delta_p"])]
    return Table(["condition", "lhs", "rhs", "satisfied"], ["", "", "", "bool"], rows,
                 ["satisfied: lhs > 10 rhs (low_saturation: lhs < rhs)"])


def cmd_bounce(cfg, threads=1, seed=None):
    from .semiclassical import check_validity, langevin_ensemble, mean_bounce
    iface, field, spec = _build_interface(cfg), _build_field(cfg), _build_spec(cfg)
    atom = _build_atom(cfg)
    b = cfg["bounce"]
    notes = ["validity: condition, lhs, rhs, satisfied"]
    for c in check_validity(atom, field, b["p_inc"], b["delta_p"]):
        notes.append(f"validity: {c['condition']}, {_fmt(c['lhs'])}, {_fmt(c['rhs'])}, "
                     f"{c['satisfied']}")
    tr = mean_bounce(atom, field, iface, b["p_inc"], b["include_rad_pressure"], spec)
    notes += [f"z0: {_fmt(tr.z0)}", f"tau: {_fmt(tr.tau)}",
              f"tau_estimate: {_fmt(tr.tau_estimate)}",
              f"delta_p2: {_fmt_list(tr.delta_p2_accumulated)}",
              f"two_tau_D_z0: {_fmt_list(2.0 * tr.tau * tr.D_z0)}"]
    if b["n_traj"] > 0:
        if seed is None:
            raise ConfigError("Langevin ensemble needs --seed", "--seed")
        r = langevin_ensemble(atom, field, iface, b["p_inc"], b["n_traj"], seed, threads,
                              b["include_rad_pressure"], spec=spec)
        notes += [f"langevin_n_traj: {r.n_traj}", f"langevin_mean_p: {_fmt_list(r.mean_p)}",
                  f"langevin_var_p: {_fmt_list(np.diag(r.cov_p))}",
                  f"langevin_var_impulse: {_fmt_list(np.diag(r.cov_impulse))}"]
    rows = [[t, z, px, pz, *d] for t, z, px, pz, d in
            zip(tr.t, tr.z, tr.p_x, tr.p_z, tr.delta_p2)]
    return Table(["t", "z", "p_x", "p_z", "dp2_x", "dp2_y", "dp2_z"],
                 ["1/Gamma'_inf", "1/k", "hbar k", "hbar k"] + ["hbar^2 k^2"] * 3,
                 rows, notes)


def cmd_magnetize(cfg, threads=1, seed=None):
    from .spin_half import (TransitionCoefficients, WignerSlice, evolve_wigner_slice)
    iface, field, spec = _build_interface(cfg), _build_field(cfg), _build_spec(cfg)
    coeffs = TransitionCoefficients.for_je(cfg["atom"]["je"])
    m = cfg["magnetize"]
    p = _grid(cfg)
    g = np.exp(-0.5 * (p / m["width"]) ** 2)
    g /= g.sum() * (p[1] - p[0])
    sl = WignerSlice(p_grid=p, w_plus=0.5 * g, w_minus=0.5 * g, z=m["z"])
    t_end = m["t_end"]
    if t_end <= 0:
        from .spin_half import forces_spin_half
        t_end = 4.0 / forces_spin_half(field, coeffs, iface, m["z"], spec).gamma_sigma
    ev = evolve_wigner_slice(sl, field, coeffs, iface, t_end, n_out=m["n_out"], spec=spec)
    rows = []
    for k, t in enumerate(ev.t):
        lab = ev.p_grid + ev.p_shift[k]
        w = ev.w_plus[k] + ev.w_minus[k]
        J = ev.w_plus[k] - ev.w_minus[k]
        rows += [[t, pl, wi, ji] for pl, wi, ji in zip(lab, w, J)]
    sep = ev.separation
    notes = [f"max_abs_J_y: {_fmt(np.abs(ev.w_plus - ev.w_minus).max())}",
             f"max_abs_separation: {_fmt(np.abs(sep).max())}",
             f"separation_estimate: {_fmt(ev.rates['separation_estimate'])}",
             f"sign_agreement_final: {_fmt(ev.sign_agreement[-1])}",
             f"population_drift: {_fmt(np.abs(ev.population - ev.population[0]).max())}"]
    return Table(["t", "p_x", "w", "J_y"], ["1/Gamma'_inf", "hbar k", "1/(hbar k)",
                                            "1/(hbar k)"], rows, notes)


HANDLERS = {
    "correlations": cmd_correlations, "rates": cmd_rates, "force": cmd_force,
    "diffusion": cmd_diffusion, "pump": cmd_pump, "bounce": cmd_bounce,
    "magnetize": cmd_magnetize, "check": cmd_check,
}


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _fmt_list(v):
    return " ".join(_fmt(x) for x in np.ravel(v))


def render(command, cfg, table, seed, fmt):
    """Serialize ``table`` with its provenance header."""
    meta = {"tool": f"evmirror {__version__}", "command": command, "config": cfg,
            "seed": seed, "units": dict(zip(table.columns, table.units)),
            "notes": table.notes}
    if fmt == "json":
        data = [[x if isinstance(x, str) else float(x) for x in r] for r in table.rows]
        return json.dumps({"meta": meta, "columns": table.columns, "data": data},
                          sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool: evmirror {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
    buf.write(f"# seed: {seed}\n")
    buf.write("# units: " + ", ".join(f"{c}={u}" for c, u in zip(table.columns, table.units))
              + "\n")
    for note in table.notes:
        buf.write(f"# {note}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(_fmt(x) for x in r) + "\n")
    return buf.getvalue()


def run(command, cfg, threads=1, seed=None):
    """Run one subcommand on a resolved config and return its Table."""
    return HANDLERS[command](cfg, threads=threads, seed=seed)


def build_parser():
    parser = argparse.ArgumentParser(prog="evmirror", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"evmirror {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override, e.g. --set interface.n0=1.33")
        p.add_argument("--out", help="output path (default: output.path or stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        overrides = list(args.set)
        if args.format:
            overrides.append(f"output.format=\"{args.format}\"")
        cfg = load_config(args.command, args.config, overrides)
        if args.threads < 1:
            raise ConfigError("must be >= 1", "--threads")
        table = run(args.command, cfg, threads=args.threads, seed=args.seed)
    except (ConfigError, InvalidDomain, UnsupportedPolarization, GridTooCoarse,
            NoReflection) as exc:
        print(f"evmirror: configuration error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, StiffnessFailure) as exc:
        print(f"evmirror: numerical failure: {exc}", file=sys.stderr)
        return 3
    except EvMirrorError as exc:
        print(f"evmirror: error: {exc}", file=sys.stderr)
        return 3
    text = render(args.command, cfg, table, args.seed, cfg["output"]["format"])
    out = args.out or cfg["output"]["path"]
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
