"""Command-line front end.

Every subcommand can be driven by flags or by a config file::

    seed = 7

    [map]
    kind = double_shear
    params = a=1.0, b=1.0

    [command]
    name = rotset
    grid = 128
    n = 1000

    [output]
    csv = out/rotset.csv
    svg = out/rotset.svg

``torsionlab run CONFIG`` executes a config file; ``torsionlab rotset --map
double_shear --params "a=1,b=1" --grid 128 --n 1000 --csv out.csv`` builds the
same config from flags.  Exit codes: 0 success, 1 usage, 2 numeric failure,
3 search not found.
"""

import argparse
import configparser
import os
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, TorsionLabError
from .io import SvgCanvas, provenance, write_csv
from .maps import parse_map_section

# command keys accepted in [command], with converters and defaults
_COMMANDS = {
    "torsion": {"points": (str, "0.1,0.2"), "xi": (str, "1,0"), "n": (int, 4096),
                "tol": (float, 1e-3)},
    "linking": {"pairs": (str, ""), "curves": (str, ""), "n": (int, 64)},
    "witness": {"pairs": (str, ""), "n": (int, 20), "eps_min": (float, 1e-3)},
    "rotset": {"grid": (int, 128), "n": (int, 1000), "realize": (bool, True)},
    "action": {"profile": (str, "cubic"), "lambda": (float, 1.0), "samples": (int, 100000),
               "n": (int, 8), "x0": (str, "0,0")},
    "chain": {"count": (int, 10), "max_len": (int, 12), "matrix": (str, "2,1,1,1")},
    "thm1-demo": {"n": (int, 100), "radius": (float, 0.05), "samples": (int, 20000),
                  "average_n": (int, 8)},
    "thm2-demo": {"grid": (int, 64), "rot_n": (int, 500), "max_period": (int, 2),
                  "seeds": (int, 60), "n": (int, 20)},
}
_OUTPUT_KEYS = {"csv", "svg", "chains"}
_NEEDS_MAP = set(_COMMANDS) - {"chain"}


class ExperimentConfig:
    """Parsed ``[map]``, ``[command]``, ``[output]`` sections plus the seed."""

    def __init__(self, map_section, command, options, output, seed=0):
        self.map_section = dict(map_section)
        self.command = command
        self.options = dict(options)
        self.output = dict(output)
        self.seed = int(seed)
        self.validate()

    def validate(self):
        if self.command not in _COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; known: {sorted(_COMMANDS)}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        schema = _COMMANDS[self.command]
        unknown = set(self.options) - set(schema)
        if unknown:
            raise ConfigError(f"unknown keys for {self.command}: {sorted(unknown)}")
        for key, raw in list(self.options.items()):
            conv = schema[key][0]
            try:
                self.options[key] = _convert(conv, raw)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        unknown = set(self.output) - _OUTPUT_KEYS
        if unknown:
            raise ConfigError(f"unknown keys in [output]: {sorted(unknown)}")
        curves_only = self.command == "linking" and self.options.get("curves")
        if self.command in _NEEDS_MAP and not self.map_section and not curves_only:
            raise ConfigError(f"{self.command} needs a [map] section")

    def get(self, key):
        return self.options.get(key, _COMMANDS[self.command][key][1])

    def canonical_text(self):
        """Normalised config text; its hash goes into every artifact."""
        lines = [f"seed = {self.seed}", "", "[map]"]
        lines += [f"{k} = {v}" for k, v in sorted(self.map_section.items())]
        lines += ["", "[command]", f"name = {self.command}"]
        lines += [f"{k} = {self.options[k]}" for k in sorted(self.options)]
        lines += ["", "[output]"] + [f"{k} = {v}" for k, v in sorted(self.output.items())]
        return "\n".join(lines) + "\n"

    def check_paths(self):
        for key, path in self.output.items():
            folder = os.path.dirname(os.path.abspath(path))
            if not os.path.isdir(folder):
                try:
                    os.makedirs(folder, exist_ok=True)
                except OSError as exc:
                    raise ConfigError(f"cannot create directory for {key}: {exc}") from None
            if not os.access(folder, os.W_OK) or (os.path.exists(path)
                                                   and not os.access(path, os.W_OK)):
                raise ConfigError(f"output path for {key} is not writable: {path}")


def _convert(conv, raw):
    if isinstance(raw, conv) and not (conv is int and isinstance(raw, bool)):
        return raw
    if conv is bool:
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValueError(raw)
    return conv(str(raw).strip())


def load_config(path):
    """Read a config file; top-level keys before the first section (``seed``) are allowed."""
    with open(path) as fh:
        text = fh.read()
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    unknown = set(parser.sections()) - {"experiment", "map", "command", "output"}
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    top = dict(parser["experiment"])
    if set(top) - {"seed"}:
        raise ConfigError(f"unknown top-level keys: {sorted(set(top) - {'seed'})}")
    command = dict(parser["command"]) if parser.has_section("command") else {}
    if "name" not in command:
        raise ConfigError("[command] section needs a 'name'")
    name = command.pop("name").strip()
    try:
        seed = int(top.get("seed", command.pop("seed", 0)))
    except ValueError:
        raise ConfigError("seed must be an integer") from None
    map_section = dict(parser["map"]) if parser.has_section("map") else {}
    output = dict(parser["output"]) if parser.has_section("output") else {}
    return ExperimentConfig(map_section, name, command, output, seed)


def _floats(text, width):
    vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    if not vals or len(vals) % width:
        raise ConfigError(f"expected groups of {width} numbers, got {text!r}")
    return np.array(vals).reshape(-1, width)


def _say(msg):
    print(msg, flush=True)


# Subcommand bodies ----------------------------------------------------------------

def _cmd_torsion(cfg, iso, meta):
    from .torsion import TORSION_CSV_HEADER, torsion_orbit

    pts = _floats(cfg.get("points"), 2)
    xi = tuple(_floats(cfg.get("xi"), 2)[0])
    top = cfg.get("n")
    schedule = sorted({max(1, top // 8), max(1, top // 4), max(1, top // 2), top})
    rows = []
    for p in pts:
        est = torsion_orbit(iso, p, xi, schedule, cfg.get("tol"))
        rows.append(est.csv_row())
        _say(f"torsion at ({p[0]:g}, {p[1]:g}), n={est.n}: {est.value:.10g} [{est.diagnostic}]")
    if "csv" in cfg.output:
        write_csv(cfg.output["csv"], TORSION_CSV_HEADER, rows, meta)


def _cmd_linking(cfg, iso, meta):
    from .linking import SampledCurve, linking_curves, linking_n_many

    n = cfg.get("n")
    rows = []
    if cfg.get("curves"):
        paths = [s.strip() for s in cfg.get("curves").split(",")]
        if len(paths) != 2:
            raise ConfigError("curves needs two file paths separated by a comma")
        est = linking_curves(SampledCurve.from_csv(paths[0]), SampledCurve.from_csv(paths[1]))
        _say(f"linking of curves over T={est.horizon:g}: {est.value:.10g}")
        header = ["horizon", "linking", "min_separation"]
        rows.append([est.horizon, est.value, est.min_separation])
    else:
        pairs = _floats(cfg.get("pairs"), 4)
        vals = linking_n_many(iso, pairs[:, :2], pairs[:, 2:], n)
        header = ["xx", "xy", "yx", "yy", "n", "linking"]
        for pr, v in zip(pairs, vals):
            rows.append([*pr, n, float(v)])
            _say(f"linking_{n} of ({pr[0]:g}, {pr[1]:g}), ({pr[2]:g}, {pr[3]:g}): {v:.10g}")
    if "csv" in cfg.output:
        write_csv(cfg.output["csv"], header, rows, meta)


def _cmd_witness(cfg, iso, meta):
    from .witness import existence_pipeline, write_certificates

    pairs = _floats(cfg.get("pairs"), 4)
    cert, _ = existence_pipeline(iso, [(p[:2], p[2:]) for p in pairs], cfg.get("n"),
                                 cfg.get("eps_min"))
    _report_certificate(cert)
    if "csv" in cfg.output:
        write_certificates(cfg.output["csv"], [cert], meta)


def _report_certificate(cert):
    _say(f"witness: eps={cert.epsilon:.6g} s0={cert.s0:.9g} z=({cert.z[0]:.9g}, {cert.z[1]:.9g}) "
         f"torsion={cert.torsion_value:.6g} bound={cert.bound:.6g} "
         f"verified={cert.verified} minimal={cert.minimal}")


def _cmd_rotset(cfg, iso, meta):
    from .errors import NotFound
    from .rotset import choose_rational_triple, estimate_rotation_set, realize_rational_vector

    rset = estimate_rotation_set(iso, cfg.get("grid"), cfg.get("n"))
    _say(f"rotation set: {len(rset.vertices)} vertices, area {rset.area:.6g}, "
         f"origin margin {rset.margin((0.0, 0.0)):.6g}, nested ok {rset.nested_ok}")
    realized = []
    if cfg.get("realize") and rset.area > 0:
        for p, p2, q in choose_rational_triple(rset):
            try:
                rec = realize_rational_vector(iso, p, p2, q)
            except NotFound as exc:
                _say(f"  ({p}/{q}, {p2}/{q}): {exc}")
                continue
            realized.append(rec)
            _say(f"  ({p}/{q}, {p2}/{q}) realized at ({rec.z[0]:.9g}, {rec.z[1]:.9g}), "
                 f"residual {rec.residual:.2g}")
    extra = [f"realized {r.v[0]},{r.v[1]}/{r.q} at {r.z[0]!r},{r.z[1]!r}" for r in realized]
    if "csv" in cfg.output:
        info = [rset.disclaimer, f"n {rset.n}", f"grid {rset.grid}", f"area {rset.area!r}"]
        write_csv(cfg.output["csv"], ["vx", "vy"], rset.vertices.tolist(), meta + info + extra)
    if "svg" in cfg.output:
        pts = [(r.v[0] / r.q, r.v[1] / r.q) for r in realized]
        _polygon_svg(cfg.output["svg"], rset, pts, meta)


def _polygon_svg(path, rset, marks, meta):
    v = np.asarray(rset.vertices)
    cloud = rset.rho
    lo = np.minimum(cloud.min(axis=0), v.min(axis=0)) - 0.1
    hi = np.maximum(cloud.max(axis=0), v.max(axis=0)) + 0.1
    canvas = SvgCanvas(lo[0], hi[0], lo[1], hi[1])
    canvas.points(cloud[:: max(1, len(cloud) // 4000)], radius=0.8)
    canvas.polygon(v.tolist(), stroke="crimson")
    if len(marks):
        canvas.points(marks, color="black", radius=3)
    canvas.save(path, meta + [rset.disclaimer])


def _cmd_action(cfg, iso, meta):
    from .action import average_linking, profile_by_name, symplectic_action

    profile = getattr(iso, "profile", None)
    if profile is None:
        profile = profile_by_name(cfg.get("profile"), cfg.get("lambda"))
    x0 = _floats(cfg.get("x0"), 2)[0]
    act = symplectic_action(iso, x0, profile)
    avg = average_linking(iso, x0, cfg.get("n"), cfg.get("samples"), cfg.seed)
    _say(f"action {act.value:.12g}; mean_1 {avg.mean_1:.6g} +- {avg.stderr_1:.2g}; "
         f"mean_{avg.n} {avg.mean_n:.6g} +- {avg.stderr_n:.2g}")
    if "csv" in cfg.output:
        header = ["profile", "x0x", "x0y", "action", "mean_1", "stderr_1", "mean_n", "stderr_n",
                  "n", "samples", "seed", "resampled"]
        row = [profile.name, x0[0], x0[1], act.value, avg.mean_1, avg.stderr_1, avg.mean_n,
               avg.stderr_n, avg.n, avg.samples, cfg.seed, avg.resampled]
        write_csv(cfg.output["csv"], header, [row], meta + [f"primitive {act.primitive_choice}"])


def _cmd_chain(cfg, iso, meta):
    from .chains import adler_weiss_partition, periodic_from_closed_chain, \
        random_closed_chains, transition_relation
    from .errors import ItineraryMismatch

    m = [int(v) for v in cfg.get("matrix").split(",")]
    if len(m) != 4:
        raise ConfigError("matrix needs four integers a,b,c,d")
    part = adler_weiss_partition(((m[0], m[1]), (m[2], m[3])))
    rel = transition_relation(part)
    chains = random_closed_chains(rel, cfg.get("count"), cfg.get("max_len"), cfg.seed)
    rows, texts = [], []
    for k, ch in enumerate(chains):
        texts.append(f"# chain {k}\n{ch.serialize()}")
        try:
            pp = periodic_from_closed_chain(part, ch)
        except ItineraryMismatch as exc:
            rows.append([k, ch.length, "", "", "", "", "mismatch", str(exc)])
            continue
        rows.append([k, pp.period, str(pp.torus[0]), str(pp.torus[1]),
                     str(pp.displacement[0]), str(pp.displacement[1]),
                     "boundary" if pp.on_boundary else "interior", ""])
    _say(f"{len(rel)} transitions; {len(chains)} closed chains; "
         f"{sum(r[6] != 'mismatch' for r in rows)} periodic points")
    extra = [part.note]
    if "csv" in cfg.output:
        write_csv(cfg.output["csv"], ["chain", "period", "x", "y", "dx", "dy", "position", "note"],
                  rows, meta + extra)
    if "chains" in cfg.output:
        with open(cfg.output["chains"], "w") as fh:
            fh.write("".join(f"# {line}\n" for line in meta + extra))
            fh.write("\n".join(texts) + "\n")
    if "svg" in cfg.output:
        part.to_svg(cfg.output["svg"], comments=meta)


def _cmd_thm1(cfg, iso, meta):
    from .pipelines import disc_demo
    from .witness import write_certificates

    profile = getattr(iso, "profile", None)
    if profile is None:
        raise ConfigError("thm1-demo needs a radial_hamiltonian map")
    res = disc_demo(iso, profile, cfg.get("n"), (cfg.get("radius"),),
                    samples=cfg.get("samples"), average_n=cfg.get("average_n"), seed=cfg.seed)
    _say(f"fixed point ({res.fixed_point[0]:g}, {res.fixed_point[1]:g}) with action "
         f"{res.action:.12g}; average linking {res.mean_n:.6g} +- {res.stderr_n:.2g}")
    _report_certificate(res.certificate)
    if "csv" in cfg.output:
        extra = [f"action {res.action!r}", f"mean_n {res.mean_n!r}", f"stderr_n {res.stderr_n!r}",
                 f"mean_1 {res.mean_1!r}", f"stderr_1 {res.stderr_1!r}"]
        write_certificates(cfg.output["csv"], [res.certificate], meta + extra)


def _cmd_thm2(cfg, iso, meta):
    from .pipelines import torus_demo
    from .witness import write_certificates

    if getattr(iso, "surface", None) is None or iso.surface.kind != "torus":
        raise ConfigError("thm2-demo needs a torus map")
    res = torus_demo(iso, cfg.get("grid"), cfg.get("rot_n"), cfg.get("max_period"),
                     cfg.get("seeds"), cfg.get("n"))
    _say(f"rotation set area {res.area:.6g}, origin margin {res.origin_margin:.6g}; "
         f"{len(res.realized)} rational vectors realized; {len(res.orbits)} zero-rotation orbits")
    _report_certificate(res.certificate)
    extra = [f"realized {r.v[0]},{r.v[1]}/{r.q} at {r.z[0]!r},{r.z[1]!r} residual {r.residual!r}"
             for r in res.realized]
    if "csv" in cfg.output:
        write_certificates(cfg.output["csv"], [res.certificate], meta + extra)
    if "svg" in cfg.output:
        pts = [(r.v[0] / r.q, r.v[1] / r.q) for r in res.realized]
        _polygon_svg(cfg.output["svg"], res.rotation_set, pts, meta)


_DISPATCH = {
    "torsion": _cmd_torsion,
    "linking": _cmd_linking,
    "witness": _cmd_witness,
    "rotset": _cmd_rotset,
    "action": _cmd_action,
    "chain": _cmd_chain,
    "thm1-demo": _cmd_thm1,
    "thm2-demo": _cmd_thm2,
}


def run(cfg):
    """Execute a validated :class:`ExperimentConfig`; errors propagate with their exit codes."""
    cfg.check_paths()
    iso = parse_map_section(cfg.map_section) if cfg.map_section else None
    meta = provenance(cfg.canonical_text(), [f"command {cfg.command}", f"seed {cfg.seed}"])
    _DISPATCH[cfg.command](cfg, iso, meta)
    return 0


# Argument parsing -----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="torsionlab",
                                     description="Torsion, linking and rotation sets of surface maps.")
    parser.add_argument("--version", action="version", version=f"torsionlab {__version__}")
    sub = parser.add_subparsers(dest="command")
    p = sub.add_parser("run", help="execute a config file")
    p.add_argument("config")
    for name, keys in _COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--map", dest="map_kind", help="map kind, e.g. double_shear")
        p.add_argument("--params", help='map parameters, e.g. "a=1.0, b=1.0"')
        p.add_argument("--representation", choices=("closed", "flow"))
        p.add_argument("--time-step", dest="time_step")
        p.add_argument("--seed", type=int, default=0)
        for key in sorted(_OUTPUT_KEYS):
            p.add_argument(f"--{key}", dest=f"out_{key}")
        for key in keys:
            p.add_argument(f"--{key.replace('_', '-')}", dest=f"opt_{key}")
    return parser


def config_from_args(args):
    map_section = {}
    if args.map_kind:
        map_section["kind"] = args.map_kind
    for key in ("params", "representation", "time_step"):
        val = getattr(args, key)
        if val is not None:
            map_section[key] = val
    options = {k[4:]: v for k, v in vars(args).items() if k.startswith("opt_") and v is not None}
    output = {k[4:]: v for k, v in vars(args).items() if k.startswith("out_") and v is not None}
    return ExperimentConfig(map_section, args.command, options, output, args.seed)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = load_config(args.config) if args.command == "run" else config_from_args(args)
        return run(cfg)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"torsionlab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"torsionlab: error: {exc}", file=sys.stderr)
        return 1
    except TorsionLabError as exc:
        print(f"torsionlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
