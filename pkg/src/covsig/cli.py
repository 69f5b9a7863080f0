"""Command-line front end.

Subcommands: coeff, comm-sweep, sense-sweep, crossover, verify.  Every
option can also come from a plain-text ``key=value`` file passed with
``--config``; flags given on the command line win.  Exit status is 0 on
success, 2 for configuration or domain errors (including unwritable
output), 3 for numerical failures and 4 when ``verify`` finds a failing
check.
"""
import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .comm import CommScenario, capability_fock, capability_gaussian, comm_crossover, willie_cg, willie_cp
from .errors import ConfigurationError, CovsigError, DivergenceError, DomainError, NumericalError
from .kernel import EPS_TAIL
from .optimizer import optimal_two_point
from .qre import CoefficientParams, cp_direct, cp_meixner, c_thermal_active
from .sensing import (
    SensingScenario,
    capability_fock_sensing,
    capability_tmsv,
    fock_exponent,
    sensing_crossover,
    tmsv_exponent,
    willie_c_tmsv,
    willie_cp_se,
)
from .sweep import SweepSpec, capability_or_zero
from . import verify as _verify

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4

COMM_COLUMNS = ["eta", "n_bar_B", "n_S", "capability_fock", "capability_gaussian", "C_P", "C_G", "crossover"]
SENSE_COLUMNS = [
    "gamma1", "n_bar_A", "n_bar_W", "n_S",
    "capability_fock_sensing", "capability_tmsv", "Phi_cov_opt", "Phi_TMSV",
    "s_star_fock", "s_star_tmsv", "C_P_se", "C_TMSV", "crossover",
]

# Values used when neither a flag nor the config file sets a key.
COMMON_DEFAULTS = {"delta": 0.05, "eps_tail": EPS_TAIL, "unit": "nats"}
SWEEP_DEFAULTS = {"n_S_min": 0.005, "n_S_max": 1.0, "points": 200, "scale": "linear", "workers": 1}
COMM_GRID = {"eta": "0.4,0.6,0.8", "n_bar_B": "0.01,0.05,0.1"}
SENSE_GRID = {"tau_A": 0.3, "tau_W": 0.3, "gamma1": "0.4,0.6,0.8", "n_bar_A": "0.01,0.05,0.1"}

FLOAT_KEYS = {
    "delta", "eps_tail", "n_S", "n_S_min", "n_S_max", "eta", "n_bar_B",
    "tau_A", "tau_W", "gamma1", "n_bar_A", "n_bar_W",
}
INT_KEYS = {"points", "workers"}


def fmt(x):
    """15 significant digits, '.' decimal, 'inf' for a divergent coefficient."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, int)):
        return str(int(x))
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".15g")


def read_config_file(path):
    cfg = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config {path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def _convert(key, value, allowed):
    if key not in allowed:
        raise ConfigurationError(f"unknown option {key!r}")
    if isinstance(value, (list, tuple)):
        return value
    try:
        if allowed[key] == "list":
            return [float(v) for v in str(value).split(",") if v.strip()]
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {value!r}") from None
    return value


def resolve(args, defaults, allowed):
    """Merge defaults, config file and flags (in increasing priority)."""
    merged = dict(defaults)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "func")}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    merged.update(flags)
    cfg = {k: _convert(k, v, allowed) for k, v in merged.items()}
    if cfg.get("unit", "nats") not in ("nats", "bits"):
        raise ConfigurationError(f"unit must be 'nats' or 'bits', got {cfg['unit']!r}")
    if "workers" in cfg and not 1 <= cfg["workers"] <= 64:
        raise ConfigurationError(f"workers must lie in [1, 64], got {cfg['workers']}")
    return cfg


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigurationError("missing required option(s): " + ", ".join(missing))


def _unit_scale(cfg):
    return 1.0 / math.log(2.0) if cfg["unit"] == "bits" else 1.0


def _provenance(command, cfg):
    def show(v):
        if isinstance(v, list):
            return ",".join(fmt(x) for x in v)
        return fmt(v) if isinstance(v, (int, float)) else str(v)

    parts = [f"{k}={show(cfg[k])}" for k in sorted(cfg) if k != "output"]
    return f"# covsig {__version__} {command} " + " ".join(parts)


def _emit(text, cfg):
    path = cfg.get("output")
    if not path or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"output: cannot write {path}: {exc.strerror}") from exc


def _csv_text(header_comment, columns, rows):
    buf = io.StringIO()
    buf.write(header_comment + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _map_rows(fn, tasks, workers):
    # ProcessPoolExecutor.map yields in submission order, so the bytes never depend on scheduling
    if workers <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _sweep(cfg):
    return SweepSpec(cfg["n_S_min"], cfg["n_S_max"], cfg["points"], cfg["scale"])


# ---- coeff ---------------------------------------------------------------

def cmd_coeff(cfg):
    _require(cfg, "n_S")
    n_S = cfg["n_S"]
    if not n_S >= 0:
        raise DomainError(f"n_S must be nonnegative, got {n_S}")
    two_point = optimal_two_point(n_S)
    mode = cfg.get("mode", "comm")
    if mode == "comm":
        _require(cfg, "eta", "n_bar_B")
        sc = CommScenario(cfg["eta"], cfg["n_bar_B"], cfg["delta"], cfg["eps_tail"])
        port, label = sc.willie_port, "C_G"
    elif mode == "sense":
        _require(cfg, "tau_A", "tau_W", "gamma1", "n_bar_A", "n_bar_W")
        sc = SensingScenario(cfg["tau_A"], cfg["tau_W"], cfg["gamma1"], cfg["n_bar_A"], cfg["n_bar_W"],
                             cfg["delta"], cfg["eps_tail"])
        port, label = sc.willie_port(0), "C_TMSV"
    else:
        raise ConfigurationError(f"mode must be 'comm' or 'sense', got {mode!r}")
    try:
        gauss = c_thermal_active(port, n_S)
    except DivergenceError:
        gauss = math.inf
    support = {k: float(v) for k, v in enumerate(two_point.rho) if v > 0}
    lines = [
        _provenance("coeff", cfg),
        f"mode = {mode}",
        f"willie_port = kappa {fmt(port.kappa)} nu {fmt(port.nu)}",
        f"C_P_direct = {fmt(cp_direct(port, two_point))}",
        f"C_P_meixner = {fmt(cp_meixner(CoefficientParams.from_port(port), two_point))}",
        f"{label} = {fmt(gauss)}",
        "two_point = " + " ".join(f"rho_{k}={fmt(v)}" for k, v in support.items()),
    ]
    _emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK


# ---- sweeps --------------------------------------------------------------

def _comm_row(task):
    eta, n_bar_B, delta, eps_tail, n_S = task
    sc = CommScenario(eta, n_bar_B, delta, eps_tail)
    try:
        c_g = willie_cg(sc, n_S)
    except DivergenceError:
        c_g = math.inf
    fock = capability_fock(sc, n_S)
    gauss = capability_or_zero(capability_gaussian, sc, n_S)
    return fock, gauss, willie_cp(sc, n_S), c_g


def cmd_comm_sweep(cfg):
    grid = _sweep(cfg).grid()
    scenarios = list(itertools.product(cfg["eta"], cfg["n_bar_B"]))
    for eta, n_bar_B in scenarios:
        CommScenario(eta, n_bar_B, cfg["delta"], cfg["eps_tail"])  # fail fast on bad ranges
    tasks = [(e, b, cfg["delta"], cfg["eps_tail"], float(n)) for e, b in scenarios for n in grid]
    scale = _unit_scale(cfg)
    rows = []
    for task, (fock, gauss, c_p, c_g) in zip(tasks, _map_rows(_comm_row, tasks, cfg["workers"])):
        rows.append((task[0], task[1], task[4], fock * scale, gauss * scale, c_p, c_g, fock >= gauss))
    _emit(_csv_text(_provenance("comm-sweep", cfg), COMM_COLUMNS, rows), cfg)
    return EXIT_OK


def _sense_row(task):
    sc, n_S = task
    fock = fock_exponent(sc, n_S)
    tmsv = tmsv_exponent(sc, n_S)
    try:
        c_tmsv = willie_c_tmsv(sc, n_S)
    except DivergenceError:
        c_tmsv = math.inf
    cap_f = capability_fock_sensing(sc, n_S)
    cap_t = capability_or_zero(capability_tmsv, sc, n_S)
    return cap_f, cap_t, fock, tmsv, willie_cp_se(sc, n_S), c_tmsv


def _sense_scenarios(cfg):
    n_bar_W = cfg.get("n_bar_W")
    if n_bar_W is None:
        pairs = [(a, a) for a in cfg["n_bar_A"]]
    else:
        pairs = list(itertools.product(cfg["n_bar_A"], n_bar_W))
    return [
        SensingScenario(cfg["tau_A"], cfg["tau_W"], g, a, w, cfg["delta"], cfg["eps_tail"])
        for g in cfg["gamma1"] for a, w in pairs
    ]


def cmd_sense_sweep(cfg):
    grid = _sweep(cfg).grid()
    tasks = [(sc, float(n)) for sc in _sense_scenarios(cfg) for n in grid]
    scale = _unit_scale(cfg)
    rows = []
    for (sc, n_S), (cap_f, cap_t, fock, tmsv, c_p, c_t) in zip(
        tasks, _map_rows(_sense_row, tasks, cfg["workers"])
    ):
        rows.append((
            sc.gamma1, sc.n_bar_A, sc.n_bar_W, n_S, cap_f * scale, cap_t * scale,
            fock.exponent * scale, tmsv.exponent * scale, fock.s_star, tmsv.s_star,
            c_p, c_t, cap_f >= cap_t,
        ))
    _emit(_csv_text(_provenance("sense-sweep", cfg), SENSE_COLUMNS, rows), cfg)
    return EXIT_OK


# ---- crossover -----------------------------------------------------------

def _none_or(x):
    return "none" if x is None else x


def cmd_crossover(cfg):
    sweep = _sweep(cfg)
    mode = cfg.get("mode", "comm")
    if mode == "comm":
        columns = ["eta", "n_bar_B", "crossover_n_S"]
        rows = []
        for eta, n_bar_B in itertools.product(cfg["eta"], cfg["n_bar_B"]):
            sc = CommScenario(eta, n_bar_B, cfg["delta"], cfg["eps_tail"])
            rows.append((eta, n_bar_B, _none_or(comm_crossover(sc, sweep))))
    elif mode == "sense":
        columns = ["gamma1", "n_bar_A", "n_bar_W", "crossover_n_S"]
        rows = [
            (sc.gamma1, sc.n_bar_A, sc.n_bar_W, _none_or(sensing_crossover(sc, sweep)))
            for sc in _sense_scenarios(cfg)
        ]
    else:
        raise ConfigurationError(f"mode must be 'comm' or 'sense', got {mode!r}")
    _emit(_csv_text(_provenance("crossover", cfg), columns, rows), cfg)
    return EXIT_OK


# ---- verify --------------------------------------------------------------

def cmd_verify(cfg):
    level = cfg.get("level", "quick")
    if level not in ("quick", "full"):
        raise ConfigurationError(f"level must be 'quick' or 'full', got {level!r}")
    summary = _verify.run(level)
    _emit(json.dumps(summary, indent=2) + "\n", cfg)
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


# ---- argument parsing ------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="key=value file; flags override its entries")
    p.add_argument("--delta", help="covertness budget (default 0.05)")
    p.add_argument("--eps-tail", dest="eps_tail", help="truncation tail mass (default 1e-14)")
    p.add_argument("--unit", help="nats or bits for capabilities and exponents")
    p.add_argument("--output", "-o", help="output path (default stdout)")


def _sweep_opts(p):
    p.add_argument("--n-S-min", dest="n_S_min")
    p.add_argument("--n-S-max", dest="n_S_max")
    p.add_argument("--points")
    p.add_argument("--scale", help="linear or log")
    p.add_argument("--workers", help="size of the process pool (rows keep their order)")


def _comm_opts(p, lists):
    p.add_argument("--eta", help="comma-separated list" if lists else None)
    p.add_argument("--n-bar-B", dest="n_bar_B", help="comma-separated list" if lists else None)


def _sense_opts(p, lists):
    p.add_argument("--tau-A", dest="tau_A")
    p.add_argument("--tau-W", dest="tau_W")
    p.add_argument("--gamma1", help="comma-separated list" if lists else None)
    p.add_argument("--n-bar-A", dest="n_bar_A", help="comma-separated list" if lists else None)
    p.add_argument("--n-bar-W", dest="n_bar_W",
                   help="comma-separated list; defaults to n_bar_A" if lists else None)


def build_parser():
    parser = argparse.ArgumentParser(prog="covsig", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"covsig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)

    p = add("coeff", "QRE coefficients and the optimal two-point state")
    _common(p)
    p.add_argument("--mode", help="comm (default) or sense")
    p.add_argument("--n-S", dest="n_S", help="mean photon number of the active state")
    _comm_opts(p, lists=False)
    _sense_opts(p, lists=False)

    p = add("comm-sweep", "communication capability sweep as CSV")
    _common(p)
    _sweep_opts(p)
    _comm_opts(p, lists=True)

    p = add("sense-sweep", "sensing capability sweep as CSV")
    _common(p)
    _sweep_opts(p)
    _sense_opts(p, lists=True)

    p = add("crossover", "first n_S where the Fock-diagonal scheme wins")
    _common(p)
    _sweep_opts(p)
    p.add_argument("--mode", help="comm (default) or sense")
    _comm_opts(p, lists=True)
    _sense_opts(p, lists=True)

    p = add("verify", "run the cross-representation oracle suites")
    _common(p)
    p.add_argument("--level", help="quick (default) or full")
    return parser


def _schema(command, mode=None):
    """(defaults, allowed-key table) for a subcommand."""
    common = dict.fromkeys(list(COMMON_DEFAULTS) + ["output"], "scalar")
    sweep = dict.fromkeys(SWEEP_DEFAULTS, "scalar")
    if command == "coeff":
        allowed = common | dict.fromkeys(
            ["mode", "n_S", "eta", "n_bar_B", "tau_A", "tau_W", "gamma1", "n_bar_A", "n_bar_W"], "scalar")
        return dict(COMMON_DEFAULTS), allowed
    if command == "verify":
        return dict(COMMON_DEFAULTS), common | {"level": "scalar"}
    comm = {"eta": "list", "n_bar_B": "list"}
    sense = {"tau_A": "scalar", "tau_W": "scalar", "gamma1": "list", "n_bar_A": "list", "n_bar_W": "list"}
    base = COMMON_DEFAULTS | SWEEP_DEFAULTS
    if command == "comm-sweep":
        return base | COMM_GRID, common | sweep | comm
    if command == "sense-sweep":
        return base | SENSE_GRID, common | sweep | sense
    allowed = common | sweep | comm | sense | {"mode": "scalar"}
    return base | (SENSE_GRID if mode == "sense" else COMM_GRID), allowed


COMMANDS = {
    "coeff": cmd_coeff,
    "comm-sweep": cmd_comm_sweep,
    "sense-sweep": cmd_sense_sweep,
    "crossover": cmd_crossover,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        mode = getattr(args, "mode", None)
        if mode is None and getattr(args, "config", None) and args.command == "crossover":
            mode = read_config_file(args.config).get("mode")
        defaults, allowed = _schema(args.command, mode)
        cfg = resolve(args, defaults, allowed)
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, DomainError) as exc:
        print(f"covsig: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"covsig: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CovsigError as exc:
        print(f"covsig: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
