"""
Command-line front end.

    qwmem run CONFIG.yaml
    qwmem validate GRAPH PARTITION [--memory D] [--successor FILE]
    qwmem export {qwm1,qwm2} N OUTDIR

Global flags: ``--seed`` (random parameter sweeps only) and ``--max-basis``
(dense-operator cap).  See README.md for the config schema and exit codes.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import __version__
from .analysis import (
    DEFAULT_BASIS_CAP,
    STATE_TOL,
    dense_operator,
    distributions,
    moments,
    qwm_equivalence_experiment,
    step,
)
from .bridge import coined_to_szegedy, map_state
from .coined import (
    HADAMARD,
    CoinedWalk,
    CoinOperator,
    InvalidWalkError,
    build_qwm1,
    build_qwm2,
    localized_initial_state,
)
from .formats import (
    FormatError,
    read_amplitudes,
    read_graph,
    read_partition,
    read_successor,
    write_amplitudes,
    write_graph,
    write_partition,
    write_successor,
)
from .graph import (
    GraphError,
    RegularDigraph,
    ResourceLimitError,
    arc_paths,
    cycle_graph,
    is_cycle_graph,
    iterated_line_digraph,
)
from .partition import (
    is_dicycle_partition,
    validate_arc_successor,
    validate_coin_shift,
    validate_vertex_partition,
)
from .szegedy import SzegedyWalk, TransitionAmplitudes

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INVALID = 4
EXIT_CHECK = 5

BUILDERS = {"qwm1": build_qwm1, "qwm2": build_qwm2}

WALK_KEYS = frozenset(
    "model builder N graph memory partition coin successor amplitudes steps output oracle name out_dir initial".split()
)
EXPERIMENT_KEYS = frozenset("experiment N t amplitudes random seed tolerance x name out_dir".split())


class ConfigError(ValueError):
    pass


class ValidationFailure(Exception):
    def __init__(self, reports: list):
        super().__init__("\n".join(str(r) for r in reports))
        self.reports = reports


# --- config helpers -----------------------------------------------------------------


def _complex(value: Any, where: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{where}: complex pairs must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(str(value).replace(" ", "")) if isinstance(value, str) else complex(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot read {value!r} as a complex number") from None


def _require(cfg: dict, key: str, kind=None):
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r}")
    val = cfg[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"{key!r} must be {kind.__name__}, got {type(val).__name__}")
    return val


def _int(cfg: dict, key: str, default=None, minimum=None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{key!r} must be an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(f"{key!r} must be >= {minimum}, got {val}")
    return val


def load_config(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read config {path}: {exc}") from None
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return cfg


def _coin_from_config(spec: Any, m: int) -> CoinOperator:
    if isinstance(spec, str):
        name = spec.lower()
        if name == "hadamard":
            if m != 2:
                raise ConfigError("the hadamard coin needs m = 2")
            return CoinOperator(HADAMARD)
        if name == "grover":
            return CoinOperator(2 / m * np.ones((m, m)) - np.eye(m))
        if name == "identity":
            return CoinOperator(np.eye(m))
        raise ConfigError(f"unknown coin {spec!r} (hadamard, grover, identity, or a matrix)")
    if isinstance(spec, list):
        try:
            mat = np.array([[_complex(z, "coin") for z in row] for row in spec])
        except TypeError:
            raise ConfigError("coin matrix must be a list of rows") from None
        if mat.shape != (m, m):
            raise ConfigError(f"coin matrix must be {m}x{m}, got {mat.shape}")
        return CoinOperator(mat)
    raise ConfigError(f"cannot interpret coin {spec!r}")


@dataclass
class Prepared:
    walk: Any
    psi0: np.ndarray
    base: RegularDigraph
    label: str


def _resolve(base_dir: Path, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else base_dir / p


def _walk_from_files(cfg: dict, base_dir: Path):
    base = read_graph(_resolve(base_dir, _require(cfg, "graph", str)))
    depth = _int(cfg, "memory", 1, minimum=0)
    if depth:
        g, paths = iterated_line_digraph(base, depth)
    else:
        g, paths = base, np.arange(base.n_vertices)[:, None]
    model = cfg.get("model", "coined")
    if model == "coined":
        p, gc = read_partition(_resolve(base_dir, _require(cfg, "partition", str)), g)
        reports = [validate_vertex_partition(p)]
        if reports[0].ok:
            reports.append(validate_coin_shift(gc, p))
        bad = [r for r in reports if not r.ok]
        if bad:
            raise ValidationFailure(bad)
        coin = _coin_from_config(cfg.get("coin", "hadamard"), g.degree)
        return CoinedWalk(g, p, gc, coin, paths, "coined"), base
    succ = read_successor(_resolve(base_dir, _require(cfg, "successor", str)), g)
    report = validate_arc_successor(succ)
    if not report.ok:
        raise ValidationFailure([report])
    amp_spec = cfg.get("amplitudes", "uniform")
    if amp_spec == "uniform":
        amps = TransitionAmplitudes.uniform(g)
    else:
        amps = read_amplitudes(_resolve(base_dir, str(amp_spec)), g)
    return SzegedyWalk(g, succ, amps, paths=paths, name="szegedy"), base


def _basis_index(label: Any, walk, model: str) -> int:
    if isinstance(label, int) and not isinstance(label, bool):
        idx = label
    else:
        try:
            idx = _label_index(str(label), walk, model)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"cannot parse basis label {label!r}") from None
    if not 0 <= idx < walk.dim:
        raise ConfigError(f"basis index {idx} out of range 0..{walk.dim - 1}")
    return idx


def _label_index(text: str, walk, model: str) -> int:
    m = walk.graph.degree
    if model == "coined":
        if ":" not in text:
            raise ConfigError(f"coined basis labels look like 'x0,...,xd:coin', got {text!r}")
        path_s, coin_s = text.rsplit(":", 1)
        path = tuple(int(x) for x in path_s.split(","))
        index = {tuple(p): v for v, p in enumerate(walk.paths.tolist())}
        if path not in index:
            raise ConfigError(f"{path_s!r} is not a vertex of the memory graph")
        coin = int(coin_s)
        if not 0 <= coin < m:
            raise ConfigError(f"coin {coin} out of range 0..{m - 1}")
        return index[path] * m + coin
    path = tuple(int(x) for x in text.split(","))
    index = {tuple(p): a for a, p in enumerate(arc_paths(walk.graph, walk.paths).tolist())}
    if path not in index:
        raise ConfigError(f"{text!r} is not an arc of the memory graph")
    return index[path]


def _initial_state(cfg: dict, walk, coined_twin: Optional[CoinedWalk], correspondence, model: str):
    init = cfg.get("initial", {"preset": "localized", "amplitudes": [1, 0, 0, 0]})
    if not isinstance(init, dict):
        raise ConfigError("'initial' must be a mapping")
    if "preset" in init:
        if init["preset"] != "localized":
            raise ConfigError(f"unknown initial preset {init['preset']!r}")
        if coined_twin is None:
            raise ConfigError("the localized preset needs a builder walk (qwm1 or qwm2)")
        amps = [_complex(z, "initial.amplitudes") for z in init.get("amplitudes", [1, 0, 0, 0])]
        if len(amps) != 4:
            raise ConfigError("initial.amplitudes needs four entries (a, b, a', b')")
        x = init.get("x")
        psi = localized_initial_state(coined_twin, amps, x, swap_left=bool(init.get("swap_left", False)))
        if model == "szegedy":
            psi = map_state(psi, correspondence, "arc")
    elif "states" in init:
        psi = np.zeros(walk.dim, dtype=np.complex128)
        for entry in init["states"]:
            if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                raise ConfigError(f"initial.states entries are [label, re, im], got {entry!r}")
            label, re, im = entry
            psi[_basis_index(label, walk, model)] += complex(float(re), float(im))
    else:
        raise ConfigError("'initial' needs either 'preset' or 'states'")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1) > STATE_TOL:
        raise ConfigError(f"initial state has squared norm {norm:.12g}, expected 1")
    return psi


def prepare(cfg: dict, base_dir: Path) -> Prepared:
    model = cfg.get("model", "coined")
    if model not in ("coined", "szegedy"):
        raise ConfigError(f"model must be 'coined' or 'szegedy', got {model!r}")
    twin = correspondence = None
    if "builder" in cfg:
        builder = cfg["builder"]
        if builder not in BUILDERS:
            raise ConfigError(f"unknown builder {builder!r} (choose from {sorted(BUILDERS)})")
        n = _int(cfg, "N", minimum=4)
        twin = BUILDERS[builder](n)
        base = cycle_graph(n)
        walk: Any = twin
        label = builder
        if model == "szegedy":
            bridged = coined_to_szegedy(twin)
            walk, correspondence = bridged.walk, bridged.correspondence
            label = f"{builder}-szegedy"
    else:
        walk, base = _walk_from_files(cfg, base_dir)
        label = model
    psi0 = _initial_state(cfg, walk, twin, correspondence, model)
    return Prepared(walk, psi0, base, str(cfg.get("name", label)))


# --- output -------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path: Path, labels, rows: np.ndarray) -> None:
    lines = [",".join(labels)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _sidecar(path: Path, cfg: dict, argv: list[str]) -> None:
    _write_json(
        path,
        {
            "created": datetime.now(timezone.utc).isoformat(),
            "qwmem_version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "argv": argv,
            "config": cfg,
        },
    )


def run_walk(cfg: dict, base_dir: Path, out_dir: Path, max_basis: int) -> tuple[dict, int]:
    prep = prepare(cfg, base_dir)
    steps = _int(cfg, "steps", minimum=0)
    output = cfg.get("output", "csv")
    if output not in ("csv", "json"):
        raise ConfigError(f"output must be 'csv' or 'json', got {output!r}")
    walk = prep.walk
    probs = distributions(walk, prep.psi0, steps)
    sums = probs.sum(axis=1)
    report: dict[str, Any] = {
        "name": prep.label,
        "model": cfg.get("model", "coined"),
        "dim": walk.dim,
        "steps": steps,
        "positions": int(probs.shape[1]),
        "max_norm_deviation": float(np.max(np.abs(sums - 1))),
    }
    if is_cycle_graph(prep.base):
        origin = int(np.argmax(probs[0]))
        mean, std = moments(probs[-1], origin, prep.base)
        report["final_moments"] = {"origin": origin, "mean": mean, "std": std}
    status = EXIT_OK
    if cfg.get("oracle", False):
        u, dev = dense_operator(walk, cap=max_basis)
        psi = prep.psi0.copy()
        dense = prep.psi0.copy()
        worst = 0.0
        for _ in range(steps):
            psi = step(walk, psi)
            dense = u @ dense
            worst = max(worst, float(np.max(np.abs(psi - dense))))
        report["oracle"] = {"unitarity_deviation": dev, "max_state_diff": worst}
        if worst > STATE_TOL or dev > 1e-12:
            status = EXIT_CHECK
    if report["max_norm_deviation"] > STATE_TOL:
        status = EXIT_CHECK
    labels = list(prep.base.labels)
    if output == "csv":
        write_csv(out_dir / f"{prep.label}.csv", labels, probs)
    else:
        report["distributions"] = probs.tolist()
        report["labels"] = labels
    _write_json(out_dir / f"{prep.label}.json", report)
    return report, status


def run_equivalence(cfg: dict, out_dir: Path, seed: Optional[int]) -> tuple[dict, int]:
    n = _int(cfg, "N", minimum=4)
    t = _int(cfg, "t", minimum=0)
    tol = float(cfg.get("tolerance", STATE_TOL))
    runs = []
    if "random" in cfg:
        count = _int(cfg, "random", minimum=1)
        rng = np.random.default_rng(seed if seed is not None else cfg.get("seed", 0))
        for _ in range(count):
            z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            runs.append(z / np.linalg.norm(z))
    else:
        raw = _require(cfg, "amplitudes", list)
        runs.append([_complex(z, "amplitudes") for z in raw])
    try:
        reports = [qwm_equivalence_experiment(n, t, amps, start=cfg.get("x")) for amps in runs]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    worst = max(r.worst for r in reports)
    out = {
        "experiment": "qwm-equivalence",
        "N": n,
        "t": t,
        "tolerance": tol,
        "worst": worst,
        "passed": worst <= tol,
        "runs": [r.to_dict() for r in reports],
    }
    name = str(cfg.get("name", "qwm-equivalence"))
    _write_json(out_dir / f"{name}.json", out)
    return out, EXIT_OK if worst <= tol else EXIT_CHECK


def cmd_run(args) -> int:
    cfg_path = Path(args.config)
    cfg = load_config(cfg_path)
    unknown = sorted(set(cfg) - (EXPERIMENT_KEYS if "experiment" in cfg else WALK_KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(map(repr, unknown))}")
    base_dir = cfg_path.parent
    if args.out:
        out_dir = Path(args.out)
    else:
        out_dir = _resolve(base_dir, str(cfg.get("out_dir", ".")))
    out_dir.mkdir(parents=True, exist_ok=True)
    if "experiment" in cfg:
        if cfg["experiment"] != "qwm-equivalence":
            raise ConfigError(f"unknown experiment {cfg['experiment']!r}")
        report, status = run_equivalence(cfg, out_dir, args.seed)
        name = str(cfg.get("name", "qwm-equivalence"))
        print(f"qwm-equivalence N={report['N']} t={report['t']}: worst diff {report['worst']:.3e} "
              f"({'pass' if report['passed'] else 'FAIL'})")
    else:
        report, status = run_walk(cfg, base_dir, out_dir, args.max_basis)
        name = report["name"]
        print(f"{name}: {report['steps']} steps, dim {report['dim']}, "
              f"max norm deviation {report['max_norm_deviation']:.3e}")
    _sidecar(out_dir / f"{name}.meta.json", cfg, args.argv)
    return status


def cmd_validate(args) -> int:
    base = read_graph(args.graph)
    if args.memory:
        g, _ = iterated_line_digraph(base, args.memory)
    else:
        g = base
    p, gc = read_partition(args.partition, g)
    reports = [validate_vertex_partition(p)]
    result: dict[str, Any] = {}
    if reports[0].ok:
        reports.append(validate_coin_shift(gc, p))
        dicycle = is_dicycle_partition(p)
        result["dicycle"] = dicycle
    if args.successor:
        reports.append(validate_arc_successor(read_successor(args.successor, g)))
    valid = all(r.ok for r in reports)
    for r in reports:
        if not r.ok:
            print(r)
    if valid:
        print(f"valid; dicycle: {'yes' if all(result['dicycle']) else 'no'}")
    else:
        print("invalid")
    result.update({"valid": valid, "reports": [r.to_dict() for r in reports]})
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK if valid else EXIT_INVALID


def cmd_export(args) -> int:
    walk = BUILDERS[args.builder](args.N)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(out / "base_graph.txt", cycle_graph(args.N))
    write_graph(out / "line_graph.txt", walk.graph)
    write_partition(out / f"{args.builder}_partition.txt", walk.partition, walk.shift)
    bridged = coined_to_szegedy(walk)
    write_successor(out / f"{args.builder}_successor.txt", bridged.walk.successor)
    write_amplitudes(out / f"{args.builder}_amplitudes.txt", bridged.walk.amplitudes)
    print(f"wrote {args.builder} files for N={args.N} to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwmem", description="Quantum walks with memory: coined and Szegedy forms.")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized parameter sweeps")
    parser.add_argument("--max-basis", type=int, default=DEFAULT_BASIS_CAP, help="dense-operator basis cap")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a walk or experiment described by a YAML config")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (overrides out_dir in the config)")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate partition / coin-shift / arc-successor files")
    p_val.add_argument("graph", help="graph file (the base graph when --memory > 0)")
    p_val.add_argument("partition", help="partition + coin-shift file for the walked graph")
    p_val.add_argument("--memory", type=int, default=0, help="build L^d of the graph file first")
    p_val.add_argument("--successor", help="arc-successor file to validate as well")
    p_val.set_defaults(func=cmd_validate)

    p_exp = sub.add_parser("export", help="write graph/partition/successor files for a builder walk")
    p_exp.add_argument("builder", choices=sorted(BUILDERS))
    p_exp.add_argument("N", type=int)
    p_exp.add_argument("outdir")
    p_exp.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FormatError, GraphError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationFailure as exc:
        print(f"validation failed:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidWalkError as exc:
        print(f"validation failed:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, ResourceLimitError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
