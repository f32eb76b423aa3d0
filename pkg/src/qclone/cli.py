"""Command-line front end: analytic curves, synthetic experiments, detector
calibration and miscalibration sweeps, emitted as CSV or JSON tables.

Exit codes: 0 success, 1 config error, 2 data error, 3 calibration hit the
search boundary and --strict was given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field, fields

import numpy as np

from .cloner import (
    MachineTriple,
    clone_fidelities,
    machine_triple,
    success_probability,
    tradeoff_residual,
)
from .detection import EfficiencyPair, read_records, run_experiment, write_records
from .states import CATALOG_LABELS
from .estimation import (
    OBJECTIVES,
    NoDataError,
    calibrate,
    calibrate_pooled,
    report,
)
from .robustness import (
    biased_mean,
    biased_mean_b,
    error_bound,
    eta_from_mismatch,
    taylor_form,
    taylor_form_b,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_BOUNDARY = 3

DEFAULT_T_VALUES = tuple(float(np.sqrt(n / 5.0)) for n in range(6))

SCHEMAS = {
    "analytic": ("kind", "t", "f_a", "f_b", "p", "success_prob", "tradeoff_residual"),
    "simulate_report": (
        "t", "state", "basis", "role", "f_a", "f_b",
        "mean_a", "mean_b", "variance_a", "variance_b",
    ),
    "records": ("t", "state", "basis", "role", "c_pp", "c_pm", "c_mp", "c_mm"),
    "calibrate_summary": (
        "t", "eta_a", "eta_b", "objective", "objective_value", "boundary_hit",
        "mean_a_before", "mean_b_before", "mean_a_after", "mean_b_after",
    ),
    "calibrate_states": ("t", "state", "basis", "role", "f_a", "f_b"),
    "robustness": (
        "eps_a", "eps_b", "exact_a", "quad_a", "bound_a",
        "exact_b", "quad_b", "bound_b",
    ),
}


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class RunConfig:
    t_values: tuple = DEFAULT_T_VALUES
    eta_a: float = 1.046
    eta_b: float = 0.840
    counts: float = 1e5
    seed: int = 12345
    noiseless: bool = False
    objective: str = "sum"
    pooled: bool = False
    out: str = "-"
    records: str | None = None
    format: str = "csv"
    strict: bool = False
    eps_max: float = 0.2
    eps_points: int = 21
    triple: tuple | None = None

    def validate(self) -> None:
        for t in self.t_values:
            if not 0.0 <= t <= 1.0:
                raise ConfigError(f"t value {t} outside [0, 1]")
        if self.counts <= 0:
            raise ConfigError(f"counts must be positive, got {self.counts}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    @property
    def eta(self) -> EfficiencyPair:
        return EfficiencyPair(self.eta_a, self.eta_b)

    def resolved(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


_BOOL_KEYS = {"noiseless", "pooled", "strict"}
_FLOAT_KEYS = {"eta_a", "eta_b", "counts", "eps_max"}
_INT_KEYS = {"seed", "eps_points"}
_LIST_KEYS = {"t_values", "triple"}


def parse_config_file(path: str) -> dict:
    """Flat key=value config; '#' starts a comment."""
    values = {}
    known = {f.name for f in fields(RunConfig)}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: field {key!r}: {exc}")
    return values


def _coerce(key: str, val: str):
    if key in _BOOL_KEYS:
        if val.lower() in ("true", "1", "yes"):
            return True
        if val.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"not a boolean: {val!r}")
    if key in _FLOAT_KEYS:
        return float(val)
    if key in _INT_KEYS:
        return int(val)
    if key in _LIST_KEYS:
        return tuple(float(x) for x in val.split(","))
    return val


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults < config file < CLI flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, val in parse_config_file(args.config).items():
            setattr(cfg, key, val)
    flag_map = {
        "t": "t_values",
        "eta_a": "eta_a",
        "eta_b": "eta_b",
        "counts": "counts",
        "seed": "seed",
        "noiseless": "noiseless",
        "objective": "objective",
        "pooled": "pooled",
        "out": "out",
        "records": "records",
        "format": "format",
        "strict": "strict",
        "eps_max": "eps_max",
        "eps_points": "eps_points",
        "triple": "triple",
    }
    for flag, key in flag_map.items():
        val = getattr(args, flag, None)
        if val is not None and val is not False:
            if key in _LIST_KEYS and isinstance(val, str):
                try:
                    val = tuple(float(x) for x in val.split(","))
                except ValueError as exc:
                    raise ConfigError(f"--{flag}: {exc}")
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


# --- table output -----------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_table(columns, rows, path: str, fmt: str, config: dict | None = None) -> None:
    """Atomically write a table; path '-' means stdout."""
    if fmt == "json":
        payload = {"columns": list(columns), "rows": [list(r) for r in rows]}
        if config is not None:
            payload["config"] = config
        text = json.dumps(payload, indent=2, default=_fmt) + "\n"
    else:
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".qclone-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise DataError(f"cannot write {path}: {exc}")


def _sibling_path(path: str, suffix: str) -> str:
    if path == "-":
        return "-"
    stem, ext = os.path.splitext(path)
    return f"{stem}_{suffix}{ext or '.csv'}"


def _echo_config(cfg: RunConfig) -> None:
    resolved = " ".join(f"{k}={v}" for k, v in cfg.resolved().items())
    print(f"# resolved config: {resolved}", file=sys.stderr)


# --- subcommands ------------------------------------------------------------

def cmd_analytic(cfg: RunConfig) -> int:
    rows = []
    for kind, ts in (("grid", cfg.t_values), ("curve", np.linspace(0.0, 1.0, 200))):
        for t in ts:
            fa, fb = clone_fidelities(float(t))
            m = machine_triple(float(t))
            rows.append(
                (kind, float(t), fa, fb, m.p, success_probability(float(t)),
                 tradeoff_residual(fa, fb))
            )
    write_table(SCHEMAS["analytic"], rows, cfg.out, cfg.format, cfg.resolved())
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    records_path = cfg.records or _sibling_path(cfg.out, "records")
    all_records = []
    rows = []
    for i, t in enumerate(cfg.t_values):
        recs = run_experiment(
            t, cfg.eta, cfg.counts, seed=cfg.seed + i, noiseless=cfg.noiseless
        )
        all_records.extend(recs)
        rep = report(recs)
        for rec, (fa, fb) in zip(recs, rep.per_state):
            rows.append(
                (t, rec.state_label, rec.basis_label, rec.role, fa, fb,
                 rep.mean_a, rep.mean_b, rep.variance_a, rep.variance_b)
            )
    try:
        write_records(all_records, records_path)
    except OSError as exc:
        raise DataError(f"cannot write records to {records_path}: {exc}")
    write_table(SCHEMAS["simulate_report"], rows, cfg.out, cfg.format, cfg.resolved())
    print(f"# records written to {records_path}", file=sys.stderr)
    return EXIT_OK


def _grouped_by_t(records):
    groups: dict[float, list] = {}
    for rec in records:
        groups.setdefault(rec.t, []).append(rec)
    return groups


def cmd_calibrate(cfg: RunConfig) -> int:
    if not cfg.records:
        raise ConfigError("calibrate requires --records <record file>")
    try:
        records = read_records(cfg.records)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read records from {cfg.records}: {exc}")
    groups = _grouped_by_t(records)
    if not groups:
        raise DataError(f"no records found in {cfg.records}")

    summary_rows = []
    state_rows = []
    boundary = False
    try:
        if cfg.pooled:
            pooled = calibrate_pooled(list(groups.values()), objective=cfg.objective)
            results = {t: pooled.eta for t in groups}
        else:
            results = None
        for t in sorted(groups):
            recs = groups[t]
            if cfg.pooled:
                eta = results[t]
                before = report(recs)
                after = report(recs, eta_correction=eta)
                res_obj = pooled.objective_value
                hit = pooled.boundary_hit
            else:
                res = calibrate(recs, objective=cfg.objective)
                eta, after = res.eta, res.report
                before = report(recs)
                res_obj = res.objective_value
                hit = res.boundary_hit
            boundary = boundary or hit
            summary_rows.append(
                (t, eta.eta_a, eta.eta_b, cfg.objective, res_obj, hit,
                 before.mean_a, before.mean_b, after.mean_a, after.mean_b)
            )
            by_state = {r.state_label: r for r in recs}
            for label, (fa, fb) in zip(CATALOG_LABELS, after.per_state):
                rec = by_state[label]
                state_rows.append((t, label, rec.basis_label, rec.role, fa, fb))
    except (NoDataError, ValueError) as exc:
        raise DataError(str(exc))

    write_table(SCHEMAS["calibrate_summary"], summary_rows, cfg.out, cfg.format, cfg.resolved())
    states_path = _sibling_path(cfg.out, "states")
    write_table(SCHEMAS["calibrate_states"], state_rows, states_path, cfg.format)
    if states_path != "-":
        print(f"# calibrated per-state table written to {states_path}", file=sys.stderr)
    if boundary:
        print("# warning: calibration hit the search-domain boundary", file=sys.stderr)
        if cfg.strict:
            return EXIT_BOUNDARY
    return EXIT_OK


def _machine_from_config(cfg: RunConfig) -> MachineTriple:
    if cfg.triple is not None:
        if len(cfg.triple) != 3:
            raise ConfigError("--triple needs three comma-separated values f_a,f_b,p")
        m = MachineTriple(*cfg.triple)
        try:
            m.validate()
        except ValueError as exc:
            raise ConfigError(str(exc))
        return m
    if len(cfg.t_values) != 1:
        raise ConfigError("robustness needs a single --t value or an explicit --triple")
    return machine_triple(cfg.t_values[0])


def cmd_robustness(cfg: RunConfig) -> int:
    m = _machine_from_config(cfg)
    form_a = taylor_form(m)
    form_b = taylor_form_b(m)
    print(
        f"# clone A quadratic coefficients: "
        f"{form_a.coeff_aa:.12g}, {form_a.coeff_ab:.12g}, {form_a.coeff_bb:.12g}; "
        f"bound factor {form_a.max_eigenvalue():.12g}",
        file=sys.stderr,
    )
    print(
        f"# clone B quadratic coefficients: "
        f"{form_b.coeff_aa:.12g}, {form_b.coeff_ab:.12g}, {form_b.coeff_bb:.12g}; "
        f"bound factor {form_b.max_eigenvalue():.12g}",
        file=sys.stderr,
    )
    eps = np.linspace(-cfg.eps_max, cfg.eps_max, cfg.eps_points)
    rows = []
    for ea in eps:
        for eb in eps:
            eta = eta_from_mismatch(float(ea), float(eb))
            rows.append(
                (
                    float(ea), float(eb),
                    biased_mean(m, eta) - m.fid_a,
                    form_a.evaluate(float(ea), float(eb)),
                    error_bound(form_a, float(ea), float(eb)),
                    biased_mean_b(m, eta) - m.fid_b,
                    form_b.evaluate(float(ea), float(eb)),
                    error_bound(form_b, float(ea), float(eb)),
                )
            )
    write_table(SCHEMAS["robustness"], rows, cfg.out, cfg.format, cfg.resolved())
    return EXIT_OK


def cmd_schema(_cfg: RunConfig) -> int:
    for name, cols in SCHEMAS.items():
        print(f"{name}: {','.join(cols)}")
    print("record file: one record per line, fields as 'records' above;")
    print("state in {H,V,D,A,R,L}, basis in {HV,DA,RL}, role in {psi,perp}")
    return EXIT_OK


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "robustness": cmd_robustness,
    "schema": cmd_schema,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qclone",
        description="Asymmetric qubit-cloner simulation, calibration and robustness tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--t", help="comma-separated list of t values")
        p.add_argument("--eta-a", dest="eta_a", type=float)
        p.add_argument("--eta-b", dest="eta_b", type=float)
        p.add_argument("--counts", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--noiseless", action="store_true", default=None)
        p.add_argument("--objective", choices=OBJECTIVES)
        p.add_argument("--pooled", action="store_true", default=None)
        p.add_argument("--out", help="output path, '-' for stdout")
        p.add_argument("--records", help="record file (simulate: write, calibrate: read)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--strict", action="store_true", default=None)
        p.add_argument("--eps-max", dest="eps_max", type=float)
        p.add_argument("--eps-points", dest="eps_points", type=int)
        p.add_argument("--triple", help="explicit machine f_a,f_b,p (robustness)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        _echo_config(cfg)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
