"""Config-driven experiment runner.

Subcommands:
  sweep        run a (set, eta, p) grid from a JSON config, append rows to a
               versioned CSV (resumable: completed keys are skipped)
  single       one grid point, metrics printed as JSON
  verify       the invariant suites (order-1 fault tolerance, oracle
               equivalence, code self-consistency)
  figures      derive per-figure data files from a sweep CSV
  oracle-check dense-oracle equivalence suite only

Worker count comes from --workers or the MAGICBIAS_WORKERS variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from .experiment import EnumeratedGadget, cost_estimate, enumerate_flags, fit_loglog_slope
from .gadget import NoisyFlags
from .noise import BiasSet, parse_eta, two_qubit_set
from .pauli import PauliString

SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "set", "eta", "p", "flags", "accept_rate", "leak_rate", "r_proc", "r_avg",
    "p_XL", "p_YL", "p_ZL", "eta_ZL", "eta_XL", "runtime",
]
COST_REFUSAL = 5e8

FLAG_FIELDS = ("stabilizer_state_prep", "magic_prep", "injection_cnot", "error_correction")


class ConfigError(Exception):
    pass


def load_config(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON ({err})") from err
    if raw.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"{path}: schema field must be {SCHEMA_VERSION}")
    for key in ("sets", "eta_grid", "p_grid"):
        if key not in raw or not raw[key]:
            raise ConfigError(f"{path}: missing or empty field {key!r}")
    names, bias_sets = [], []
    for s in raw["sets"]:
        if isinstance(s, str):
            if s not in ("Z", "X", "Y", "M"):
                raise ConfigError(f"{path}: unknown bias set {s!r}")
            names.append(s)
            bias_sets.append(two_qubit_set(s))
        elif isinstance(s, dict) and "name" in s and "generators" in s:
            try:
                gens = tuple(PauliString.parse(g, 2) for g in s["generators"])
                bias_sets.append(BiasSet(2, gens, name=s["name"]))
            except ValueError as err:
                raise ConfigError(f"{path}: bad bias set {s['name']!r}: {err}") from err
            names.append(s["name"])
        else:
            raise ConfigError(f"{path}: bias set entries are preset names or "
                              "{{name, generators}} objects")
    raw["set_names"] = names
    raw["bias_sets"] = tuple(bias_sets)
    raw["eta_grid"] = expand_eta_grid(raw["eta_grid"])
    for p in raw["p_grid"]:
        if not (0.0 < float(p) <= 0.1):
            raise ConfigError(f"{path}: p={p} outside (0, 0.1]")
    flags_dict = raw.get("noisy_flags", {})
    unknown = set(flags_dict) - set(FLAG_FIELDS)
    if unknown:
        raise ConfigError(f"{path}: unknown noisy_flags {sorted(unknown)}")
    raw["noisy_flags"] = NoisyFlags(**{f: bool(flags_dict.get(f, True)) for f in FLAG_FIELDS})
    raw.setdefault("truncation_order", 3)
    raw.setdefault("mode", "adaptive")
    if raw["mode"] not in ("adaptive", "non-adaptive"):
        raise ConfigError(f"{path}: mode must be adaptive or non-adaptive")
    raw.setdefault("output", "results.csv")
    return raw


def expand_eta_grid(grid) -> list[float]:
    out: list[float] = []
    if isinstance(grid, dict):
        lo, hi, n = float(grid["log_from"]), float(grid["log_to"]), int(grid["points"])
        ratio = (hi / lo) ** (1.0 / (n - 1)) if n > 1 else 1.0
        out = [lo * ratio**i for i in range(n)]
        for extra in grid.get("include", []):
            out.append(parse_eta(extra))
    else:
        out = [parse_eta(v) for v in grid]
    if not out:
        raise ConfigError("empty eta grid")
    return out


def eta_repr(eta: float) -> str:
    return "inf" if math.isinf(eta) else repr(float(eta))


def _fmt_ratio(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf"
    return f"{value:.12e}"


def row_key(set_name: str, eta: float, p: float, flags: NoisyFlags) -> tuple:
    return (set_name, eta_repr(eta), repr(float(p)), flags.key())


def existing_keys(path: Path) -> set[tuple]:
    if not path.exists():
        return set()
    keys = set()
    with path.open() as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in reader:
            keys.add((row["set"], row["eta"], row["p"], row["flags"]))
    return keys


def append_row(path: Path, row: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    new = not path.exists()
    with path.open("a", newline="") as fh:
        if new:
            fh.write(f"# magicbias sweep results, schema {SCHEMA_VERSION}\n")
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
        else:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writerow(row)


def run_sweep(args) -> int:
    cfg = load_config(args.config)
    flags: NoisyFlags = cfg["noisy_flags"]
    order = int(cfg["truncation_order"])
    out_path = Path(args.output or cfg["output"])
    cost = cost_estimate(flags, order)
    print(f"cost estimate: {cost:.3e} configurations "
          f"({len(cfg['sets'])} sets x {len(cfg['eta_grid'])} eta x {len(cfg['p_grid'])} p "
          f"reuse one enumeration)")
    if cost > COST_REFUSAL and not args.force:
        print("refusing to run without --force (estimated cost too large)", file=sys.stderr)
        return 2
    done = existing_keys(out_path)
    enumerated: EnumeratedGadget | None = None
    sidecar = {}
    for set_name in cfg["set_names"]:
        for eta in cfg["eta_grid"]:
            for p in cfg["p_grid"]:
                key = row_key(set_name, eta, float(p), flags)
                if key in done:
                    continue
                if enumerated is None:
                    enumerated = enumerate_flags(flags, order, args.workers,
                                                 bias_sets=cfg["bias_sets"])
                    print(f"enumeration finished in {enumerated.seconds:.1f}s")
                t0 = time.time()
                point = enumerated.grid_point(set_name, eta, float(p))
                m = point.metrics
                row = {
                    "set": set_name,
                    "eta": eta_repr(eta),
                    "p": repr(float(p)),
                    "flags": flags.key(),
                    "accept_rate": f"{m.accept_rate:.12e}",
                    "leak_rate": f"{m.leak_rate:.12e}",
                    "r_proc": f"{m.r_proc:.12e}",
                    "r_avg": f"{m.r_avg:.12e}",
                    "p_XL": f"{m.pauli_rates[0]:.12e}",
                    "p_YL": f"{m.pauli_rates[1]:.12e}",
                    "p_ZL": f"{m.pauli_rates[2]:.12e}",
                    "eta_ZL": _fmt_ratio(m.eta_zl),
                    "eta_XL": _fmt_ratio(m.eta_xl),
                    "runtime": f"{time.time() - t0:.3f}",
                }
                append_row(out_path, row)
                sidecar["|".join(key)] = [list(r) for r in point.ptm.tolist()]
                print(f"  {set_name} eta={eta_repr(eta)} p={p}: "
                      f"r_proc={m.r_proc:.3e} eta_ZL={m.eta_zl:.3g}")
    side_path = out_path.with_suffix(".ptm.json")
    if sidecar:
        merged = {}
        if side_path.exists():
            merged = json.loads(side_path.read_text())
        merged.update(sidecar)
        side_path.write_text(json.dumps(merged, indent=1, sort_keys=True))
    print(f"results in {out_path}")
    return 0


def run_single(args) -> int:
    if args.noisy is None:
        flags = NoisyFlags()
    else:
        flags = NoisyFlags(**{f: f in args.noisy for f in FLAG_FIELDS})
    eta = parse_eta(args.eta)
    enumerated = enumerate_flags(flags, args.order, args.workers)
    point = enumerated.grid_point(args.set, eta, args.p)
    out = point.metrics.as_dict()
    out["set"], out["eta"], out["p"] = args.set, eta_repr(eta), args.p
    print(json.dumps(out, indent=1, sort_keys=True))
    return 0


# -- verify suites -------------------------------------------------------------


def suite_code_consistency() -> list[str]:
    from . import code
    from .pauli import PauliString

    failures = []
    for i, g in enumerate(code.GENERATORS):
        for h in code.GENERATORS[i + 1:]:
            if not g.commutes(h):
                failures.append("generators do not commute")
        for logical in (code.X_LOGICAL, code.Z_LOGICAL):
            if not g.commutes(logical):
                failures.append("logical anticommutes with a generator")
    if code.X_LOGICAL.commutes(code.Z_LOGICAL):
        failures.append("X_L and Z_L commute")
    table = code.decoder_table()
    for s in range(64):
        if code.syndrome(table[s]) != s:
            failures.append(f"decoder entry {s} has wrong syndrome")
    for x in range(128):
        for z in range(128):
            e = PauliString(7, x, z)
            if e.weight() > 2 or e.weight() == 0:
                continue
            if code.syndrome(e) == 0:
                failures.append(f"weight-{e.weight()} operator {e} is undetectable")
    return failures


def suite_order1_ft(corrupt_decoder: bool = False) -> list[str]:
    import numpy as np

    from . import gadget as G

    failures = []
    saved = None
    if corrupt_decoder:
        saved = G._EC_DECODER_CACHE
        table = dict(G.ec_decoder())
        from . import code as code_mod
        # multiply a Z-syndrome entry by logical X: the miscorrection hides
        # from the final readout and must surface as a logical error
        table[1 << 3] = table[1 << 3] * code_mod.X_LOGICAL
        G._EC_DECODER_CACHE = table
        G._COMPILE_CACHE.clear()
    try:
        for state in ("0", "+"):
            for basis in ("Z", "X", "Y"):
                for branch in (0, 1):
                    cfg = G.GadgetConfig(
                        tomography_id=G.TomographyId(state, basis, branch),
                        truncation_order=1,
                    )
                    comp = G.compile_gadget(cfg)
                    res = G.evaluate_words(
                        comp,
                        comp.table_w0.reshape(-1),
                        comp.table_w1.reshape(-1),
                        branch,
                    )
                    i0, i1 = comp.ideal
                    ratio = i0 / (i0 + i1)
                    tot = res["out0"] + res["out1"]
                    bad = np.abs(res["out0"] - ratio * tot) > 1e-12
                    if bad.any():
                        failures.append(
                            f"{state}|{basis}|{branch}: {int(bad.sum())} order-1 faults leak logical errors"
                        )
    finally:
        if corrupt_decoder:
            G._EC_DECODER_CACHE = saved
            G._COMPILE_CACHE.clear()
    return failures


def suite_oracle() -> list[str]:
    import numpy as np

    from .circuit import Circuit
    from .noise import NoiseSpec, channel_probs, two_qubit_set
    from .oracle import channel_of_subcircuit

    failures = []
    toy = Circuit(3)  # unitary-only oracle segment (no preparations)
    toy.cnot(0, 1)
    toy.cnot(1, 2)
    spec = NoiseSpec(two_qubit_set("Z"), 0.25, 0.05)
    probs = channel_probs(spec)
    exact = channel_of_subcircuit(toy, probs)
    for order in (1, 2):
        trunc = channel_of_subcircuit(toy, probs, truncate_order=order)
        dropped = 1.0
        for k in range(order + 1):
            dropped -= math.comb(2, k) * spec.p**k * (1 - spec.p) ** (2 - k)
        bound = 2.0 * abs(dropped) + 1e-12
        err = float(np.max(np.abs(exact - trunc)))
        if err > bound:
            failures.append(f"toy truncation order {order}: error {err} > bound {bound}")
    return failures


def run_verify(args) -> int:
    suites = [
        ("code self-consistency", suite_code_consistency),
        ("order-1 fault tolerance", suite_order1_ft),
        ("oracle equivalence", suite_oracle),
    ]
    failed = False
    for name, fn in suites:
        failures = fn()
        status = "PASS" if not failures else "FAIL"
        failed = failed or bool(failures)
        print(f"[{status}] {name}")
        for f in failures:
            print(f"    {f}")
    return 1 if failed else 0


def run_oracle_check(args) -> int:
    failures = suite_oracle()
    print("[PASS] oracle equivalence" if not failures else "[FAIL] oracle equivalence")
    for f in failures:
        print("   ", f)
    return 1 if failures else 0


# -- figure data files ----------------------------------------------------------


def _read_rows(path: Path) -> list[dict]:
    if not path.exists():
        raise SystemExit(f"missing results file {path}")
    with path.open() as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    if not rows:
        raise SystemExit(f"{path} holds no result rows")
    missing = set(CSV_COLUMNS) - set(rows[0])
    if missing:
        raise SystemExit(f"{path} lacks columns {sorted(missing)}")
    return rows


FULL = NoisyFlags().key()
ABLATION = NoisyFlags(stabilizer_state_prep=False, error_correction=False).key()


def run_figures(args) -> int:
    rows = _read_rows(Path(args.results))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    def write(name: str, header: list[str], data: list[list]):
        path = outdir / name
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(data)
        print(f"wrote {path} ({len(data)} rows)")

    def depol_tag(eta: str) -> int:
        return 1 if abs(float(eta) - 0.25) < 1e-12 else 0

    fig3 = [
        [r["eta"], r["p"], r["r_proc"], r["r_avg"], r["eta_ZL"]]
        for r in rows
        if r["set"] == "Z" and r["flags"] == FULL
    ]
    fig3.sort(key=lambda x: (x[0], float(x[1])))
    write("fig3.csv", ["eta", "p", "r_proc", "r_avg", "eta_ZL"], fig3)

    def bias_rows(sets, flags_key, ycol):
        data = []
        for r in rows:
            if r["set"] in sets and r["flags"] == flags_key:
                eta = math.inf if r["eta"] == "inf" else float(r["eta"])
                data.append([r["set"], r["eta"], r["p"], r[ycol], depol_tag(r["eta"])])
        data.sort(key=lambda x: (x[0], math.inf if x[1] == "inf" else float(x[1])))
        return data

    write("fig4.csv", ["set", "eta2", "p", "eta1_ZL", "depol_marker"],
          bias_rows(("Z", "X", "Y"), FULL, "eta_ZL"))
    write("fig5.csv", ["set", "eta2", "p", "eta1_XL", "depol_marker"],
          bias_rows(("X",), FULL, "eta_XL"))
    write("fig6a.csv", ["set", "eta2", "p", "eta1_ZL", "depol_marker"],
          bias_rows(("Z", "M"), ABLATION, "eta_ZL"))
    write("fig6b.csv", ["set", "eta2", "p", "eta1_ZL", "depol_marker"],
          bias_rows(("M", "Z"), FULL, "eta_ZL"))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="magicbias", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a JSON config")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--output", default=None)
    p_sweep.add_argument("--force", action="store_true")
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.set_defaults(func=run_sweep)

    p_single = sub.add_parser("single", help="one grid point")
    p_single.add_argument("--set", required=True, choices=("Z", "X", "Y", "M"))
    p_single.add_argument("--eta", required=True)
    p_single.add_argument("--p", type=float, required=True)
    p_single.add_argument("--order", type=int, default=2)
    p_single.add_argument("--noisy", nargs="*", default=None, choices=FLAG_FIELDS,
                          help="noisy components (default: all)")
    p_single.add_argument("--workers", type=int, default=None)
    p_single.set_defaults(func=run_single)

    p_verify = sub.add_parser("verify", help="run the invariant suites")
    p_verify.set_defaults(func=run_verify)

    p_fig = sub.add_parser("figures", help="derive figure data files from a sweep CSV")
    p_fig.add_argument("--results", required=True)
    p_fig.add_argument("--outdir", default="figures_data")
    p_fig.set_defaults(func=run_figures)

    p_oracle = sub.add_parser("oracle-check", help="dense oracle equivalence suite")
    p_oracle.set_defaults(func=run_oracle_check)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
