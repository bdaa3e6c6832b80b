"""Factorial scenario sweeps: enumerate, solve, persist, decompose.

A sweep derives the reference country's capacity shares once, then
builds and solves one LP per factor state. States are independent and
run under a bounded process pool; the ledger is assembled by the parent
in canonical state order, so output is invariant to the parallelism
level. Per-state artifacts are content-addressed by spec and LP hashes
for resume and audit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .factorize import (
    FactorDecomposition,
    MetricTable,
    STORAGE_METRICS,
    extract_storage_metrics,
    shared_interactions_totals,
)
from .harmonize import (
    FactorState,
    ReferenceShares,
    apply_factor_state,
    derive_reference_shares,
    enumerate_subset_states,
)
from .lp import assemble
from .model import GridFactorError, PowerSystemSpec
from .mps import write_mps
from .serialize import read_system
from .solve import SolveOptions, solve

VERSION = "1.0.0"
LEDGER_SCHEMA = "gridfactor-ledger/1"


class SweepError(GridFactorError):
    pass


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one sweep."""

    system_manifest: str  # path to the base system's manifest.json
    reference_country: str
    out_dir: str
    factors: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    fixture_label: str = "default"
    solver: SolveOptions = SolveOptions()
    workers: int = 1
    export_mps: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise SweepError("parallelism must be at least 1")
        if not Path(self.system_manifest).exists():
            raise SweepError(f"system manifest not found: {self.system_manifest}")
        bad = set(self.factors) - set(range(1, 7))
        if bad or len(set(self.factors)) != len(self.factors):
            raise SweepError("factor subset must be unique numbers in 1..6")

    def digest(self) -> str:
        """Hash of the reproducibility-relevant fields.

        Excludes out_dir and workers: the same experiment run elsewhere
        or at a different parallelism must hash identically.
        """
        doc = {
            "system": _file_digest(Path(self.system_manifest)),
            "reference_country": self.reference_country,
            "factors": sorted(self.factors),
            "fixture_label": self.fixture_label,
            "solver": asdict(self.solver),
            "export_mps": self.export_mps,
        }
        return _digest_json(doc)


def _digest_json(doc) -> str:
    return hashlib.sha256(
        json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def _file_digest(path: Path) -> str:
    h = hashlib.sha256()
    directory = path.parent
    h.update(path.read_bytes())
    doc = json.loads(path.read_text())
    names = [doc["series"]["load"]]
    if "reservoir_inflow" in doc["series"]:
        names.append(doc["series"]["reservoir_inflow"])
    names.extend(doc["series"].get("capacity_factors", {}).values())
    for name in sorted(names):
        h.update((directory / name).read_bytes())
    return h.hexdigest()


def spec_digest(spec: PowerSystemSpec) -> str:
    """Content hash of a (possibly harmonized) in-memory system."""
    h = hashlib.sha256()
    ts = spec.time_series
    doc = {
        "horizon": ts.horizon,
        "annuity_rate": spec.annuity_rate,
        "interconnection_enabled": spec.interconnection_enabled,
        "countries": [asdict(c) for c in spec.countries],
        "technologies": [asdict(t) for t in spec.technologies],
        "interconnectors": [asdict(l) for l in spec.interconnectors],
        "exogenous_capacities": [asdict(e) for e in spec.exogenous_capacities],
        "offshore_overrides": [[c, mw] for c, mw in spec.offshore_overrides],
    }
    h.update(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode())
    for code in sorted(ts.load):
        h.update(code.encode())
        h.update(np.ascontiguousarray(ts.load[code], dtype=float).tobytes())
    for key in sorted(ts.capacity_factors):
        h.update(repr(key).encode())
        h.update(np.ascontiguousarray(ts.capacity_factors[key], dtype=float).tobytes())
    for code in sorted(ts.reservoir_inflow):
        h.update(code.encode())
        h.update(np.ascontiguousarray(ts.reservoir_inflow[code], dtype=float).tobytes())
    return h.hexdigest()


def _state_paths(out_dir: Path, state_name: str) -> tuple[Path, Path]:
    states = out_dir / "states"
    return states / f"{state_name}.csv", states / f"{state_name}.json"


def _write_solution_csv(path: Path, lp, result) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["column", "family", "country", "technology", "hour", "value"])
        for j, name in enumerate(lp.col_names):
            meta = lp.col_meta[j]
            family, country, tech, hour = (tuple(meta) + (None,) * 4)[:4]
            writer.writerow(
                [
                    name,
                    family,
                    country if country is not None else "",
                    tech if tech is not None else "",
                    hour if hour is not None else "",
                    repr(float(result.primal[j])),
                ]
            )


def _run_state(payload) -> dict:
    """Build, solve, and persist one factor state (process-pool task)."""
    (system_manifest, shares, state_name, solver, out_dir, export_mps) = payload
    out_dir = Path(out_dir)
    state = FactorState.parse(state_name)
    base = read_system(system_manifest)
    started = time.perf_counter()
    scenario = apply_factor_state(base, state, shares)
    lp, _ = assemble(scenario)
    mps_text = write_mps(lp)
    if export_mps:
        mps_dir = out_dir / "mps"
        mps_dir.mkdir(parents=True, exist_ok=True)
        (mps_dir / f"{state_name}.mps").write_text(mps_text)
    result = solve(lp, solver)

    entry = {
        "state": state_name,
        "spec_hash": spec_digest(scenario),
        "lp_hash": hashlib.sha256(mps_text.encode()).hexdigest(),
        "status": result.status,
        "objective": float(result.objective),
        "iterations": result.iterations,
        "solver": result.method,
        "metrics": {},
        "per_country": {},
    }
    wall = time.perf_counter() - started
    if result.status == "optimal":
        agg, by_country = extract_storage_metrics(scenario, lp, result, per_country=True)
        entry["metrics"] = {**agg, "objective_eur": float(result.objective)}
        entry["per_country"] = by_country
        csv_path, meta_path = _state_paths(out_dir, state_name)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        _write_solution_csv(csv_path, lp, result)
        meta_path.write_text(
            json.dumps({**entry, "timing_seconds": wall}, indent=2, sort_keys=True) + "\n"
        )
    return {**entry, "timing_seconds": wall}


def run_sweep(
    manifest: RunManifest,
    completed: dict[str, dict] | None = None,
) -> dict:
    """Execute the sweep and return the ledger document.

    ``completed`` carries already-solved entries (used by resume); only
    the remaining states are solved. On any non-optimal state the
    partial ledger is written before raising.
    """
    out_dir = Path(manifest.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = read_system(manifest.system_manifest)
    states = enumerate_subset_states(manifest.factors)
    completed = dict(completed or {})

    shares = derive_reference_shares(base, manifest.reference_country, manifest.solver)
    _write_shares(out_dir / "reference_shares.json", shares)

    pending = [s for s in states if s.name not in completed]
    payloads = [
        (
            manifest.system_manifest,
            shares,
            s.name,
            manifest.solver,
            str(out_dir),
            manifest.export_mps,
        )
        for s in pending
    ]
    entries = dict(completed)
    if manifest.workers == 1 or len(payloads) <= 1:
        for payload in payloads:
            entry = _run_state(payload)
            entries[entry["state"]] = entry
    else:
        with ProcessPoolExecutor(max_workers=manifest.workers) as pool:
            for entry in pool.map(_run_state, payloads):
                entries[entry["state"]] = entry

    ledger = _assemble_ledger(manifest, states, entries)
    write_ledger(ledger, out_dir / "ledger.json")

    failures = [e["state"] for e in ledger["entries"] if e["status"] != "optimal"]
    if failures:
        raise SweepError(f"scenario(s) did not solve to optimality: {failures}")

    decomps = decompositions_from_ledger(ledger)
    from .factorize import write_decompositions_csv, write_decompositions_json

    write_decompositions_csv(decomps, out_dir / "decomposition.csv")
    write_decompositions_json(decomps, out_dir / "decomposition.json")
    return ledger


def _assemble_ledger(manifest: RunManifest, states, entries: dict[str, dict]) -> dict:
    ordered = []
    timing = {}
    for state in states:
        entry = dict(entries[state.name])
        timing[state.name] = entry.pop("timing_seconds", 0.0)
        ordered.append(entry)
    return {
        "schema": LEDGER_SCHEMA,
        "version": VERSION,
        "manifest_hash": manifest.digest(),
        "fixture_label": manifest.fixture_label,
        "reference_country": manifest.reference_country,
        "factors": sorted(manifest.factors),
        "entries": ordered,
        "timing": timing,
    }


def write_ledger(ledger: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(ledger, indent=2, sort_keys=True) + "\n")


def read_ledger(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def ledger_comparison_bytes(ledger: dict) -> bytes:
    """Canonical serialization with timing stripped, for determinism checks."""
    doc = {k: v for k, v in ledger.items() if k != "timing"}
    return json.dumps(doc, indent=2, sort_keys=True).encode()


def resume(manifest: RunManifest, ledger_path: str | Path) -> dict:
    """Finish a partial sweep; completed states are not re-solved."""
    ledger = read_ledger(ledger_path)
    if ledger.get("manifest_hash") != manifest.digest():
        raise SweepError("ledger manifest hash does not match this manifest")
    out_dir = Path(manifest.out_dir)
    completed = {}
    timing = ledger.get("timing", {})
    for entry in ledger.get("entries", []):
        if entry.get("status") != "optimal":
            continue
        csv_path, meta_path = _state_paths(out_dir, entry["state"])
        if csv_path.exists() and meta_path.exists():
            completed[entry["state"]] = {
                **entry,
                "timing_seconds": timing.get(entry["state"], 0.0),
            }
    return run_sweep(manifest, completed=completed)


def _write_shares(path: Path, shares: ReferenceShares) -> None:
    doc = {
        "reference_country": shares.reference_country,
        "offshore_share": shares.offshore_share,
        "technology_shares": {
            tid: asdict(s) for tid, s in sorted(shares.technology_shares.items())
        },
        "provenance": dict(shares.provenance),
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def decompositions_from_ledger(ledger: dict) -> list[FactorDecomposition]:
    """Shared-interactions decompositions of every ledger metric."""
    factors = tuple(ledger["factors"])
    fixed = frozenset(range(1, 7)) - frozenset(factors)
    entries = ledger["entries"]
    if not entries:
        raise SweepError("empty ledger")
    metric_names = sorted(entries[0]["metrics"])
    decomps = []
    for metric in metric_names:
        values = {}
        for entry in entries:
            state = FactorState.parse(entry["state"])
            varied = frozenset(state.active_factors) - fixed
            values[varied] = float(entry["metrics"][metric])
        table = MetricTable(metric=metric, factors=factors, values=values)
        decomps.append(shared_interactions_totals(table))
    return decomps


def compare_interconnection(manifest: RunManifest) -> dict:
    """Storage-metric reductions and interconnector utilization.

    Compares the all-native interconnected state (f_123456 over the full
    design, or the manifest's full varied set) against the same state
    with interconnection disabled.
    """
    out_dir = Path(manifest.out_dir)
    ledger = read_ledger(out_dir / "ledger.json")
    full = FactorState.from_factors(set(range(1, 7))).name
    isolated = FactorState.from_factors(set(range(2, 7))).name
    by_state = {e["state"]: e for e in ledger["entries"]}
    for needed in (full, isolated):
        if needed not in by_state or by_state[needed]["status"] != "optimal":
            raise SweepError(f"comparison needs an optimal solve of {needed}")

    report: dict = {"metrics": {}, "per_country": {}, "utilization": {}}
    for metric in STORAGE_METRICS:
        a = by_state[isolated]["metrics"][metric]
        b = by_state[full]["metrics"][metric]
        report["metrics"][metric] = {
            "isolated": a,
            "interconnected": b,
            "absolute_reduction": a - b,
            "relative_reduction": (a - b) / a if a else 0.0,
        }
    for code, vals in by_state[isolated]["per_country"].items():
        report["per_country"][code] = {}
        for metric in STORAGE_METRICS:
            a = vals[metric]
            b = by_state[full]["per_country"][code][metric]
            report["per_country"][code][metric] = {
                "isolated": a,
                "interconnected": b,
                "absolute_reduction": a - b,
                "relative_reduction": (a - b) / a if a else 0.0,
            }

    base = read_system(manifest.system_manifest)
    ntc = {f"{l.from_country}-{l.to_country}": l.ntc for l in base.interconnectors}
    flows: dict[str, list[float]] = {link: [] for link in ntc}
    csv_path, _ = _state_paths(out_dir, full)
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["family"] == "flow" and row["country"] in flows:
                flows[row["country"]].append(abs(float(row["value"])))
    for link, values in sorted(flows.items()):
        if values and ntc[link] > 0:
            report["utilization"][link] = float(np.mean(values) / ntc[link])
    return report


def write_comparison(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
