"""Inclusion-exclusion factor separation and shared-interactions totals.

Scenario metric values live in a complete 2^n table keyed by which
factors are in state B. Interaction terms come from the alternating
inclusion-exclusion sum over sub-states; multi-factor interactions that
involve interconnection are redistributed equally among the
participating non-interconnection factors ("shared interactions"). The
sole interconnection effect is reported as an explicit baseline term so
the decomposition always sums to the difference of interest.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .harmonize import FACTOR_NAMES, FactorState
from .model import GridFactorError

INTERCONNECTION = 1

# Shares are suppressed when INT is negligible against the isolated
# all-native scenario value.
DEGENERATE_INT_RTOL = 1e-6


class FactorizeError(GridFactorError):
    pass


@dataclass(frozen=True)
class MetricTable:
    """Complete map from factor subsets (state B members) to metric values."""

    metric: str
    factors: tuple[int, ...]
    values: Mapping[frozenset[int], float]
    provenance: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        expected = 1 << len(self.factors)
        if len(self.values) != expected:
            raise FactorizeError(
                f"table for {self.metric!r} has {len(self.values)} entries, "
                f"expected {expected}"
            )
        for subset, value in self.values.items():
            if not subset <= set(self.factors):
                raise FactorizeError(f"subset {sorted(subset)} outside factors")
            if not np.isfinite(value):
                raise FactorizeError(f"non-finite value for subset {sorted(subset)}")

    def value(self, subset: frozenset[int] | set[int]) -> float:
        key = frozenset(subset)
        if key not in self.values:
            raise FactorizeError(f"missing state for subset {sorted(key)}")
        return self.values[key]


def interaction_term(table: MetricTable, subset: set[int] | frozenset[int]) -> float:
    """Alternating inclusion-exclusion sum over all sub-states of ``subset``."""
    subset = frozenset(subset)
    if not subset <= set(table.factors):
        raise FactorizeError(f"subset {sorted(subset)} outside table factors")
    members = sorted(subset)
    k = len(members)
    total = 0.0
    for mask in range(1 << k):
        sub = frozenset(members[i] for i in range(k) if mask >> i & 1)
        sign = -1.0 if (k - len(sub)) % 2 else 1.0
        total += sign * table.value(sub)
    return total


def all_interaction_terms(table: MetricTable) -> dict[frozenset[int], float]:
    """Every interaction term at once via an in-place Moebius transform."""
    factors = table.factors
    n = len(factors)
    arr = np.empty(1 << n)
    for mask in range(1 << n):
        arr[mask] = table.value(
            frozenset(factors[i] for i in range(n) if mask >> i & 1)
        )
    for bit in range(n):
        step = 1 << bit
        for mask in range(1 << n):
            if mask & step:
                arr[mask] -= arr[mask ^ step]
    return {
        frozenset(factors[i] for i in range(n) if mask >> i & 1): float(arr[mask])
        for mask in range(1, 1 << n)
    }


def factor_total(table: MetricTable, j: int) -> float:
    """Symmetric equal-share total for one factor: sum of f-hat_S / |S| over S containing j.

    In a two-factor table this reduces to the closed form
    ((f_1 - f_0) + (f_12 - f_2)) / 2 for factor 1.
    """
    if j not in table.factors:
        raise FactorizeError(f"factor {j} not in table")
    terms = all_interaction_terms(table)
    contributions = [
        (len(s), v / len(s)) for s, v in terms.items() if j in s
    ]
    contributions.sort(key=lambda kv: (-kv[0], kv[1]))
    return float(sum(v for _, v in contributions))


def difference_of_interest(table: MetricTable) -> float:
    """Metric change from enabling interconnection in the all-native scenario."""
    if INTERCONNECTION not in table.factors:
        raise FactorizeError("table does not vary the interconnection factor")
    full = frozenset(table.factors)
    return table.value(full) - table.value(full - {INTERCONNECTION})


@dataclass(frozen=True)
class FactorDecomposition:
    """Shared-interactions attribution of one metric's difference of interest."""

    metric: str
    factors: tuple[int, ...]
    terms: Mapping[frozenset[int], float]
    baseline: float  # sole interconnection effect
    totals: Mapping[int, float]  # factor number -> attributed total
    int_value: float
    shares: Mapping[int, float] | None  # None when INT is degenerate
    degenerate: bool

    def identity_residual(self) -> float:
        """|baseline + sum of totals - INT| relative to |INT|."""
        total = self.baseline + sum(self.totals.values())
        return abs(total - self.int_value) / (1.0 + abs(self.int_value))


def shared_interactions_totals(table: MetricTable) -> FactorDecomposition:
    """Distribute every interconnection interaction equally among its factors.

    The total for factor j collects every interaction term containing
    both interconnection and j, weighted by one over the number of
    non-interconnection factors involved; coefficients are summed in
    descending subset-size order for reproducibility.
    """
    terms = all_interaction_terms(table)
    int_value = difference_of_interest(table)
    others = tuple(f for f in table.factors if f != INTERCONNECTION)

    totals: dict[int, float] = {}
    for j in others:
        contributions = [
            (len(subset), terms[frozenset({INTERCONNECTION}) | subset] / len(subset))
            for subset in _subsets_containing(others, j)
        ]
        contributions.sort(key=lambda kv: (-kv[0], kv[1]))
        totals[j] = float(sum(v for _, v in contributions))

    baseline = terms[frozenset({INTERCONNECTION})]
    isolated = table.value(frozenset(table.factors) - {INTERCONNECTION})
    degenerate = abs(int_value) < DEGENERATE_INT_RTOL * max(abs(isolated), 1e-30)
    shares = None if degenerate else {j: totals[j] / int_value for j in others}
    return FactorDecomposition(
        metric=table.metric,
        factors=table.factors,
        terms=terms,
        baseline=baseline,
        totals=totals,
        int_value=int_value,
        shares=shares,
        degenerate=degenerate,
    )


def _subsets_containing(others: tuple[int, ...], j: int) -> list[frozenset[int]]:
    rest = [f for f in others if f != j]
    out = []
    for mask in range(1 << len(rest)):
        out.append(
            frozenset({j} | {rest[i] for i in range(len(rest)) if mask >> i & 1})
        )
    return out


STORAGE_METRICS = (
    "short_duration_energy_mwh",
    "long_duration_energy_mwh",
    "short_duration_discharge_mw",
    "long_duration_discharge_mw",
)


def extract_storage_metrics(spec, lp, result, per_country: bool = False):
    """Aggregate optimal storage capacities by duration class.

    Sums installed energy and discharging power over all countries for
    short- and long-duration storage technologies.
    """
    agg = {name: 0.0 for name in STORAGE_METRICS}
    by_country: dict[str, dict[str, float]] = {
        c.code: {name: 0.0 for name in STORAGE_METRICS} for c in spec.countries
    }
    class_by_tech = {
        t.id: t.duration_class for t in spec.technologies if t.duration_class
    }
    for j, meta in enumerate(lp.col_meta):
        family = meta[0]
        if family not in ("cap_energy", "cap_discharge"):
            continue
        code, tid = meta[1], meta[2]
        cls = class_by_tech.get(tid)
        if cls is None:
            continue
        kind = "energy_mwh" if family == "cap_energy" else "discharge_mw"
        key = f"{cls}_duration_{kind}"
        value = float(result.primal[j])
        agg[key] += value
        by_country[code][key] += value
    return (agg, by_country) if per_country else agg


def decompose_metrics(
    results: Mapping[FactorState, "object"],
    extractors: Mapping[str, Callable[[FactorState, "object"], float]],
    factors: tuple[int, ...] = (1, 2, 3, 4, 5, 6),
) -> list[FactorDecomposition]:
    """One shared-interactions decomposition per metric extractor."""
    expected = set(map(frozenset, _power_set(factors)))
    fixed = frozenset(range(1, 7)) - frozenset(factors)
    by_subset: dict[frozenset[int], FactorState] = {}
    for state, result in results.items():
        status = getattr(result, "status", "optimal")
        if status != "optimal":
            raise FactorizeError(f"scenario {state.name} did not solve: {status}")
        varied = frozenset(state.active_factors) - fixed
        by_subset[varied] = state
    missing = expected - set(by_subset)
    if missing:
        names = sorted(
            FactorState.from_factors(set(s) | set(fixed)).name for s in missing
        )
        raise FactorizeError(f"incomplete scenario set, missing {names}")

    out = []
    for metric, extractor in extractors.items():
        values = {
            subset: float(extractor(state, results[state]))
            for subset, state in by_subset.items()
        }
        table = MetricTable(metric=metric, factors=tuple(factors), values=values)
        out.append(shared_interactions_totals(table))
    return out


def _power_set(factors):
    import itertools

    for size in range(len(factors) + 1):
        yield from itertools.combinations(factors, size)


def decomposition_rows(decomp: FactorDecomposition) -> list[dict]:
    """Flat rows for CSV export: totals, baseline, INT, and raw terms."""
    rows = [
        {
            "metric": decomp.metric,
            "term": "INT",
            "subset": "",
            "value": decomp.int_value,
            "share": "",
        },
        {
            "metric": decomp.metric,
            "term": "baseline_interconnection",
            "subset": "1",
            "value": decomp.baseline,
            "share": "",
        },
    ]
    for j in sorted(decomp.totals):
        share = "" if decomp.shares is None else decomp.shares[j]
        rows.append(
            {
                "metric": decomp.metric,
                "term": f"total_{FACTOR_NAMES[j]}",
                "subset": f"1{j}",
                "value": decomp.totals[j],
                "share": share,
            }
        )
    for subset in sorted(decomp.terms, key=lambda s: (len(s), sorted(s))):
        rows.append(
            {
                "metric": decomp.metric,
                "term": "interaction",
                "subset": "".join(str(i) for i in sorted(subset)),
                "value": decomp.terms[subset],
                "share": "",
            }
        )
    return rows


def write_decompositions_csv(decomps: list[FactorDecomposition], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["metric", "term", "subset", "value", "share"])
        writer.writeheader()
        for d in decomps:
            for row in decomposition_rows(d):
                writer.writerow(row)


def write_decompositions_json(decomps: list[FactorDecomposition], path: str | Path) -> None:
    doc = []
    for d in decomps:
        doc.append(
            {
                "metric": d.metric,
                "factors": list(d.factors),
                "int": d.int_value,
                "baseline_interconnection": d.baseline,
                "totals": {FACTOR_NAMES[j]: v for j, v in sorted(d.totals.items())},
                "shares": None
                if d.shares is None
                else {FACTOR_NAMES[j]: v for j, v in sorted(d.shares.items())},
                "degenerate": d.degenerate,
                "terms": {
                    "".join(str(i) for i in sorted(s)): v
                    for s, v in sorted(d.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
                },
            }
        )
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
