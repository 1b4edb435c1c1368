"""Monte Carlo experiment harness producing CSV tables and assertion summaries."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, coupon
from .codec import CodecConfig, achieved_rate, decode, encode, suggest_k
from .errors import InsufficientCoverage, ParameterDomainError
from .fileio import atomic_write
from .model import derive_params, erasure_fractions, round_half_up, sample_with_replacement
from .rng import SplitMix64, trial_seed

KINDS = ("erasure", "distinct", "tail", "codec-frontier", "capacity-curve")
RELIABILITY = 0.99


@dataclass
class ExperimentSpec:
    kind: str
    grid: dict
    trials: int = 1
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterDomainError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ParameterDomainError(f"trials must be >= 1, got {self.trials}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        unknown = set(d) - {"kind", "grid", "trials", "seed", "output"}
        if unknown:
            raise ParameterDomainError(f"unknown experiment fields {sorted(unknown)}")
        if d.get("kind") != "capacity-curve" and "seed" not in d:
            raise ParameterDomainError(f"experiment {d.get('kind')!r} needs an explicit seed")
        return cls(
            kind=d["kind"],
            grid=dict(d.get("grid", {})),
            trials=int(d.get("trials", 1)),
            seed=int(d.get("seed", 0)),
            output=d.get("output"),
        )

    def values(self, key: str, default=None) -> list:
        v = self.grid.get(key, default)
        if v is None:
            raise ParameterDomainError(f"{self.kind} experiment needs grid[{key!r}]")
        return list(v) if isinstance(v, (list, tuple)) else [v]


@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ExperimentResult:
    name: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(self, name: str, ok: bool, detail: str = ""):
        self.assertions.append(Assertion(name, bool(ok), detail))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(row[c]) for c in self.columns])
        return buf.getvalue()


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    if v is None:
        return ""
    return str(v)


def run_erasure(spec: ExperimentSpec) -> ExperimentResult:
    res = ExperimentResult(
        "erasure",
        ["M", "c", "N", "trials", "empirical", "analytic", "asymptotic",
         "gap_analytic", "gap_asymptotic", "stderr"],
    )
    beta = spec.grid.get("beta", 2.0)
    Ms = spec.values("M")
    cs = spec.values("c")
    for c in cs:
        analytic_seq = []
        for M in Ms:
            p = derive_params(M, beta, c)
            fr = erasure_fractions(M, p.N, spec.trials, spec.seed)
            emp = float(fr.mean())
            se = float(fr.std(ddof=1) / math.sqrt(spec.trials)) if spec.trials > 1 else 0.0
            analytic = math.exp(p.N * math.log1p(-1 / M))
            asym = math.exp(-c)
            res.rows.append(dict(M=M, c=c, N=p.N, trials=spec.trials, empirical=emp,
                                 analytic=analytic, asymptotic=asym,
                                 gap_analytic=abs(emp - analytic), gap_asymptotic=abs(emp - asym), stderr=se))
            tol = 3 * se + 1 / (M * spec.trials)
            res.check(f"erasure M={M} c={c}: empirical within 3 SE of analytic",
                      abs(emp - analytic) <= tol, f"|{emp:.6g} - {analytic:.6g}| vs {tol:.3g}")
            analytic_seq.append((M, abs(analytic - asym)))
        analytic_seq.sort()
        gaps = [g for _, g in analytic_seq]
        if len(gaps) > 1:
            res.check(f"erasure c={c}: analytic approaches e^-c as M grows",
                      all(a >= b for a, b in zip(gaps, gaps[1:])), str(gaps))
    return res


def run_distinct(spec: ExperimentSpec) -> ExperimentResult:
    res = ExperimentResult(
        "distinct", ["M", "c", "N", "trials", "mean_fraction", "std_fraction", "analytic", "asymptotic", "gap"]
    )
    for M in spec.values("M"):
        for c in spec.values("c"):
            s = coupon.simulate_distinct(M, c, spec.trials, spec.seed)
            analytic = coupon.expected_distinct(M, s.N) / M
            res.rows.append(dict(M=M, c=c, N=s.N, trials=spec.trials, mean_fraction=s.mean,
                                 std_fraction=s.std, analytic=analytic,
                                 asymptotic=-math.expm1(-c), gap=abs(s.mean - analytic)))
            tol = 3 * s.std / math.sqrt(spec.trials) + 1 / (M * spec.trials)
            res.check(f"distinct M={M} c={c}: mean within 3 SE of analytic",
                      abs(s.mean - analytic) <= tol, f"|{s.mean:.6g} - {analytic:.6g}| vs {tol:.3g}")
    return res


def run_distinct_tail(spec: ExperimentSpec) -> ExperimentResult:
    res = ExperimentResult(
        "tail", ["M", "c", "delta", "N", "trials", "threshold", "empirical", "bound", "displayed_bound", "mean_fraction"]
    )
    for M in spec.values("M"):
        for c in spec.values("c"):
            deltas = spec.values("delta")
            for d in deltas:
                coupon.TailBoundInputs(M, c, d)  # domain check before simulating
            s = coupon.simulate_distinct(M, c, spec.trials, spec.seed, deltas)
            for t in s.tails:
                inp = coupon.TailBoundInputs(M, c, t.delta)
                displayed = coupon.chebyshev_tail_bound(inp, displayed_form=True) if t.bound is not None else None
                res.rows.append(dict(M=M, c=c, delta=t.delta, N=s.N, trials=spec.trials,
                                     threshold=inp.alpha * M, empirical=t.empirical, bound=t.bound,
                                     displayed_bound=displayed, mean_fraction=s.mean))
                res.check(f"tail M={M} c={c} delta={t.delta:.6g}: empirical <= bound",
                          t.bound is None or t.empirical <= t.bound,
                          f"{t.empirical:.6g} vs {t.bound}")
    return res


def frontier_trials(config: CodecConfig, c: float, trials: int, seed: int) -> tuple[int, int]:
    """(successes, wrong-data returns) over ``trials`` channel draws of one encoded blob."""
    data = SplitMix64(trial_seed(seed, -1)).bytes(config.data_capacity_bits // 8)
    pool = encode(data, config).with_coverage(c)
    ok = wrong = 0
    for t in range(trials):
        samples = sample_with_replacement(pool, trial_seed(seed, t))
        try:
            out = decode(samples, config)
        except InsufficientCoverage:
            continue
        if out == data:
            ok += 1
        else:
            wrong += 1
    return ok, wrong


def run_codec_frontier(spec: ExperimentSpec) -> ExperimentResult:
    res = ExperimentResult(
        "codec-frontier",
        ["M", "L", "c", "k", "w", "trials", "successes", "success_rate", "achieved_rate",
         "capacity", "rate_gap", "reliable"],
    )
    w = int(spec.grid.get("w", 16))
    auto = "k" not in spec.grid
    best_gaps: dict[tuple, list] = {}
    Ls = spec.values("L", None) if "L" in spec.grid else None
    for i, M in enumerate(spec.values("M")):
        if Ls is not None:
            L = Ls[i] if len(Ls) == len(spec.values("M")) else Ls[0]
        else:
            L = round_half_up(float(spec.grid.get("beta", 4)) * math.log2(M))
        for c in spec.values("c"):
            ks = [suggest_k(M, c)] if auto else [int(k) for k in spec.values("k")]
            best = None
            for k in ks:
                cfg = CodecConfig(M, L, w, k)
                ok, wrong = frontier_trials(cfg, c, spec.trials, spec.seed)
                cap = bounds.capacity(cfg.beta_eff, c)
                rate = achieved_rate(cfg)
                rel = ok / spec.trials >= RELIABILITY
                res.rows.append(dict(M=M, L=L, c=c, k=k, w=w, trials=spec.trials, successes=ok,
                                     success_rate=ok / spec.trials, achieved_rate=rate,
                                     capacity=cap, rate_gap=cap - rate, reliable=rel))
                res.check(f"codec M={M} L={L} k={k}: no wrong-data decode", wrong == 0, f"{wrong} wrong")
                if rel and (best is None or k > best[0]):
                    best = (k, cap - rate)
            res.check(f"codec M={M} L={L} c={c}: some k decodes reliably", best is not None,
                      f"largest reliable k = {best[0] if best else None}")
            if best is not None:
                best_gaps.setdefault((round(L / math.log2(M), 9), c), []).append((M, best[1]))
    if auto:
        for key, seq in best_gaps.items():
            seq.sort()
            gaps = [g for _, g in seq]
            if len(gaps) > 1:
                res.check(f"codec beta_eff={key[0]} c={key[1]}: rate gap shrinks with M",
                          all(a > b for a, b in zip(gaps, gaps[1:])), str(gaps))
    return res


def run_capacity_curve(spec: ExperimentSpec) -> ExperimentResult:
    res = ExperimentResult("capacity-curve", ["beta", "c", "capacity", "bound1", "bound2"])
    for beta in spec.values("beta"):
        for c in spec.values("c"):
            pt = bounds.capacity_point(beta, c)
            res.rows.append(dict(beta=beta, c=c, capacity=pt.capacity,
                                 bound1=pt.index_genie_bound, bound2=pt.type_count_bound))
            res.check(f"capacity beta={beta} c={c}: below both bounds",
                      pt.capacity <= min(pt.index_genie_bound, max(0.0, pt.type_count_bound)))
            if beta <= 1:
                res.check(f"capacity beta={beta} c={c}: zero for beta <= 1", pt.capacity == 0.0)
    return res


RUNNERS = {
    "erasure": run_erasure,
    "distinct": run_distinct,
    "tail": run_distinct_tail,
    "codec-frontier": run_codec_frontier,
    "capacity-curve": run_capacity_curve,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    return RUNNERS[spec.kind](spec)


def load_specs(path) -> list[ExperimentSpec]:
    doc = json.loads(Path(path).read_text())
    items = doc.get("experiments", [doc]) if isinstance(doc, dict) else doc
    return [ExperimentSpec.from_dict(d) for d in items]


def run_specs(specs: list[ExperimentSpec], outdir) -> dict:
    """Run every spec, write ``<name>.csv`` files and ``summary.json``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    results = [run_experiment(s) for s in specs]
    assertions = []
    used = set()
    for spec, r in zip(specs, results):
        name = spec.output or f"{r.name}.csv"
        stem, n = name, 2
        while stem in used:
            stem = f"{Path(name).stem}-{n}{Path(name).suffix}"
            n += 1
        used.add(stem)
        atomic_write(outdir / stem, r.to_csv())
        assertions += [{"experiment": stem, "name": a.name, "passed": a.passed, "detail": a.detail}
                       for a in r.assertions]
    summary = {"pass": all(a["passed"] for a in assertions), "assertions": assertions}
    atomic_write(outdir / "summary.json", json.dumps(summary, indent=2) + "\n")
    return summary
