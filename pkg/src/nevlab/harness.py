"""Batch verification of truncated second-main-theorem inequalities."""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .curves import Curve, EXPPOLY, is_slow
from .errors import (
    DegenerateCurve,
    HypothesisViolated,
    IdenticallyZero,
    InvalidShape,
    NoValidSample,
    RetriesExhausted,
)
from .filtration import as_fraction, int_to_decimal, theorem_constants, truncate
from .forms import HomogeneousForm, compose_with_curve
from .macaulay import MacaulayMatrix, rank
from .nevanlinna import (
    RadiusGrid,
    characteristic,
    circle_integral,
    counting_from_divisor,
    defect_estimate,
    isolate_zeros,
    tail_half,
    wronskian,
)
from .position import build_general_position, check_subgeneral_position

DEFAULT_TAU = 0.05
DEFECT_SLACK = 0.1
DEFAULT_GRIDS = {
    "poly": {"min": 2.0, "max": 1000.0, "count": 16, "scale": "geometric"},
    "exppoly": {"min": 2.0, "max": 60.0, "count": 16, "scale": "geometric"},
}

PASS = "PASS"
FAIL = "FAIL"
VACUOUS = "VACUOUS"


def r12(x):
    """Round a float to 12 significant digits so its JSON text round-trips exactly."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, ".12g"))


def config_hash(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class ExperimentConfig:
    curve: Curve
    targets: list
    N: int
    epsilon: Fraction
    grid: RadiusGrid
    grid_spec: dict
    trunc: int | None = None
    seed: int = 0
    tau: float = DEFAULT_TAU
    raw: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.curve.n

    @property
    def q(self) -> int:
        return len(self.targets)

    @property
    def degrees(self):
        return [Q.d for Q in self.targets]

    @classmethod
    def from_json(cls, data: dict, seed=None, trunc=None, tau=None) -> "ExperimentConfig":
        try:
            curve = Curve.from_json(data["curve"])
            targets = [HomogeneousForm.from_json(t) for t in data["targets"]]
            N = int(data["N"])
        except KeyError as exc:
            raise InvalidShape(f"config is missing {exc}") from exc
        eps = as_fraction(str(data.get("epsilon", 1)))
        spec = dict(DEFAULT_GRIDS[curve.kind])
        spec.update(data.get("grid", {}))
        grid = RadiusGrid.build(float(spec["min"]), float(spec["max"]), int(spec["count"]), spec.get("scale", "geometric"))
        for Q in targets:
            if Q.n != curve.n:
                raise InvalidShape(f"target lives in P^{Q.n}, curve in P^{curve.n}")
        q = len(targets)
        if not q >= N + 1 >= curve.n + 1:
            raise InvalidShape(f"need q >= N+1 >= n+1 (q={q}, N={N}, n={curve.n})")
        if eps <= 0:
            raise InvalidShape("epsilon must be positive")
        cfg_trunc = data.get("trunc")
        return cls(
            curve=curve,
            targets=targets,
            N=N,
            epsilon=eps,
            grid=grid,
            grid_spec=spec,
            trunc=int(trunc if trunc is not None else cfg_trunc) if (trunc is not None or cfg_trunc is not None) else None,
            seed=int(seed if seed is not None else data.get("seed", 0)),
            tau=float(tau if tau is not None else data.get("tol", DEFAULT_TAU)),
            raw=data,
        )

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh), **overrides)


# ---------------------------------------------------------------- constants

def run_constants(data: dict):
    """TheoremConstants from {n, N, q, epsilon, degrees} or from a full experiment config."""
    if "curve" in data:
        cfg = ExperimentConfig.from_json(data)
        n, N, q, eps, degrees = cfg.n, cfg.N, cfg.q, cfg.epsilon, cfg.degrees
    else:
        try:
            n, N, q = int(data["n"]), int(data["N"]), int(data["q"])
            eps = as_fraction(str(data.get("epsilon", 1)))
            degrees = data.get("degrees", [1] * q)
        except KeyError as exc:
            raise InvalidShape(f"constants config is missing {exc}") from exc
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return theorem_constants(n, N, q, eps, degrees)


# ---------------------------------------------------------------- report

@dataclass
class SmtReport:
    kind: str
    verdict: str
    header: list
    rows: list
    tail: dict
    constants: dict | None = None
    position: dict | None = None
    slowness: list = field(default_factory=list)
    truncation: dict = field(default_factory=dict)
    defects: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "provenance": self.provenance,
            "constants": self.constants,
            "position": self.position,
            "slowness": self.slowness,
            "truncation": self.truncation,
            "header": self.header,
            "rows": self.rows,
            "tail": self.tail,
            "defects": self.defects,
            "warnings": self.warnings,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SmtReport":
        return cls(
            kind=data["kind"],
            verdict=data["verdict"],
            header=list(data["header"]),
            rows=[list(r) for r in data["rows"]],
            tail=dict(data["tail"]),
            constants=data.get("constants"),
            position=data.get("position"),
            slowness=list(data.get("slowness", [])),
            truncation=dict(data.get("truncation", {})),
            defects=dict(data.get("defects", {})),
            provenance=dict(data.get("provenance", {})),
            warnings=list(data.get("warnings", [])),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _provenance(cfg: ExperimentConfig) -> dict:
    return {"tool": "nevlab", "version": __version__, "seed": cfg.seed, "config_hash": config_hash(cfg.raw)}


# ---------------------------------------------------------------- verify

def _compose_all(cfg: ExperimentConfig):
    out = []
    for i, Q in enumerate(cfg.targets, start=1):
        try:
            out.append(compose_with_curve(Q, cfg.curve))
        except IdenticallyZero as exc:
            raise HypothesisViolated(f"target {i} vanishes identically on the curve", kind="degenerate") from exc
    return out


def _slowness(cfg: ExperimentConfig):
    verdicts = []
    for i, Q in enumerate(cfg.targets, start=1):
        v = is_slow(Q, cfg.curve)
        verdicts.append({"target": i, "moving": Q.is_moving, "slow": v.slow, "rule": v.rule})
        if not v.slow:
            raise HypothesisViolated(f"target {i} is not slow with respect to the curve ({v.rule})", kind="slowness")
    return verdicts


def _position(cfg: ExperimentConfig):
    try:
        cert = check_subgeneral_position(cfg.targets, cfg.N, seed=cfg.seed)
    except NoValidSample as exc:
        raise HypothesisViolated(str(exc), kind="position") from exc
    if not cert.certified:
        raise HypothesisViolated(
            f"targets are not certified in weakly {cfg.N}-subgeneral position", kind="position"
        )
    return cert


def _truncation(consts, override):
    level = consts.L0 if override is None else truncate(consts.L0, int(override))
    return level


def _level_text(level, consts):
    if level is None:
        return "inf"
    if level is consts.L0 or level == consts.L0:
        return f"L0 ({consts.L0_digits} digits, leading {consts.L0_leading})"
    return int_to_decimal(level)


def defect_table(cfg: ExperimentConfig, level=None, divisors=None) -> dict:
    """Estimated truncated defects of every target along the curve."""
    divisors = divisors or [isolate_zeros(g, max(cfg.grid)) for g in _compose_all(cfg)]
    entries = []
    reliable = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i, (Q, div) in enumerate(zip(cfg.targets, divisors), start=1):
            est = defect_estimate(cfg.curve, Q, level, cfg.grid, divisor=div)
            reliable = reliable and est.reliable
            entries.append({"target": i, "delta": r12(est.value), "min_ratio": r12(min(est.ratios))})
    total = sum(e["delta"] for e in entries)
    bound = (cfg.N - cfg.n + 1) * (cfg.n + 1)
    return {
        "entries": entries,
        "sum": r12(total),
        "bound": bound,
        "slack": DEFECT_SLACK,
        "holds": total <= bound + DEFECT_SLACK,
        "reliable": reliable,
    }


def run_verify(cfg: ExperimentConfig) -> SmtReport:
    comps = _compose_all(cfg)
    slow = _slowness(cfg)
    cert = _position(cfg)
    consts = run_constants({"n": cfg.n, "N": cfg.N, "q": cfg.q, "epsilon": str(cfg.epsilon), "degrees": cfg.degrees})
    level = _truncation(consts, cfg.trunc)

    radii = list(cfg.grid)
    divisors = [isolate_zeros(g, max(radii)) for g in comps]
    max_mult = max((m for d in divisors for _, m in d.zeros), default=0)
    inactive = truncate(max_mult, level) == max_mult

    coef = float(cfg.q - (cfg.N - cfg.n + 1) * (cfg.n + 1) - cfg.epsilon)
    header = ["r", "T_f"] + [f"N_{i}/d_{i}" for i in range(1, cfg.q + 1)]
    header += ["LHS", "RHS", "slack", "RHS_trunc1", "RHS_untruncated"]
    rows = []
    for r in radii:
        T = characteristic(cfg.curve, r)
        per = [counting_from_divisor(div, r, level) / Q.d for Q, div in zip(cfg.targets, divisors)]
        rhs = sum(per)
        rhs1 = sum(counting_from_divisor(div, r, 1) / Q.d for Q, div in zip(cfg.targets, divisors))
        rhs_inf = sum(counting_from_divisor(div, r) / Q.d for Q, div in zip(cfg.targets, divisors))
        lhs = coef * T
        rows.append([r12(v) for v in [r, T, *per, lhs, rhs, rhs - lhs, rhs1, rhs_inf]])

    tail_rows = tail_half(rows)
    i_T, i_rhs, i_slack = 1, header.index("RHS"), header.index("slack")
    ok = all(row[i_slack] >= -cfg.tau * row[i_T] for row in tail_rows)
    ratios = [row[i_rhs] / row[i_T] for row in tail_rows if row[i_T] > 0]
    tail = {
        "tau": cfg.tau,
        "radii": [row[0] for row in tail_rows],
        "min_slack_over_T": r12(min(row[i_slack] / row[i_T] for row in tail_rows if row[i_T] > 0)),
        "min_rhs_over_T": r12(min(ratios)),
        "threshold": r12(coef),
    }

    notes = list(consts.warnings)
    if consts.vacuous:
        verdict = VACUOUS
    else:
        verdict = PASS if ok else FAIL
    defects = defect_table(cfg, level, divisors)
    if not defects["reliable"]:
        notes.append("T_f(r_max) <= 10: defect estimates are rough at this grid")
    return SmtReport(
        kind="verify",
        verdict=verdict,
        header=header,
        rows=rows,
        tail=tail,
        constants=consts.to_json(),
        position=cert.to_json(),
        slowness=slow,
        truncation={
            "level": _level_text(level, consts),
            "override": cfg.trunc,
            "max_multiplicity": max_mult,
            "inactive": inactive,
        },
        defects=defects,
        provenance=_provenance(cfg),
        warnings=notes,
    )


# ---------------------------------------------------------------- Cartan

def _independent(forms) -> bool:
    rows = [[Q.coefficient(idx) for idx in _linear_basis(Q.n)] for Q in forms]
    return rank(MacaulayMatrix.from_rows(rows)) == len(forms)


def _linear_basis(n):
    return [tuple(1 if k == j else 0 for k in range(n + 1)) for j in range(n + 1)]


def run_cartan(cfg: ExperimentConfig) -> SmtReport:
    f = cfg.curve
    n = f.n
    if f.kind == EXPPOLY:
        raise InvalidShape("the Cartan check takes a polynomial curve")
    if any(Q.is_moving or Q.d != 1 for Q in cfg.targets):
        raise InvalidShape("the Cartan check takes fixed hyperplanes")
    W = wronskian(f.components)
    if W.vanishes:
        raise DegenerateCurve("the Wronskian of the components vanishes identically")
    for i, Q in enumerate(cfg.targets, start=1):
        try:
            compose_with_curve(Q, f)
        except IdenticallyZero as exc:
            raise DegenerateCurve(f"the curve lies in hyperplane {i}") from exc

    bases = [K for K in itertools.combinations(range(cfg.q), n + 1) if _independent([cfg.targets[j] for j in K])]
    if not bases:
        raise InvalidShape("no n+1 of the hyperplanes are linearly independent")
    coeffs = [np.array([complex(Q.coefficient(idx)) for idx in _linear_basis(n)]) for Q in cfg.targets]
    norms = [float(np.linalg.norm(c)) for c in coeffs]

    def integrand(z):
        vals = f.evaluate(z)
        log_f = f.log_norm(z)
        with np.errstate(divide="ignore"):
            terms = [log_f + math.log(norms[j]) - np.log(np.abs(coeffs[j] @ vals)) for j in range(cfg.q)]
        return np.max([sum(terms[j] for j in K) for K in bases], axis=0)

    radii = list(cfg.grid)
    wdiv = isolate_zeros(W.value, max(radii))
    header = ["r", "T_f", "LHS", "RHS", "N_W", "slack"]
    rows = []
    for r in radii:
        T = characteristic(f, r)
        lhs = circle_integral(integrand, r, tol=1e-7)
        NW = counting_from_divisor(wdiv, r)
        rhs = (n + 1) * T - NW
        rows.append([r12(v) for v in (r, T, lhs, rhs, NW, rhs - lhs)])
    tail_rows = tail_half(rows)
    ok = all(row[5] >= -cfg.tau * row[1] for row in tail_rows)
    return SmtReport(
        kind="cartan",
        verdict=PASS if ok else FAIL,
        header=header,
        rows=rows,
        tail={
            "tau": cfg.tau,
            "radii": [row[0] for row in tail_rows],
            "min_slack_over_T": r12(min(row[5] / row[1] for row in tail_rows)),
            "bases": [list(K) for K in bases],
            "wronskian": [t for t in W.value.to_json()],
        },
        provenance=_provenance(cfg),
    )


# ---------------------------------------------------------------- position

def run_position(cfg: ExperimentConfig, recipe: bool = True) -> dict:
    cert = check_subgeneral_position(cfg.targets, cfg.N, seed=cfg.seed)
    out = {"certificate": cert.to_json(), "recipe": None, "recipe_error": None}
    if not (cert.certified and recipe):
        return out
    frozen = [Q if not Q.is_moving else Q.freeze(cert.sample) for Q in cfg.targets[: cfg.N + 1]]
    d = math.lcm(*(Q.d for Q in frozen))
    same = [Q if Q.d == d else Q ** (d // Q.d) for Q in frozen]
    try:
        out["recipe"] = build_general_position(same, seed=cfg.seed).to_json()
    except RetriesExhausted as exc:
        out["recipe_error"] = str(exc)
    return out


# ---------------------------------------------------------------- emit

def emit_report(report: SmtReport, outdir, fmt: str = "json", stem: str = "report"):
    """Write ``report.json`` or ``report.csv`` into ``outdir``; returns the path."""
    import csv
    import os

    os.makedirs(outdir, exist_ok=True)
    if fmt == "json":
        path = os.path.join(outdir, f"{stem}.json")
        with open(path, "w") as fh:
            fh.write(report.dumps())
    elif fmt == "csv":
        path = os.path.join(outdir, f"{stem}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(report.header)
            for row in report.rows:
                w.writerow([format(v, ".12g") if isinstance(v, float) else v for v in row])
    else:
        raise InvalidShape(f"unknown report format {fmt!r}")
    return path
