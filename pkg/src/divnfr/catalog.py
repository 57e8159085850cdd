"""Content catalogs: relevance matrices, direct demand, cache costs, scenarios.

Relevance matrices are plain ``(K, K)`` float arrays with entries in [0, 1]
and a zero diagonal.  Demand vectors and cost vectors are length-K arrays.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, ParseError, ShapeError

DEFAULT_THRESHOLD = 0.5
# Density used when a scenario has no relevance file attached.
DEFAULT_DENSITY = 0.3

FAIRNESS_KINDS = ("none", "max", "tv", "kl")
CUT_MODES = ("tangent", "secant")
SCENARIO_KEYS = ("K", "N", "C", "L", "alpha", "pop", "q", "b", "cf",
                 "fairness", "seed", "M", "cut_mode")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def preprocess_relevance(scores, threshold=DEFAULT_THRESHOLD):
    """Zero entries below ``threshold`` and the diagonal.

    Entries must already lie in [0, 1].  Applying this twice is a no-op.
    """
    u = np.array(scores, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeError(f"relevance matrix must be square, got shape {u.shape}")
    if not 0.0 <= threshold <= 1.0:
        raise DomainError(f"threshold must lie in [0, 1], got {threshold}")
    if np.any(~np.isfinite(u)) or np.any(u < 0.0) or np.any(u > 1.0):
        raise DomainError("relevance scores must lie in [0, 1]")
    u[u < threshold] = 0.0
    np.fill_diagonal(u, 0.0)
    return _frozen(u)


def _parse_float(text, lineno):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", lineno) from None
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"line {lineno}: value {value} outside [0, 1]")
    return value


def load_relevance(path, threshold=DEFAULT_THRESHOLD):
    """Read a relevance matrix from CSV.

    Two layouts are accepted: a headerless dense ``K x K`` table, or a
    sparse triplet table with header ``i,j,u`` and 1-based item indices.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh), start=1)
                if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty relevance file")

    header = [c.strip().lower() for c in rows[0][1]]
    if header == ["i", "j", "u"]:
        triplets = []
        for lineno, row in rows[1:]:
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
            try:
                i, j = int(row[0]), int(row[1])
            except ValueError:
                raise ParseError(f"bad item index in {row!r}", lineno) from None
            if i < 1 or j < 1:
                raise ParseError("item indices are 1-based", lineno)
            triplets.append((i, j, _parse_float(row[2], lineno)))
        if not triplets:
            raise ParseError(f"{path}: triplet file has no entries")
        K = max(max(i, j) for i, j, _ in triplets)
        u = np.zeros((K, K))
        for i, j, v in triplets:
            u[i - 1, j - 1] = v
    else:
        K = len(rows)
        u = np.zeros((K, K))
        for r, (lineno, row) in enumerate(rows):
            if len(row) != K:
                raise ShapeError(
                    f"line {lineno}: dense matrix has {K} rows but {len(row)} columns")
            u[r] = [_parse_float(c, lineno) for c in row]
    return preprocess_relevance(u, threshold)


def save_relevance(u, path, sparse=False):
    u = np.asarray(u)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        if sparse:
            w.writerow(["i", "j", "u"])
            for i, j in zip(*np.nonzero(u)):
                w.writerow([i + 1, j + 1, repr(float(u[i, j]))])
        else:
            for row in u:
                w.writerow([repr(float(v)) for v in row])


def synth_relevance(K, density, seed):
    """Random relevance matrix standing in for a real catalog.

    Each off-diagonal score is zero with probability ``1 - density`` and
    uniform on [0.5, 1] otherwise.  Rows left without any relevant item
    are redrawn, so every item has at least one positive score.
    """
    if K < 2:
        raise ConfigError("synth_relevance needs K >= 2")
    if not 0.0 < density <= 1.0:
        raise ConfigError(f"density must lie in (0, 1], got {density}")
    rng = np.random.default_rng(seed)
    off = ~np.eye(K, dtype=bool)
    u = np.zeros((K, K))
    for i in range(K):
        while True:
            keep = (rng.random(K) < density) & off[i]
            vals = rng.uniform(0.5, 1.0, size=K)
            if keep.any():
                u[i] = np.where(keep, vals, 0.0)
                break
    return _frozen(u)


def zipf_direct_demand(K, pop):
    """Direct-demand vector with ``p0_i`` proportional to ``i ** -pop``."""
    if K < 1:
        raise ConfigError("catalog size must be positive")
    if pop < 0:
        raise ConfigError(f"Zipf exponent must be >= 0, got {pop}")
    w = np.arange(1, K + 1, dtype=float) ** (-float(pop))
    p = w / math.fsum(w)
    return _frozen(p)


def build_costs(demand_bs, C, mode="binary", custom=None):
    """Per-item access costs.

    In binary mode the ``C`` items with the largest baseline demand are
    cached (cost 0) and everything else costs 1.  Demands equal to 12
    decimals count as ties and go to the lower index.
    """
    p = np.asarray(demand_bs, dtype=float)
    K = p.size
    if mode == "custom":
        if custom is None:
            raise ConfigError("custom cost mode needs an explicit cost vector")
        c = np.asarray(custom, dtype=float)
        if c.shape != (K,):
            raise ShapeError(f"cost vector has shape {c.shape}, expected ({K},)")
        if np.any(c < 0.0) or np.any(c > 1.0):
            raise DomainError("costs must lie in [0, 1]")
        return _frozen(c)
    if mode != "binary":
        raise ConfigError(f"unknown cost mode {mode!r}")
    if not 0 <= C <= K:
        raise ConfigError(f"cache size C={C} must lie in [0, K={K}]")
    order = np.argsort(-np.round(p, 12), kind="stable")
    c = np.ones(K)
    c[order[:C]] = 0.0
    return _frozen(c)


def cached_items(costs):
    return np.flatnonzero(np.asarray(costs) == 0.0)


@dataclass(frozen=True)
class ScenarioConfig:
    K: int
    N: int
    C: int
    alpha: float
    pop: float = 0.0
    q: float = 0.8
    b: float = 0.0
    c_f: float = 0.0
    L: int = 40
    M_cuts: int = 100
    fairness_kind: str = "none"
    seed: int = 0
    cut_mode: str = "tangent"

    def __post_init__(self):
        if self.K < 2 or self.N < 1 or self.L < 1 or self.M_cuts < 1:
            raise ConfigError("K >= 2, N >= 1, L >= 1 and M >= 1 are required")
        if self.N >= self.K:
            raise ConfigError(f"N={self.N} must be smaller than K={self.K}")
        if not 0 <= self.C <= self.K:
            raise ConfigError(f"C={self.C} must lie in [0, K]")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha={self.alpha} must lie in (0, 1)")
        # q = 0 is allowed: it switches the quality rows off.
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q={self.q} must lie in [0, 1]")
        if not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"b={self.b} must lie in [0, 1]")
        if self.c_f < 0.0:
            raise ConfigError(f"cf={self.c_f} must be >= 0")
        if self.pop < 0.0:
            raise ConfigError(f"pop={self.pop} must be >= 0")
        if self.fairness_kind not in FAIRNESS_KINDS:
            raise ConfigError(f"fairness must be one of {FAIRNESS_KINDS}")
        if self.cut_mode not in CUT_MODES:
            raise ConfigError(f"cut_mode must be one of {CUT_MODES}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_text(self):
        values = {
            "K": self.K, "N": self.N, "C": self.C, "L": self.L,
            "alpha": self.alpha, "pop": self.pop, "q": self.q, "b": self.b,
            "cf": self.c_f, "fairness": self.fairness_kind, "seed": self.seed,
            "M": self.M_cuts, "cut_mode": self.cut_mode,
        }
        return "".join(f"{k}={values[k]}\n" for k in SCENARIO_KEYS)


_INT_KEYS = {"K", "N", "C", "L", "seed", "M"}
_FIELD = {"cf": "c_f", "fairness": "fairness_kind", "M": "M_cuts"}


def parse_scenario(text):
    """Parse the flat ``key=value`` scenario format.

    Blank lines and ``#`` comments are ignored.  Every key in
    ``SCENARIO_KEYS`` must appear exactly once.
    """
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {raw!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"line {lineno}: unknown scenario key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate scenario key {key!r}")
        if key in _INT_KEYS:
            try:
                seen[key] = int(value)
            except ValueError:
                raise ParseError(f"{key} must be an integer", lineno) from None
        elif key in ("fairness", "cut_mode"):
            seen[key] = value
        else:
            try:
                seen[key] = float(value)
            except ValueError:
                raise ParseError(f"{key} must be a number", lineno) from None
    missing = [k for k in SCENARIO_KEYS if k not in seen]
    if missing:
        raise ConfigError(f"scenario is missing keys: {', '.join(missing)}")
    return ScenarioConfig(**{_FIELD.get(k, k): v for k, v in seen.items()})


def load_scenario(path):
    return parse_scenario(Path(path).read_text())
