"""Prime sweeps of ``max_λ I_p`` (or ``I_p`` at a chosen λ) over templated GAPs."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from math import ceil

from .counting import KINDS, value_histogram
from .errors import UsageError
from .exact.arith import is_prime, primes_between
from .gap import DEFAULT_ENUM_CAP, enumerate_gap, parse_gap
from .parallel import map_ordered

POLICIES = ("argmax", "fixed", "random")


@dataclass(frozen=True)
class SweepJob:
    """``A`` and ``B`` are GAP templates with a ``{p}`` placeholder, e.g. ``F{p}:0|1|-10..10``."""

    primes: tuple[int, ...]
    A: str
    B: str
    kind: str = "product"
    policy: str = "argmax"
    lam: int | None = None
    threshold: int = 1
    seed: int = 0
    width: int = 1

    def __post_init__(self):
        ps = sorted(set(int(q) for q in self.primes))
        bad = [q for q in ps if not is_prime(q)]
        if bad:
            raise UsageError(f"not prime: {bad[:5]}")
        object.__setattr__(self, "primes", tuple(ps))
        if self.kind not in KINDS:
            raise UsageError(f"unknown equation kind {self.kind!r}")
        if self.policy not in POLICIES:
            raise UsageError(f"λ policy must be one of {', '.join(POLICIES)}")
        if self.policy == "fixed" and self.lam is None:
            raise UsageError("fixed λ policy needs a λ")
        for t in (self.A, self.B):
            if "{p}" not in t:
                raise UsageError(f"template {t!r} lacks the {{p}} placeholder")

    @classmethod
    def from_dict(cls, data: dict) -> SweepJob:
        given = data.get("primes")
        if isinstance(given, dict):
            try:
                primes = primes_between(int(given["lo"]), int(given["hi"]))
            except (KeyError, TypeError, ValueError):
                raise UsageError("primes range needs integer lo and hi") from None
        elif isinstance(given, list):
            primes = given
        else:
            raise UsageError("job needs primes as {lo, hi} or an explicit list")
        lam = data.get("lambda", "argmax")
        policy, fixed = (lam, None) if isinstance(lam, str) else ("fixed", int(lam))
        try:
            return cls(
                primes=tuple(primes),
                A=str(data["A"]),
                B=str(data.get("B", data["A"])),
                kind=data.get("kind", "product"),
                policy=policy,
                lam=fixed,
                threshold=int(data.get("threshold", 1)),
                seed=int(data.get("seed", 0)),
                width=int(data.get("width", 1)),
            )
        except KeyError as exc:
            raise UsageError(f"job: missing field {exc}") from None

    def params(self) -> dict:
        """Everything that determines the output; the width is deliberately absent."""
        return {
            "primes": list(self.primes),
            "A": self.A,
            "B": self.B,
            "kind": self.kind,
            "policy": self.policy,
            "lambda": self.lam,
            "threshold": self.threshold,
            "seed": self.seed,
        }


def sweep_prime(p: int, job: SweepJob, enum_cap: int = DEFAULT_ENUM_CAP) -> dict:
    a = enumerate_gap(parse_gap(job.A.format(p=p)), enum_cap)
    b = enumerate_gap(parse_gap(job.B.format(p=p)), enum_cap)
    hist = value_histogram(a, b, job.kind)
    nonzero = sum(c for v, c in hist.items() if v)
    if job.policy == "argmax":
        lam = min((v for v in hist if v), key=lambda v: (-hist[v], v), default=1)
    elif job.policy == "fixed":
        lam = job.lam % p
    else:
        lam = random.Random(f"{job.seed}:{p}").randrange(1, p)
    count = hist.get(lam, 0) if lam else None
    return {
        "p": p,
        "size_a": len(a),
        "size_b": len(b),
        "lambda": lam,
        "count": count,
        "nonzero_pairs": nonzero,
        "average_bound": ceil(nonzero / (p - 1)),
        "exceeds": count is not None and count > job.threshold,
    }


def summarize(job: SweepJob, rows: list[dict]) -> dict:
    counted = [r for r in rows if r["count"] is not None]
    exceed = sum(1 for r in counted if r["exceeds"])
    hist = Counter(r["count"] for r in counted)
    return {
        "primes": len(rows),
        "threshold": job.threshold,
        "exceed_count": exceed,
        "exceedance_fraction": str(Fraction(exceed, len(counted))) if counted else None,
        "count_histogram": {str(k): hist[k] for k in sorted(hist)},
    }


def run_sweep(job: SweepJob, width: int | None = None, enum_cap: int = DEFAULT_ENUM_CAP) -> tuple[list[dict], dict]:
    """Per-prime rows in ascending prime order, then the summary."""
    rows = map_ordered(partial(sweep_prime, job=job, enum_cap=enum_cap), job.primes, width or job.width)
    return rows, summarize(job, rows)
