"""One rank-reduction step for product counting over GAPs, and its iteration.

From an instance ``ab = λ`` the step collects the solution parameters
``K``, finds a rational point ``(ρ, τ)`` annihilating every difference
polynomial anchored at the first solution, and uses the factorisation

    (ρ0 + ρ·h)(τ0 + τ·j) = ϑ    for every (h, j) in K

to confine each solution to a hyperplane of one parameter box. Every
hyperplane slice is then re-expressed as a GAP of smaller rank. All
inequalities are re-checked by exhaustive counting, so constants never
need to be trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

from .bilinear.system import CoeffSystem, max_independent_subset
from .bilinear.variety import WitnessPoint, rational_witness
from .counting import ModInstance, chang_count_rational, count_modp, solution_pairs
from .errors import DomainError, InvariantViolation, UsageError
from .exact.arith import inv_mod
from .exact.matrix import rank
from .gap import Gap, format_gap
from .lattice import ratio_extraction, reduced_basis, span_lattice

DEFAULT_CD = 4


# -- preparation -------------------------------------------------------------


def normalize(inst: ModInstance) -> ModInstance:
    """Drop zero generators and rescale so the first generator of each side is 1."""
    if inst.kind != "product":
        raise UsageError("reduction works on product instances")
    p = inst.p
    A = inst.A.drop_zero_generators()
    B = inst.B.drop_zero_generators()
    lam = inst.lam
    if A.rank:
        c = inv_mod(A.gens[0], p)
        A, lam = A.scaled(c), lam * c
    if B.rank:
        c = inv_mod(B.gens[0], p)
        B, lam = B.scaled(c), lam * c
    return ModInstance(A, B, lam % p, "product")


def solution_params(inst: ModInstance) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Canonical parameter pairs of all solutions, in (a, b)-index order."""
    a, b, pairs = solution_pairs(inst)
    return [(a.preimages[i], b.preimages[j]) for i, j in pairs]


# -- the split --------------------------------------------------------------------


def _affine(coeffs: Sequence[Fraction], h: Sequence[int]) -> Fraction:
    return coeffs[0] + sum(c * x for c, x in zip(coeffs[1:], h))


@dataclass(frozen=True)
class SplitSet:
    theta: Fraction
    case: str
    omega: tuple[tuple[Fraction, Fraction], ...] = ()

    def payload(self) -> dict:
        return {
            "theta": str(self.theta),
            "case": self.case,
            "omega": [[str(x), str(y)] for x, y in self.omega],
        }


def split_theta(
    w: WitnessPoint,
    h0: Sequence[int],
    j0: Sequence[int],
    a_ranges: Sequence[tuple[int, int]],
    b_ranges: Sequence[tuple[int, int]],
    K: Sequence | None = None,
) -> SplitSet:
    """ϑ at the anchor and, when nonzero, every factor pair of ϑ over the two boxes.

    With ``K`` given, the identity ``(ρ0+ρ·h)(τ0+τ·j) = ϑ`` and the
    completeness of Ω are checked for every solution.
    """
    theta = _affine(w.rho, h0) * _affine(w.tau, j0)
    if theta == 0:
        split = SplitSet(Fraction(0), "theta_zero")
    else:
        left = Gap(w.rho[0], w.rho[1:], a_ranges)
        right = Gap(w.tau[0], w.tau[1:], b_ranges)
        cap = left.box_size * right.box_size + 1
        rep = chang_count_rational(left, theta, right, method="lookup", witness_cap=cap)
        split = SplitSet(theta, "theta_nonzero", tuple(rep.witnesses))
    if K is not None:
        omega = set(split.omega)
        for h, j in K:
            u, v = _affine(w.rho, h), _affine(w.tau, j)
            if u * v != theta:
                raise InvariantViolation("witness factorisation fails on a solution")
            if theta != 0 and (u, v) not in omega:
                raise InvariantViolation("Ω misses a solution's factor pair")
    return split


# -- slicing a GAP along a hyperplane of its parameter box ----------------------


class PathFailed(Exception):
    """The chosen side cannot be reduced (e.g. a ratio denominator vanishes mod p)."""


@dataclass(frozen=True)
class Slice:
    gap: Gap | None
    case: str
    info: dict = field(default_factory=dict)


def _kernel_points(c: Sequence[Fraction], widths: Sequence[int]) -> list[tuple[int, ...]]:
    """Nonzero integer ``n`` with ``c·n = 0`` and ``|n_i| <= widths[i]``, in lexicographic order."""
    r = len(c)
    piv = next(i for i, x in enumerate(c) if x != 0)
    others = [i for i in range(r) if i != piv]
    out = []
    for vals in iproduct(*(range(-widths[i], widths[i] + 1) for i in others)):
        s = sum(c[i] * v for i, v in zip(others, vals))
        x = -s / c[piv]
        if x.denominator != 1 or abs(x) > widths[piv]:
            continue
        n = [0] * r
        n[piv] = int(x)
        for i, v in zip(others, vals):
            n[i] = v
        if any(n):
            out.append(tuple(n))
    return out


def slice_gap(G: Gap, c: Sequence[Fraction], xi: Fraction) -> Slice:
    """A GAP of rank ``< G.rank`` containing ``{G(h) : c·h = xi}``.

    Translating by the lexicographically first slice point ``h*`` moves the
    slice into the kernel lattice intersected with the difference box. If
    that intersection spans fewer than ``rank - 1`` dimensions the slice is
    re-parametrised through a reduced basis; otherwise the pivot coordinate
    is eliminated using the extracted ratios modulo p.
    """
    r = G.rank
    c = [Fraction(x) for x in c]
    pts = [h for h in G.params() if sum(ci * hi for ci, hi in zip(c, h)) == xi]
    if not pts:
        return Slice(None, "empty")
    hstar = pts[0]
    base_val = G.value(hstar)
    p = G.p
    widths = [hi - lo for lo, hi in G.ranges]
    kpts = _kernel_points(c, widths)
    dim = rank([list(v) for v in kpts]) if kpts else 0
    info = {"h_star": list(hstar), "xi": str(xi), "lattice_dim": dim, "kernel_points": len(kpts)}
    if dim < r - 1:
        if dim == 0:
            out = Gap(base_val, (), (), p)
            info["C_tilde"] = "0"
        else:
            red = reduced_basis(span_lattice(kpts, r))
            R = 0
            for v in kpts:
                k = red.basis.coordinates(v)
                if k is None:
                    raise InvariantViolation("kernel point outside its own span")
                R = max(R, max(abs(x) for x in k))
            gens = tuple(sum(g * bi for g, bi in zip(G.gens, b)) % p for b in red.basis.rows)
            out = Gap(base_val, gens, ((-R, R),) * dim, p)
            info.update(
                {
                    "basis": [list(b) for b in red.basis.rows],
                    "radius": R,
                    "C_tilde": str(Fraction(R, max(G.height, 1))),
                    "c1": red.c1,
                    "c2": red.c2,
                }
            )
        case = "low_dim"
    else:
        ordered = sorted(kpts, key=lambda v: (max(map(abs, v)), v))
        chosen: list[list[int]] = []
        for v in ordered:
            if len(chosen) == r - 1:
                break
            if rank(chosen + [list(v)]) > len(chosen):
                chosen.append(list(v))
        ext = ratio_extraction(chosen, alpha=c, box=max(widths, default=0))
        j = ext.pivot
        ts = {}
        for i, q in ext.ratios.items():
            if (q.numerator != 0 and q.numerator % p == 0) or q.denominator % p == 0:
                raise PathFailed(f"ratio {q} degenerates modulo {p}")
            ts[i] = q.numerator * inv_mod(q.denominator, p) % p
        gj = G.gens[j]
        base = (G.base + gj * (hstar[j] + sum(t * hstar[i] for i, t in ts.items()))) % p
        keep = [i for i in range(r) if i != j]
        gens = tuple((G.gens[i] - gj * ts[i]) % p for i in keep)
        out = Gap(base, gens, tuple(G.ranges[i] for i in keep), p)
        info.update({"pivot": j, "ratios": {str(i): str(q) for i, q in ext.ratios.items()}, "minor_det": ext.det})
        case = "full_dim"
    members = set(out.enumerate().elements)
    if any(G.value(h) not in members for h in pts):
        raise InvariantViolation("slice element missing from the reduced GAP")
    return Slice(out, case, info)


# -- certificates -------------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    instance: ModInstance
    side: str
    case: str
    count: int
    info: dict = field(default_factory=dict)

    @property
    def ranks(self) -> tuple[int, int]:
        return self.instance.ranks

    def payload(self) -> dict:
        return {
            "A": format_gap(self.instance.A),
            "B": format_gap(self.instance.B),
            "lambda": self.instance.lam,
            "ranks": list(self.ranks),
            "side": self.side,
            "case": self.case,
            "count": self.count,
            "info": self.info,
        }


@dataclass(frozen=True)
class ReductionCertificate:
    original: ModInstance
    normalized: ModInstance
    status: str
    count: int
    branches: tuple[Branch, ...] = ()
    anchor: tuple | None = None
    witness: WitnessPoint | None = None
    split: SplitSet | None = None
    subset_size: int = 0
    verified: bool = False
    diagnostic: str = ""

    @property
    def reduced_total(self) -> int:
        return sum(b.count for b in self.branches)

    def payload(self) -> dict:
        return {
            "status": self.status,
            "p": self.original.p,
            "A": format_gap(self.original.A),
            "B": format_gap(self.original.B),
            "lambda": self.original.lam,
            "normalized": {
                "A": format_gap(self.normalized.A),
                "B": format_gap(self.normalized.B),
                "lambda": self.normalized.lam,
            },
            "count": self.count,
            "anchor": None if self.anchor is None else {"h0": list(self.anchor[0]), "j0": list(self.anchor[1])},
            "independent_rows": self.subset_size,
            "witness": None if self.witness is None else self.witness.payload(),
            "split": None if self.split is None else self.split.payload(),
            "branches": [b.payload() for b in self.branches],
            "reduced_total": self.reduced_total,
            "verified": self.verified,
            "diagnostic": self.diagnostic,
        }


def _pin(inst: ModInstance, K) -> tuple[Branch, ...]:
    """Replace an instance with at most one solution per fixed side by a rank-(0,1) one."""
    p = inst.p
    if len(K) == 1 and inst.A.rank and inst.B.rank:
        a, b = inst.A.value(K[0][0]), inst.B.value(K[0][1])
        red = ModInstance(Gap(a, (), (), p), Gap(b, (1,), ((0, 0),), p), inst.lam)
        side = "both"
    elif inst.A.rank == 0:
        a = inst.A.base
        red = ModInstance(inst.A, Gap(inst.lam * inv_mod(a, p), (1,), ((0, 0),), p), inst.lam)
        side = "B"
    else:
        b = inst.B.base
        red = ModInstance(Gap(inst.lam * inv_mod(b, p), (1,), ((0, 0),), p), inst.B, inst.lam)
        side = "A"
    return (Branch(red, side, "pin", count_modp(red).count),)


def _side_branches(inst: ModInstance, side: str, coeffs, xis) -> list[Branch]:
    G = inst.A if side == "A" else inst.B
    out = []
    for xi in xis:
        s = slice_gap(G, coeffs, xi)
        if s.gap is None:
            continue
        red = ModInstance(s.gap, inst.B, inst.lam) if side == "A" else ModInstance(inst.A, s.gap, inst.lam)
        out.append(Branch(red, side, s.case, count_modp(red).count, s.info))
    return out


def _symmetric(x: int, p: int) -> int:
    x %= p
    return x - p if 2 * x > p else x


def _coefficient_lift(inst: ModInstance) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The GAP coefficients lifted to ``(-p/2, p/2]``: a point on V whenever no solution wraps mod p."""
    p = inst.p
    rho = tuple(_symmetric(x, p) for x in (inst.A.base, *inst.A.gens))
    tau = tuple(_symmetric(x, p) for x in (inst.B.base, *inst.B.gens))
    return rho, tau


def reduce_once(inst: ModInstance, C_d: int = DEFAULT_CD) -> ReductionCertificate:
    """One certified reduction step; see the module docstring."""
    norm = normalize(inst)
    d, e = norm.ranks
    if d + e < 2:
        raise DomainError("reduction needs d + e >= 2")
    K = solution_params(norm)
    n = len(K)

    def cert(status, **kw):
        return ReductionCertificate(inst, norm, status, n, **kw)

    if n == 0:
        return cert("empty", verified=True)
    if n == 1:
        return cert("degenerate", anchor=K[0], verified=True)
    if d == 0 or e == 0:
        branches = _pin(norm, K)
        return cert("pinned", branches=branches, verified=sum(b.count for b in branches) >= n)
    H = max(norm.A.height, norm.B.height)
    if norm.p <= C_d * H ** max(d, e):
        raise DomainError(f"need p > C_d H^d = {C_d * H ** max(d, e)}")
    h0, j0 = K[0]
    sys = CoeffSystem(d, e, H, h0, j0, tuple(K[1:]))
    idx, _ = max_independent_subset(sys)
    sub = sys.subsystem(idx)
    w = rational_witness(sub, hints=[_coefficient_lift(norm)])
    if w is None:
        return cert("aborted", anchor=K[0], subset_size=len(idx), diagnostic="no rational point on the variety")
    if not w.annihilates(sys):
        raise InvariantViolation("witness fails on a dependent row")
    split = split_theta(w, h0, j0, norm.A.ranges, norm.B.ranges, K)
    rho_lin, tau_lin = w.rho[1:], w.tau[1:]
    if split.case == "theta_zero":
        try:
            branches = _side_branches(norm, "A", rho_lin, [-w.rho[0]])
            branches += _side_branches(norm, "B", tau_lin, [-w.tau[0]])
        except PathFailed as exc:
            return cert("aborted", anchor=K[0], witness=w, split=split, subset_size=len(idx), diagnostic=str(exc))
    else:
        branches = None
        errors = []
        for side in ("A", "B"):
            if side == "A":
                xis = sorted({u - w.rho[0] for u, _ in split.omega})
                coeffs = rho_lin
            else:
                xis = sorted({v - w.tau[0] for _, v in split.omega})
                coeffs = tau_lin
            try:
                branches = _side_branches(norm, side, coeffs, xis)
                break
            except PathFailed as exc:
                errors.append(f"{side}: {exc}")
        if branches is None:
            return cert("aborted", anchor=K[0], witness=w, split=split, subset_size=len(idx), diagnostic="; ".join(errors))
    for b in branches:
        bd, be = b.ranks
        if not (bd <= d and be <= e and bd + be < d + e):
            raise InvariantViolation("reduced instance does not lower the rank")
    total = sum(b.count for b in branches)
    return cert(
        "reduced",
        branches=tuple(branches),
        anchor=K[0],
        witness=w,
        split=split,
        subset_size=len(idx),
        verified=total >= n,
    )


# -- iteration -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainNode:
    depth: int
    parent: int | None
    certificate: ReductionCertificate | None
    instance: ModInstance


@dataclass(frozen=True)
class ChainResult:
    true_count: int
    steps: tuple[ChainNode, ...]
    leaves: tuple[tuple[ModInstance, int, int], ...]
    aborted: tuple[str, ...]

    @property
    def bound(self) -> int | None:
        return None if self.aborted else sum(c for _, c, _ in self.leaves)

    @property
    def max_depth(self) -> int:
        return max((dep for _, _, dep in self.leaves), default=0)

    def payload(self) -> dict:
        return {
            "true_count": self.true_count,
            "bound": self.bound,
            "steps": [
                {"depth": s.depth, "parent": s.parent, "certificate": s.certificate.payload()}
                for s in self.steps
                if s.certificate is not None
            ],
            "leaves": [
                {"A": format_gap(i.A), "B": format_gap(i.B), "lambda": i.lam, "ranks": list(i.ranks), "count": c, "depth": dep}
                for i, c, dep in self.leaves
            ],
            "max_depth": self.max_depth,
            "aborted": list(self.aborted),
        }


def reduce_chain(inst: ModInstance, C_d: int = DEFAULT_CD, max_steps: int = 10000) -> ChainResult:
    """Reduce until every leaf has total rank 1 (each then has at most one solution)."""
    true_count = count_modp(inst).count
    steps: list[ChainNode] = []
    leaves: list[tuple[ModInstance, int, int]] = []
    aborted: list[str] = []
    queue: list[tuple[ModInstance, int, int | None]] = [(inst, 0, None)]
    while queue:
        if len(steps) > max_steps:
            aborted.append("step budget exhausted")
            break
        cur, depth, parent = queue.pop(0)
        norm = normalize(cur)
        if sum(norm.ranks) <= 1:
            cnt = count_modp(norm).count
            if cnt > 1:
                raise InvariantViolation("a rank-1 leaf has more than one solution")
            if cnt or sum(norm.ranks) == 1:
                leaves.append((norm, cnt, depth))
            continue
        c = reduce_once(cur, C_d)
        steps.append(ChainNode(depth, parent, c, cur))
        me = len(steps) - 1
        if c.status == "empty":
            continue
        if c.status == "aborted":
            aborted.append(c.diagnostic)
            continue
        if not c.verified:
            raise InvariantViolation("reduction step failed its recount")
        if c.status == "degenerate":
            (b,) = _pin(c.normalized, [c.anchor])
            leaves.append((b.instance, b.count, depth + 1))
            continue
        for b in c.branches:
            queue.append((b.instance, depth + 1, me))
    res = ChainResult(true_count, tuple(steps), tuple(leaves), tuple(aborted))
    if res.bound is not None and res.bound < true_count:
        raise InvariantViolation("chain bound below the true count")
    return res
