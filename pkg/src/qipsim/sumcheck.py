"""Interactive sumcheck protocol for prenex QBF over GF(2^k).

The operator schedule interleaves quantifiers with degree reductions: the
i-th quantifier is followed by reductions of x_1..x_i, so every round's claim
concerns a low-degree univariate polynomial. With n variables there are
N = n(n+1)/2 + n rounds:

    Q1 x1, R x1, Q2 x2, R x1, R x2, ..., Qn xn, R x1, ..., R xn

Round j: the prover sends coefficients f_j (degree capped per round), the
verifier combines f_j(0) and f_j(1) with the round operator's rule and
compares against the running claim, then draws a uniform field element r_j
and carries f_j(r_j) forward. After round N the claim must equal the
arithmetized matrix at the accumulated assignment. Combine rules, writing
rho for the variable's value before the round (characteristic 2):

    forall   f(0) * f(1)
    exists   f(0) + f(1) + f(0) f(1)
    reduce   (1 + rho) f(0) + rho f(1)

The initial claim is 1: with {0,1}-exact arithmetization the full operator
chain evaluates to the formula's truth value, so an honest run on a true
formula never trips a check, and on a false formula the very first message
already contradicts the claim.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Protocol

from . import _kernels
from .gf2k import Field, UniPoly, poly_degree
from .qbf import PrenexQbf, arith_eval, compile_matrix, degree_profile

MAX_PARTIAL_LEAVES = 1 << 22
MAX_SWEEP_DRAWS = 1 << 22
MAX_SEARCH_WORK = 1 << 26


class ProtocolSizeError(RuntimeError):
    """Instance exceeds a configured exhaustive-computation cutoff."""


@dataclass(frozen=True)
class Operator:
    kind: str  # 'forall' | 'exists' | 'reduce'
    var: int   # 1-based variable index


_KIND_CODE = {
    "forall": _kernels.K_FORALL,
    "exists": _kernels.K_EXISTS,
    "reduce": _kernels.K_REDUCE,
}


@dataclass(frozen=True)
class RoundSchedule:
    ops: tuple[Operator, ...]
    degree_bounds: tuple[int, ...]
    degree_bound: int  # d = max(2, structural degree of the matrix)

    @property
    def n_rounds(self) -> int:
        return len(self.ops)

    def kind_codes(self) -> tuple[int, ...]:
        return tuple(_KIND_CODE[op.kind] for op in self.ops)

    def var_codes(self) -> tuple[int, ...]:
        return tuple(op.var - 1 for op in self.ops)


def build_schedule(q: PrenexQbf) -> RoundSchedule:
    per_var, d = degree_profile(q)
    ops: list[Operator] = []
    bounds: list[int] = []
    for i in range(1, q.n + 1):
        kind = "forall" if q.quantifiers[i - 1] == "A" else "exists"
        ops.append(Operator(kind, i))
        bounds.append(1)
        last_block = i == q.n
        for t in range(1, i + 1):
            ops.append(Operator("reduce", t))
            bounds.append(max(2, per_var[t - 1]) if last_block else 2)
    return RoundSchedule(tuple(ops), tuple(bounds), d)


def _combine(kind: str, rho: int, f0: int, f1: int, field: Field) -> int:
    if kind == "forall":
        return field.mul(f0, f1)
    if kind == "exists":
        return f0 ^ f1 ^ field.mul(f0, f1)
    return field.mul(rho ^ 1, f0) ^ field.mul(rho, f1)


def partial_value(
    q: PrenexQbf,
    schedule: RoundSchedule,
    field: Field,
    j: int,
    assignment: Sequence[int],
    max_leaves: int = MAX_PARTIAL_LEAVES,
) -> int:
    """Value of the operator suffix after round j at the given assignment.

    j=0 is the whole chain (the truth value on a valid instance); j=N leaves
    no operators and returns the arithmetized matrix value.
    """
    n_rounds = schedule.n_rounds
    if not 0 <= j <= n_rounds:
        raise ValueError(f"round index {j} outside 0..{n_rounds}")
    if len(assignment) != q.n:
        raise ValueError(f"assignment must have {q.n} entries")
    if 1 << (n_rounds - j) > max_leaves:
        raise ProtocolSizeError("operator suffix too deep for exact evaluation")
    for a in assignment:
        field.check(a)
    return field.ops.quantified_value(
        schedule.kind_codes(),
        schedule.var_codes(),
        j,
        compile_matrix(q.matrix),
        list(assignment),
        field.g,
        field.k,
    )


def _prefix_assignment(schedule: RoundSchedule, n: int, r_prefix: Sequence[int]) -> list[int]:
    assign = [0] * n
    for i, r in enumerate(r_prefix):
        assign[schedule.ops[i].var - 1] = r
    return assign


def correct_polynomial(
    q: PrenexQbf,
    schedule: RoundSchedule,
    field: Field,
    j: int,
    r_prefix: Sequence[int],
) -> UniPoly:
    """The honest round-j message: the suffix value as a polynomial in the
    round variable, interpolated from min(d_j + 1, |F|) abscissae. When the
    field is smaller than the degree cap this is the minimal-degree
    representative agreeing on all of F, which every check evaluates."""
    if not 1 <= j <= schedule.n_rounds:
        raise ValueError(f"round index {j} outside 1..{schedule.n_rounds}")
    if len(r_prefix) != j - 1:
        raise ValueError(f"round {j} needs {j - 1} prior challenges")
    assign = _prefix_assignment(schedule, q.n, r_prefix)
    t = schedule.ops[j - 1].var - 1
    npts = min(schedule.degree_bounds[j - 1] + 1, field.order)
    ys = []
    for z in range(npts):
        assign[t] = z
        ys.append(partial_value(q, schedule, field, j, assign))
    return tuple(field.ops.interpolate(range(npts), ys, field.g, field.k))


# ---------------------------------------------------------------------------
# Verifier predicate and transcripts.


def check_transcript(
    q: PrenexQbf,
    schedule: RoundSchedule,
    field: Field,
    r: Sequence[int],
    f: Sequence[Sequence[int]],
) -> Optional[int]:
    """First round whose check fails (1-based; the final matrix comparison
    counts as round N), or None when the verifier accepts."""
    n_rounds = schedule.n_rounds
    if len(r) != n_rounds or len(f) != n_rounds:
        raise ValueError(f"transcript must carry {n_rounds} rounds")
    assign = [0] * q.n
    v = 1
    for j in range(1, n_rounds + 1):
        op = schedule.ops[j - 1]
        fj = f[j - 1]
        if poly_degree(fj) > schedule.degree_bounds[j - 1]:
            return j
        f0 = field.poly_eval(fj, 0)
        f1 = field.poly_eval(fj, 1)
        if _combine(op.kind, assign[op.var - 1], f0, f1, field) != v:
            return j
        assign[op.var - 1] = field.check(r[j - 1])
        v = field.poly_eval(fj, r[j - 1])
    if v != arith_eval(q.matrix, assign, field):
        return n_rounds
    return None


def transcript_valid(
    q: PrenexQbf,
    schedule: RoundSchedule,
    field: Field,
    r: Sequence[int],
    f: Sequence[Sequence[int]],
) -> bool:
    return check_transcript(q, schedule, field, r, f) is None


@dataclass(frozen=True)
class Transcript:
    n: int
    n_rounds: int
    k: int
    g: int
    r: tuple[int, ...]
    f: tuple[UniPoly, ...]
    accepted: bool
    reject_round: Optional[int] = None
    note: Optional[str] = None

    def to_dict(self) -> dict:
        doc = {
            "n": self.n,
            "N": self.n_rounds,
            "k": self.k,
            "g": format(self.g, "x"),
            "r": [format(x, "x") for x in self.r],
            "f": [[format(c, "x") for c in poly] for poly in self.f],
            "verdict": "accept" if self.accepted else "reject",
            "reject_round": self.reject_round,
        }
        if self.note is not None:
            doc["note"] = self.note
        return doc


def transcript_from_dict(doc: dict) -> Transcript:
    return Transcript(
        n=doc["n"],
        n_rounds=doc["N"],
        k=doc["k"],
        g=int(doc["g"], 16),
        r=tuple(int(x, 16) for x in doc["r"]),
        f=tuple(tuple(int(c, 16) for c in poly) for poly in doc["f"]),
        accepted=doc["verdict"] == "accept",
        reject_round=doc.get("reject_round"),
        note=doc.get("note"),
    )


# ---------------------------------------------------------------------------
# Prover policies and protocol runs.


class ProverPolicy(Protocol):
    def next_poly(
        self, j: int, r_prefix: tuple[int, ...], sent: tuple[UniPoly, ...]
    ) -> Sequence[int]:
        """Message for round j given the challenges and messages so far."""
        ...


class HonestPolicy:
    """Replies with the correct polynomial every round."""

    def __init__(self, q: PrenexQbf, field: Field, schedule: RoundSchedule | None = None):
        self.q = q
        self.field = field
        self.schedule = schedule or build_schedule(q)

    def next_poly(self, j, r_prefix, sent):
        return correct_polynomial(self.q, self.schedule, self.field, j, r_prefix)


def honest_policy(q: PrenexQbf, field: Field) -> HonestPolicy:
    return HonestPolicy(q, field)


def run_with_randomness(
    q: PrenexQbf,
    field: Field,
    policy: ProverPolicy,
    r_seq: Sequence[int],
    schedule: RoundSchedule | None = None,
) -> Transcript:
    """Drive one interaction with the given challenge string. The verifier
    stops at the first failed check; a policy exception is recorded as a
    rejection at the round it occurred."""
    schedule = schedule or build_schedule(q)
    n_rounds = schedule.n_rounds
    if len(r_seq) != n_rounds:
        raise ValueError(f"need {n_rounds} challenges")
    assign = [0] * q.n
    v = 1
    sent: list[UniPoly] = []
    r_used: list[int] = []

    def reject(j: int, note: str | None = None) -> Transcript:
        return Transcript(
            q.n, n_rounds, field.k, field.g,
            tuple(r_used), tuple(sent), False, j, note,
        )

    for j in range(1, n_rounds + 1):
        op = schedule.ops[j - 1]
        try:
            fj = tuple(policy.next_poly(j, tuple(r_used), tuple(sent)))
        except Exception as exc:  # prover failure is a protocol rejection
            return reject(j, f"prover error: {exc!r}")
        sent.append(fj)
        if poly_degree(fj) > schedule.degree_bounds[j - 1]:
            return reject(j, "degree bound exceeded")
        f0 = field.poly_eval(fj, 0)
        f1 = field.poly_eval(fj, 1)
        if _combine(op.kind, assign[op.var - 1], f0, f1, field) != v:
            return reject(j)
        rj = field.check(r_seq[j - 1])
        r_used.append(rj)
        assign[op.var - 1] = rj
        v = field.poly_eval(fj, rj)
    if v != arith_eval(q.matrix, assign, field):
        return reject(n_rounds, "final matrix check failed")
    return Transcript(
        q.n, n_rounds, field.k, field.g, tuple(r_used), tuple(sent), True, None
    )


def run_protocol(
    q: PrenexQbf,
    field: Field,
    policy: ProverPolicy,
    rng: random.Random | int = 0,
    schedule: RoundSchedule | None = None,
) -> Transcript:
    """One seeded run; each challenge is one k-bit draw from the PRNG."""
    schedule = schedule or build_schedule(q)
    if isinstance(rng, int):
        rng = random.Random(rng)
    r_seq = [rng.getrandbits(field.k) for _ in range(schedule.n_rounds)]
    return run_with_randomness(q, field, policy, r_seq, schedule)


def honest_always_accepts(
    q: PrenexQbf,
    field: Field,
    schedule: RoundSchedule | None = None,
    max_draws: int = MAX_SWEEP_DRAWS,
) -> bool:
    """Exhaustive completeness sweep over every challenge string, walking
    shared prefixes once (sum_j |F|^j nodes instead of N * |F|^N)."""
    schedule = schedule or build_schedule(q)
    if field.order ** schedule.n_rounds > max_draws:
        raise ProtocolSizeError("challenge space exceeds the exhaustive cutoff")
    return field.ops.honest_sweep(
        schedule.kind_codes(),
        schedule.var_codes(),
        schedule.degree_bounds,
        compile_matrix(q.matrix),
        q.n,
        field.g,
        field.k,
    )


# ---------------------------------------------------------------------------
# Optimal cheating prover (exact, by backward induction).


class TabulatedPolicy:
    """Policy replaying per-state choices computed by a solver. The state
    (round, assignment, running claim) is reconstructed from the challenge
    prefix and the policy's own earlier messages."""

    def __init__(self, q: PrenexQbf, field: Field, schedule: RoundSchedule,
                 choice: dict, value: Fraction):
        self.q = q
        self.field = field
        self.schedule = schedule
        self.choice = choice
        self.value = value

    def next_poly(self, j, r_prefix, sent):
        assign = (0,) * self.q.n
        v = 1
        for i in range(1, j):
            coeffs = self.choice[(i, assign, v)]
            t = self.schedule.ops[i - 1].var - 1
            r = r_prefix[i - 1]
            v = self.field.poly_eval(coeffs, r)
            assign = assign[:t] + (r,) + assign[t + 1:]
        return self.choice[(j, assign, v)]


def optimal_cheater(
    q: PrenexQbf,
    field: Field,
    schedule: RoundSchedule | None = None,
    max_work: int = MAX_SEARCH_WORK,
) -> tuple[TabulatedPolicy, Fraction]:
    """Best possible acceptance probability over all prover strategies, with
    a policy achieving it. Explores every coefficient tuple within each
    round's degree cap, memoized on (round, assignment, claim); the result is
    an exact rational with denominator dividing |F|^N."""
    schedule = schedule or build_schedule(q)
    order = field.order
    n_rounds = schedule.n_rounds
    dmax = max(schedule.degree_bounds)
    if order ** (dmax + 1) * order ** (q.n + 1) > max_work:
        raise ProtocolSizeError("cheater search space exceeds the cutoff")
    prog = compile_matrix(q.matrix)
    g, k = field.g, field.k
    ops_mod = field.ops
    memo: dict[tuple, Fraction] = {}
    choice: dict[tuple, UniPoly] = {}

    def solve(j: int, assign: tuple[int, ...], v: int) -> Fraction:
        if j > n_rounds:
            final = ops_mod.eval_formula(prog, assign, g, k)
            return Fraction(1) if v == final else Fraction(0)
        key = (j, assign, v)
        hit = memo.get(key)
        if hit is not None:
            return hit
        op = schedule.ops[j - 1]
        t = op.var - 1
        rho = assign[t]
        best = Fraction(0)
        best_f: UniPoly | None = None
        for coeffs in itertools.product(range(order), repeat=schedule.degree_bounds[j - 1] + 1):
            f0 = coeffs[0]
            f1 = ops_mod.poly_eval(coeffs, 1, g, k)
            if _combine(op.kind, rho, f0, f1, field) != v:
                continue
            total = Fraction(0)
            for r in range(order):
                child = assign[:t] + (r,) + assign[t + 1:]
                total += solve(j + 1, child, ops_mod.poly_eval(coeffs, r, g, k))
            p = total / order
            if best_f is None or p > best:
                best, best_f = p, coeffs
            if best == 1:
                break
        assert best_f is not None  # every combine rule admits a solution
        memo[key] = best
        choice[key] = best_f
        return best

    value = solve(1, (0,) * q.n, 1)
    return TabulatedPolicy(q, field, schedule, choice, value), value


def accepting_row_messages(
    q: PrenexQbf,
    field: Field,
    r_row: Sequence[int],
    schedule: RoundSchedule | None = None,
    max_work: int = MAX_SEARCH_WORK,
) -> Optional[tuple[UniPoly, ...]]:
    """A message vector the verifier accepts when the whole challenge string
    is known in advance, or None when no such vector exists. Deterministic:
    candidates are scanned in coefficient-tuple order and the first success
    wins. This is what a prover with full lookahead would send."""
    schedule = schedule or build_schedule(q)
    order = field.order
    n_rounds = schedule.n_rounds
    dmax = max(schedule.degree_bounds)
    if order ** (dmax + 1) * order ** (q.n + 1) > max_work:
        raise ProtocolSizeError("lookahead search space exceeds the cutoff")
    if len(r_row) != n_rounds:
        raise ValueError(f"need {n_rounds} challenges")
    prog = compile_matrix(q.matrix)
    g, k = field.g, field.k
    ops_mod = field.ops
    dead: set[tuple] = set()

    def go(j: int, assign: tuple[int, ...], v: int):
        if j > n_rounds:
            return [] if v == ops_mod.eval_formula(prog, assign, g, k) else None
        key = (j, assign, v)
        if key in dead:
            return None
        op = schedule.ops[j - 1]
        t = op.var - 1
        rho = assign[t]
        r = r_row[j - 1]
        for coeffs in itertools.product(range(order), repeat=schedule.degree_bounds[j - 1] + 1):
            f0 = coeffs[0]
            f1 = ops_mod.poly_eval(coeffs, 1, g, k)
            if _combine(op.kind, rho, f0, f1, field) != v:
                continue
            child = assign[:t] + (r,) + assign[t + 1:]
            rest = go(j + 1, child, ops_mod.poly_eval(coeffs, r, g, k))
            if rest is not None:
                return [coeffs] + rest
        dead.add(key)
        return None

    out = go(1, (0,) * q.n, 1)
    return tuple(out) if out is not None else None


# ---------------------------------------------------------------------------
# Cached per-row honest answers (shared by the quantum verifier).


class TranscriptOracle:
    """Memoized honest messages and verifier verdicts per challenge row."""

    def __init__(self, q: PrenexQbf, field: Field, schedule: RoundSchedule | None = None):
        self.q = q
        self.field = field
        self.schedule = schedule or build_schedule(q)
        self._rows: dict[tuple[int, ...], tuple[UniPoly, ...]] = {}
        self._verdicts: dict[tuple, bool] = {}

    def correct_row(self, r_row: tuple[int, ...]) -> tuple[UniPoly, ...]:
        out = self._rows.get(r_row)
        if out is None:
            out = tuple(
                correct_polynomial(self.q, self.schedule, self.field, j, r_row[: j - 1])
                for j in range(1, self.schedule.n_rounds + 1)
            )
            self._rows[r_row] = out
        return out

    def valid(self, r_row: tuple[int, ...], f_row: tuple[UniPoly, ...]) -> bool:
        key = (r_row, f_row)
        out = self._verdicts.get(key)
        if out is None:
            out = transcript_valid(self.q, self.schedule, self.field, r_row, f_row)
            self._verdicts[key] = out
        return out
