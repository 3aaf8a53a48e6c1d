"""Symbolic Szlenk-index calculus for direct-sum expressions.

The calculus works on two levels:

* epsilon-profiles: exact step functions eps^q -> ordinal recording an
  epsilon-Szlenk index as epsilon shrinks (finitely many explicit steps plus
  a constant or ladder tail), and
* space expressions: atoms carrying profiles, C(gamma+1) spaces, finite sums
  and p-direct sums (p = 0, 1, a rational in (1, oo), or oo), evaluated to an
  exact ordinal index or a not-Asplund verdict with a rule tag saying which
  evaluation rule fired.

Scalar thresholds are carried as q-th powers of rationals ("eps_q" values), so
every comparison is exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .exactmath import ceil_frac, pow_bounds
from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    is_power_of_omega,
    least_omega_power_above,
    mul,
    omega_pow,
    sup_affine,
)


class InvalidParams(ValueError):
    """A quantitative-bound parameter is out of its legal range."""


class MalformedExpr(ValueError):
    """A space expression or profile violates a structural invariant."""


class NormsNotDecidable(MalformedExpr):
    """The norm sequence of a parametric family has no decidable c0 test."""


class DepthCapExceeded(RuntimeError):
    """Space construction grew past the configured node budget."""


# ---------------------------------------------------------------------------
# epsilon-profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstTail:
    """Below the last step threshold the profile is constantly `value`."""

    value: Ordinal


@dataclass(frozen=True)
class LadderTail:
    """Below the last threshold the profile climbs a ladder.

    The value at eps is slope*n + offset where n = max{j >= 0 : base_q *
    ratio_q**j >= eps_q}; if even j = 0 fails (eps_q > base_q) the value is
    the offset.  Successive rungs appear as eps crosses base_q * ratio_q**j.
    """

    slope: Ordinal
    offset: Ordinal
    base_q: Fraction
    ratio_q: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_q", Fraction(self.base_q))
        object.__setattr__(self, "ratio_q", Fraction(self.ratio_q))
        if self.slope.is_zero():
            raise MalformedExpr("ladder tails need a nonzero slope (use ConstTail)")
        if not self.offset.is_successor():
            raise MalformedExpr("ladder offsets must be successor ordinals")
        if self.base_q <= 0:
            raise MalformedExpr("ladder base_q must be positive")
        if not 0 < self.ratio_q < 1:
            raise MalformedExpr("ladder ratio_q must lie in (0, 1)")

    def rung(self, eps_q: Fraction) -> int:
        n, x = 0, self.base_q
        if x < eps_q:
            return 0
        while x * self.ratio_q >= eps_q:
            x *= self.ratio_q
            n += 1
        return n

    def value_at(self, eps_q: Fraction) -> Ordinal:
        return add(mul(self.slope, Ordinal.from_int(self.rung(eps_q))), self.offset)


ProfileTail = Union[ConstTail, LadderTail]


@dataclass(frozen=True)
class EpsProfile:
    """An exact map eps^q -> ordinal, nondecreasing as eps shrinks.

    ``steps`` is a tuple of (threshold_q, value) with strictly decreasing
    positive thresholds; value k applies on (threshold_{k+1}, threshold_k]:
    at its own threshold and below, until the next threshold takes over.
    Above every threshold the first value applies; strictly below the last
    threshold the tail applies.  Every value must be a successor >= 1 (an
    epsilon-Szlenk index of a nonempty set is never 0 and never a limit).
    """

    steps: tuple[tuple[Fraction, Ordinal], ...] = ()
    tail: ProfileTail = ConstTail(ONE)

    def __post_init__(self) -> None:
        norm = tuple((Fraction(t), v) for t, v in self.steps)
        object.__setattr__(self, "steps", norm)
        prev_t: Optional[Fraction] = None
        prev_v: Optional[Ordinal] = None
        for t, v in norm:
            if t <= 0:
                raise MalformedExpr("profile thresholds must be positive")
            if prev_t is not None and t >= prev_t:
                raise MalformedExpr("profile thresholds must strictly decrease")
            if not v.is_successor():
                raise MalformedExpr(f"profile value {v} is not a successor")
            if prev_v is not None and v < prev_v:
                raise MalformedExpr("profile values must not decrease as eps shrinks")
            prev_t, prev_v = t, v
        if isinstance(self.tail, ConstTail):
            if not self.tail.value.is_successor():
                raise MalformedExpr("constant tails must be successor ordinals")
            tail_min = self.tail.value
        else:
            tail_min = self.tail.value_at(norm[-1][0]) if norm else self.tail.offset
        if prev_v is not None and tail_min < prev_v:
            raise MalformedExpr("tail values must dominate the step values")


def profile_eval(profile: EpsProfile, eps_q: Fraction) -> Ordinal:
    """The profile's value at eps (given as eps^q > 0).

    Each step value applies at its own threshold and below, until the next
    threshold takes over; the first value also applies above every
    threshold; strictly below the last threshold the tail applies.
    """
    eps_q = Fraction(eps_q)
    if eps_q <= 0:
        raise InvalidParams("eps_q must be positive")
    steps = profile.steps
    if steps:
        if eps_q > steps[0][0]:
            return steps[0][1]
        if eps_q >= steps[-1][0]:
            value = steps[0][1]
            for t, v in steps:  # thresholds decrease: keep the last t >= eps
                if t >= eps_q:
                    value = v
                else:
                    break
            return value
    if isinstance(profile.tail, ConstTail):
        return profile.tail.value
    return profile.tail.value_at(eps_q)


def profile_total_sup(profile: EpsProfile) -> Ordinal:
    """sup over eps > 0 of the profile (monotonicity makes this the tail sup)."""
    if isinstance(profile.tail, ConstTail):
        return profile.tail.value
    return sup_affine(profile.tail.slope, profile.tail.offset)


def _lopa_weak(x: Ordinal) -> Ordinal:
    """Least power of w that is >= x."""
    return x if is_power_of_omega(x) else least_omega_power_above(x)


def profile_sup_attained(profile: EpsProfile) -> bool:
    """Whether the profile's supremum is reached at some positive eps."""
    return profile_total_sup(profile).is_successor()


# ---------------------------------------------------------------------------
# parametric summand families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstNorms:
    """||T_n|| = value for every n."""

    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))
        if self.value < 0:
            raise MalformedExpr("norms are non-negative")

    def in_c0(self) -> bool:
        return self.value == 0


@dataclass(frozen=True)
class GeometricNorms:
    """||T_n|| = base * ratio**n with 0 < ratio < 1."""

    base: Fraction
    ratio: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", Fraction(self.base))
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        if self.base <= 0 or not 0 < self.ratio < 1:
            raise MalformedExpr("geometric norms need base > 0 and ratio in (0, 1)")

    def in_c0(self) -> bool:
        return True


NormSeq = Union[ConstNorms, GeometricNorms]


@dataclass(frozen=True)
class Copies:
    """Every member of the family has the same profile."""

    profile: EpsProfile
    compact: bool = False


@dataclass(frozen=True)
class LadderMembers:
    """Member n has value slope*n + offset for eps_q <= base_q * ratio_q**n,
    and the common `low` value above that threshold."""

    slope: Ordinal
    offset: Ordinal
    low: Ordinal
    base_q: Fraction
    ratio_q: Fraction
    compact: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_q", Fraction(self.base_q))
        object.__setattr__(self, "ratio_q", Fraction(self.ratio_q))
        if self.slope.is_zero():
            raise MalformedExpr("ladder families need a nonzero slope (use Copies)")
        if not self.offset.is_successor() or not self.low.is_successor():
            raise MalformedExpr("family values must be successor ordinals")
        if self.low > self.offset:
            raise MalformedExpr("family low value must not exceed the offset")
        if self.base_q <= 0 or not 0 < self.ratio_q < 1:
            raise MalformedExpr("family thresholds need base_q > 0, ratio_q in (0, 1)")
        if self.compact:
            raise MalformedExpr("ladder families are never compact")


Members = Union[Copies, LadderMembers]


@dataclass(frozen=True)
class ParamFamily:
    """A countable summand family T_0, T_1, ... with decidable norm shape."""

    norms: NormSeq
    members: Members

    def compact_members(self) -> bool:
        return self.members.compact


def family_sup_at(fam: ParamFamily, eps_q: Fraction) -> Ordinal:
    """sup over n of the n-th member's value at eps (exact)."""
    eps_q = Fraction(eps_q)
    if eps_q <= 0:
        raise InvalidParams("eps_q must be positive")
    m = fam.members
    if isinstance(m, Copies):
        return profile_eval(m.profile, eps_q)
    top = None
    n, x = 0, m.base_q
    if x >= eps_q:
        while x * m.ratio_q >= eps_q:
            x *= m.ratio_q
            n += 1
        top = add(mul(m.slope, Ordinal.from_int(n)), m.offset)
    return m.low if top is None else max(m.low, top)


def family_index_sup(fam: ParamFamily) -> Ordinal:
    """sup over n and eps of the member values (each member's total index)."""
    m = fam.members
    if isinstance(m, Copies):
        return profile_total_sup(m.profile)
    return max(m.low, sup_affine(m.slope, m.offset))


def profile_sup(
    profiles: Union[list[EpsProfile], tuple[EpsProfile, ...], ParamFamily],
    eps_q: Fraction,
) -> Ordinal:
    """Exact sup at eps over a finite profile list or a parametric family."""
    if isinstance(profiles, ParamFamily):
        return family_sup_at(profiles, eps_q)
    if not profiles:
        raise InvalidParams("profile_sup needs at least one profile")
    out = ZERO
    for p in profiles:
        out = max(out, profile_eval(p, eps_q))
    return out


# ---------------------------------------------------------------------------
# space expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """A named operator/space with a declared epsilon-profile.

    Compact atoms must have a trivial profile (index 1): an operator is
    compact exactly when its index is 1, so anything else is inconsistent.
    """

    name: str
    norm_bound: Fraction
    profile: EpsProfile
    compact: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "norm_bound", Fraction(self.norm_bound))
        if self.norm_bound < 0:
            raise MalformedExpr("atom norm bounds are non-negative")
        if self.compact and profile_total_sup(self.profile) != ONE:
            raise MalformedExpr(f"compact atom {self.name!r} must have index 1")


@dataclass(frozen=True)
class CSpace:
    """The space C([0, gamma]) of continuous functions on [0, gamma]."""

    gamma: Ordinal


@dataclass(frozen=True)
class FiniteSum:
    """An unlabeled finite direct sum; its index is the max of the parts."""

    parts: tuple["SpaceExpr", ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise MalformedExpr("finite sums need at least one part")


@dataclass(frozen=True)
class DirectSum:
    """(+ sum over lambda of T_lambda)_p for p = "0", "1", "inf" or p in (1, oo).

    Summands are either an explicit finite tuple of expressions or a
    parametric family.
    """

    p: Union[str, Fraction]
    summands: Union[tuple["SpaceExpr", ...], ParamFamily]

    def __post_init__(self) -> None:
        p = self.p
        if isinstance(p, str):
            if p not in ("0", "1", "inf"):
                try:
                    p = Fraction(p)
                except ValueError:
                    raise MalformedExpr(f"bad direct-sum exponent {self.p!r}") from None
        if isinstance(p, (int, Fraction)):
            p = Fraction(p)
            if p == 0:
                p = "0"
            elif p == 1:
                p = "1"
            elif not p > 1:
                raise MalformedExpr("rational direct-sum exponents must lie in (1, oo)")
        object.__setattr__(self, "p", p)
        if isinstance(self.summands, tuple) and not self.summands:
            raise MalformedExpr("direct sums need at least one summand")


SpaceExpr = Union[Atom, CSpace, FiniteSum, DirectSum]


def norms_in_c0(e: DirectSum) -> bool:
    if isinstance(e.summands, ParamFamily):
        return e.summands.norms.in_c0()
    return True  # finitely many summands always vanish at infinity


def is_compact_expr(e: SpaceExpr) -> bool:
    if isinstance(e, Atom):
        return e.compact
    if isinstance(e, CSpace):
        return e.gamma.is_finite()
    if isinstance(e, FiniteSum):
        return all(is_compact_expr(p) for p in e.parts)
    if isinstance(e, DirectSum):
        if not norms_in_c0(e):
            return False
        if isinstance(e.summands, ParamFamily):
            return e.summands.compact_members()
        return all(is_compact_expr(s) for s in e.summands)
    raise MalformedExpr(f"not a space expression: {e!r}")


@dataclass(frozen=True)
class SpaceIndex:
    """Evaluation result: an exact ordinal index or a not-Asplund verdict,
    plus the name of the rule that decided it."""

    kind: str  # "ordinal" | "not_asplund"
    index: Optional[Ordinal]
    rule: str
    compact: bool = False

    @staticmethod
    def of(index: Ordinal, rule: str, compact: bool = False) -> "SpaceIndex":
        return SpaceIndex("ordinal", index, rule, compact)

    @staticmethod
    def not_asplund(rule: str) -> "SpaceIndex":
        return SpaceIndex("not_asplund", None, rule, False)


def c_space_index(gamma: Ordinal) -> Ordinal:
    """Index of C([0, gamma]).

    Finite gamma gives 1.  Otherwise the index is w^(alpha+1) for the unique
    alpha with w^(w^alpha) <= gamma < w^(w^(alpha+1)); in CNF terms alpha is
    the leading exponent of the leading exponent of gamma.
    """
    if gamma.is_finite():
        return ONE
    e = gamma.leading_exponent()
    alpha = e.leading_exponent()
    return omega_pow(add(alpha, ONE))


def _punibound_candidate(r: SpaceIndex) -> Ordinal:
    """Contribution of one noncompact summand to the p in {0} u (1, oo) rule.

    A summand with attained (successor) index S has some eps-derivation of
    length exactly S, so the sum needs the least w-power strictly above S; a
    limit index is never attained at fixed eps, so the least w-power >= S
    suffices.
    """
    assert r.index is not None
    if r.index.is_successor() or r.index.is_zero():
        return least_omega_power_above(r.index)
    return _lopa_weak(r.index)


def _family_candidate(fam: ParamFamily) -> Ordinal:
    sup = family_index_sup(fam)
    r = SpaceIndex.of(sup, "family")
    return _punibound_candidate(r)


def direct_sum_index(e: SpaceExpr) -> SpaceIndex:
    """Evaluate a space expression to its exact index with rule provenance.

    Rules: "identity" (atoms), "c_space", "collection(v)" (finite max),
    "nonascase" (p in {1, inf}: not-Asplund gate / plain sup), "compactbound"
    (all parts compact with c0 norms), "punibound" (p in {0} u (1, oo)).
    """
    if isinstance(e, Atom):
        return SpaceIndex.of(profile_total_sup(e.profile), "identity", e.compact)
    if isinstance(e, CSpace):
        return SpaceIndex.of(c_space_index(e.gamma), "c_space", e.gamma.is_finite())
    if isinstance(e, FiniteSum):
        parts = [direct_sum_index(p) for p in e.parts]
        if any(r.kind == "not_asplund" for r in parts):
            return SpaceIndex.not_asplund("collection(v)")
        idx = max(r.index for r in parts)
        return SpaceIndex.of(idx, "collection(v)", all(r.compact for r in parts))
    if not isinstance(e, DirectSum):
        raise MalformedExpr(f"not a space expression: {e!r}")

    c0 = norms_in_c0(e)
    compact = is_compact_expr(e)
    fam = e.summands if isinstance(e.summands, ParamFamily) else None

    if e.p in ("1", "inf"):
        if not c0:
            return SpaceIndex.not_asplund("nonascase")
        if compact:
            return SpaceIndex.of(ONE, "compactbound", True)
        if fam is not None:
            return SpaceIndex.of(family_index_sup(fam), "nonascase")
        parts = [direct_sum_index(s) for s in e.summands]
        if any(r.kind == "not_asplund" for r in parts):
            return SpaceIndex.not_asplund("nonascase")
        return SpaceIndex.of(max(r.index for r in parts), "nonascase")

    # p = "0" or rational in (1, oo)
    if compact:
        return SpaceIndex.of(ONE, "compactbound", True)
    candidates = [omega_pow(ONE)]  # a noncompact sum always reaches w
    if fam is not None:
        if not fam.compact_members():
            candidates.append(_family_candidate(fam))
    else:
        for s in e.summands:
            r = direct_sum_index(s)
            if r.kind == "not_asplund":
                return SpaceIndex.not_asplund("nonascase")
            if not r.compact:
                candidates.append(_punibound_candidate(r))
    return SpaceIndex.of(max(candidates), "punibound")


def admissible_index_value(x: Ordinal) -> str:
    """Classify an ordinal as a possible index of a (nonzero) operator.

    Indices are exactly the powers of w ("attained"); everything else is
    "not_power_of_omega".
    """
    return "attained" if is_power_of_omega(x) else "not_power_of_omega"


# ---------------------------------------------------------------------------
# quantitative bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Parameter bag for the quantitative bounds (CLI convenience)."""

    d: Fraction = Fraction(1)
    eps_q: Fraction = Fraction(1)
    delta_q: Fraction = Fraction(0)
    q: Fraction = Fraction(1)
    m: int = 2
    M: int = 2
    eta: Ordinal = ONE
    k_abs: Fraction = Fraction(1)


def sigma(a: Fraction, b: Fraction, c: Fraction, d: Fraction) -> int:
    """Least n >= 1 with n >= (2a/(b-c))**d - (b/(b-c))**d + 1.

    Exact for integer d; for fractional d the value is rounded outward (up),
    which keeps every bound built on top of it valid.  Whenever 2a <= b the
    answer is 1.
    """
    a, b, c, d = Fraction(a), Fraction(b), Fraction(c), Fraction(d)
    if a < 0 or not b > c > 0 or d < 1:
        raise InvalidParams("sigma needs a >= 0, b > c > 0, d >= 1")
    if 2 * a <= b:  # then (2a/(b-c))**d <= (b/(b-c))**d and the body is <= 1
        return 1
    _, hi_a = pow_bounds(2 * a / (b - c), d)
    lo_b, _ = pow_bounds(b / (b - c), d)
    return max(1, ceil_frac(hi_a - lo_b + 1))


def sigma_qpow(a_q: Fraction, b: Fraction, c: Fraction, q: Fraction) -> int:
    """sigma(a, b, c, q) where a is supplied as its q-th power a_q = a**q.

    Radii of representable sets are only known as q-th powers; with d = q the
    first term is (2a/(b-c))**q = 2**q * a_q / (b-c)**q, rational for integer
    q, so no root of a_q is ever needed.
    """
    a_q, b, c, q = Fraction(a_q), Fraction(b), Fraction(c), Fraction(q)
    if a_q < 0 or not b > c > 0 or q < 1:
        raise InvalidParams("sigma_qpow needs a_q >= 0, b > c > 0, q >= 1")
    _, hi_2q = pow_bounds(Fraction(2), q)
    lo_bq, _ = pow_bounds(b, q)
    if hi_2q * a_q <= lo_bq:  # certainly 2a <= b, where the body is <= 1
        return 1
    lo_gap, _ = pow_bounds(b - c, q)
    lo_b, _ = pow_bounds(b / (b - c), q)
    return max(1, ceil_frac(hi_2q * a_q / lo_gap - lo_b + 1))


def frount_M(d: Fraction, eps_q: Fraction, q: Fraction, m: int) -> int:
    """Least M >= m with (2**q - 1) * eps_q * M >= 8**q * d**q * (m - 1).

    ``d`` is a plain diameter bound and ``eps_q`` is eps**q.  Exact for
    integer q; outward-rounded (up) otherwise.  Requires m >= 2.
    """
    d = Fraction(d)
    if d <= 0:
        raise InvalidParams("frount_M needs d > 0")
    _, hi_dq = pow_bounds(d, Fraction(q))
    return frount_M_qpow(hi_dq, eps_q, q, m)


def frount_M_qpow(d_q: Fraction, eps_q: Fraction, q: Fraction, m: int) -> int:
    """frount_M with the diameter supplied as its q-th power d_q = d**q >= 0."""
    d_q, eps_q, q = Fraction(d_q), Fraction(eps_q), Fraction(q)
    if not isinstance(m, int) or m < 2:
        raise InvalidParams("frount_M needs an integer m >= 2")
    if d_q < 0 or eps_q <= 0 or q < 1:
        raise InvalidParams("frount_M needs d_q >= 0, eps_q > 0, q >= 1")
    if d_q == 0:
        return m
    _, hi_8q = pow_bounds(Fraction(8), q)
    lo_2q, _ = pow_bounds(Fraction(2), q)
    need = hi_8q * d_q * (m - 1) / ((lo_2q - 1) * eps_q)
    return max(m, ceil_frac(need))


def postdoc2_bound(
    eta: Ordinal, k_abs: Fraction, eps: Fraction, delta: Fraction, q: Fraction
) -> Ordinal:
    """eta * sigma(|K|, eps, delta, q): an index bound from finite-subset data."""
    if eta < ONE:
        raise InvalidParams("postdoc2_bound needs eta >= 1")
    return mul(eta, Ordinal.from_int(sigma(k_abs, eps, delta, q)))


# ---------------------------------------------------------------------------
# transfinite test-space construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructResult:
    expr: SpaceExpr
    lower_bound: Ordinal  # the built space has 1-Szlenk index above this
    truncated: bool
    nodes: int


def ell2_upper_atom() -> Atom:
    """A preset ell_2 atom with an upper-bound profile.

    The model climbs the ladder n+1 as eps halves, with total index w
    (the true index of ell_2).  The per-eps values are a declared model,
    not a computed truth; anything built on them is an upper-bound story.
    """
    return Atom(
        "ell2_upper",
        Fraction(1),
        EpsProfile((), LadderTail(ONE, ONE, Fraction(1), Fraction(1, 2))),
    )


def szlenk_space_construct(
    beta: Ordinal,
    atom: Atom,
    node_cap: int = 400,
    limit_width: int = 5,
) -> ConstructResult:
    """Build the transfinite test family E_beta as a space expression.

    E_0 is the zero space, E_{b+1} = E_b (+)_1 `atom`, and at limits E_b is
    the 2-sum over a fundamental sequence of b.  The atom (its profile in
    particular) is caller-supplied; see ell2_upper_atom for a preset.  Limit
    stages can only be expanded to finite width, so any limit in beta marks
    the result truncated.  Construction stops with DepthCapExceeded beyond
    `node_cap` distinct stage expressions.  The returned lower_bound records
    the design constraint index(E_beta) > beta.
    """
    from .ordinal import fundamental_sequence

    zero = Atom("zero", Fraction(0), EpsProfile((), ConstTail(ONE)), compact=True)
    cache: dict[Ordinal, SpaceExpr] = {}
    truncated = False

    def build(b: Ordinal) -> SpaceExpr:
        nonlocal truncated
        if b in cache:
            return cache[b]
        if b.is_zero():
            out: SpaceExpr = zero
        elif b.is_successor():
            from .ordinal import predecessor

            out = DirectSum("1", (build(predecessor(b)), atom))
        else:
            truncated = True
            members = tuple(build(fundamental_sequence(b, k)) for k in range(limit_width))
            out = DirectSum(Fraction(2), members)
        if len(cache) >= node_cap:
            raise DepthCapExceeded(f"more than {node_cap} construction stages")
        cache[b] = out
        return out

    expr = build(beta)
    return ConstructResult(expr, beta, truncated, len(cache))
