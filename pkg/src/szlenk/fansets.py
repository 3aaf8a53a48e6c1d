"""Exact epsilon-derivations on fan sets.

A fan set describes a w*-compact set of finitely supported points in
countable ell_q coordinates.  The grammar:

* ``Sing`` - the singleton {0};
* ``Fan(w_q, prefix, tail)`` - {0} together with one shifted copy
  w*e_b(i) + prefix_i of every prefix member and countably many shifted
  copies w*e_c(k) + tail of the tail, every copy re-rooted on fresh axes;
* ``UnionApex(fans)`` - several fans glued at a common apex 0, copies on
  disjoint axis namespaces;
* ``Scale(a_q, body)`` - the body scaled by a (a_q = a**q > 0);
* ``ProdQ(factors)`` - a product across disjoint axis groups (top level
  only; products derive through the product machinery, not `derive`);
* ``DisjUnion(components)`` - components (offset_q, body), the body shifted
  by offset*e on a fresh axis; at most one component may have offset 0 so
  distinct components keep a positive mutual gap.

Every magnitude is carried as its q-th power (a rational), and distinct
points differ on axes where exactly one of them is supported, so every
distance^q is a rational sum and all comparisons are exact.

The central quantity is the cluster reach h(x): the farthest distance^q
from x to a point that lies in *every* w*-neighborhood of x (such points
arrive along the omega-repeated tails).  The local diameter of the set at
x is exactly 2*h(x): two far tail copies realize reach twice over disjoint
supports, and no pair can do better.  The epsilon-derivation therefore
keeps exactly the points with 2*h(x) > eps^q, and the survivor set is
again a fan set: an apex outlives its tail interior (reach from the apex
exceeds every reach inside the tail by the fan width), so derivation never
strands a tail without its apex, and dead tails turn the remaining prefix
copies into disjoint offset components.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .calculus import InvalidParams
from .ordinal import Ordinal


class MalformedFanSet(ValueError):
    """A fan-set value violates a structural invariant."""


class Unbounded(ValueError):
    """Radius computation met an unbounded set.

    Kept for API completeness: the grammar only admits bounded sets, so a
    well-formed value never raises this.
    """


class OutsideExactFragment(ValueError):
    """The operation is exact only on the non-product fragment."""


class UnknownPath(ValueError):
    """A point path does not address a point of the set."""


class GroupNotFound(ValueError):
    """An axis-group selector does not match the set's group structure."""


def _q(x) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise MalformedFanSet("q-power magnitudes must be >= 0")
    return x


def _no_prod(child: "FanSet", where: str) -> None:
    if isinstance(child, ProdQ):
        raise MalformedFanSet(f"ProdQ may only appear at the top level, not inside {where}")


@dataclass(frozen=True)
class Sing:
    """The singleton {0}."""


@dataclass(frozen=True)
class Fan:
    w_q: Fraction
    prefix: tuple["FanSet", ...] = ()
    tail: "FanSet" = Sing()

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_q", Fraction(self.w_q))
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if self.w_q <= 0:
            raise MalformedFanSet("fan width w_q must be positive")
        for c in self.prefix:
            _no_prod(c, "a fan prefix")
        _no_prod(self.tail, "a fan tail")


@dataclass(frozen=True)
class UnionApex:
    fans: tuple[Fan, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fans", tuple(self.fans))
        if not self.fans:
            raise MalformedFanSet("UnionApex needs at least one fan")
        for f in self.fans:
            if not isinstance(f, Fan):
                raise MalformedFanSet("UnionApex members must be Fan nodes")


@dataclass(frozen=True)
class Scale:
    a_q: Fraction
    body: "FanSet"

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_q", Fraction(self.a_q))
        if self.a_q <= 0:
            raise MalformedFanSet("scale factor a_q must be positive")
        _no_prod(self.body, "a scale")


@dataclass(frozen=True)
class ProdQ:
    factors: tuple["FanSet", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise MalformedFanSet("ProdQ needs at least one factor")
        for f in self.factors:
            _no_prod(f, "another ProdQ")


@dataclass(frozen=True)
class DisjUnion:
    components: tuple[tuple[Fraction, "FanSet"], ...]

    def __post_init__(self) -> None:
        comps = tuple((Fraction(o), b) for o, b in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise MalformedFanSet("DisjUnion needs at least one component")
        zero = 0
        for off, body in comps:
            if off < 0:
                raise MalformedFanSet("component offsets must be >= 0")
            if off == 0:
                zero += 1
            _no_prod(body, "a DisjUnion component")
        if zero > 1:
            raise MalformedFanSet(
                "at most one DisjUnion component may sit at offset 0 "
                "(positive offsets certify the mutual gap)"
            )


FanSet = Union[Sing, Fan, UnionApex, Scale, ProdQ, DisjUnion]


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------


def scaled(a_q: Fraction, body: Optional[FanSet]) -> Optional[FanSet]:
    """Scale with the obvious normalizations (Sing fixed, factors merged)."""
    a_q = Fraction(a_q)
    if body is None or isinstance(body, Sing):
        return body
    if a_q == 1:
        return body
    if isinstance(body, Scale):
        return Scale(a_q * body.a_q, body.body)
    return Scale(a_q, body)


def disj(components: Sequence[tuple[Fraction, Optional[FanSet]]]) -> Optional[FanSet]:
    """Build a disjoint union, dropping empty bodies and unwrapping trivia."""
    comps: list[tuple[Fraction, FanSet]] = []
    for off, body in components:
        off = Fraction(off)
        if body is None:
            continue
        if off == 0 and isinstance(body, DisjUnion):
            comps.extend(body.components)  # no shared shift axis: safe to merge
        else:
            comps.append((off, body))
    if not comps:
        return None
    if len(comps) == 1 and comps[0][0] == 0:
        return comps[0][1]
    return DisjUnion(tuple(comps))


def depth_fan(n: int, w_q: Fraction) -> FanSet:
    """A chain of fans of depth n: D_0 = Sing, D_k = Fan(w_q, [], D_{k-1})."""
    if n < 0:
        raise InvalidParams("depth must be >= 0")
    out: FanSet = Sing()
    for _ in range(n):
        out = Fan(w_q, (), out)
    return out


# ---------------------------------------------------------------------------
# radius / diameter / reach
# ---------------------------------------------------------------------------


def radius_q(F: FanSet) -> Fraction:
    """max ||x||^q over the set (exact)."""
    if isinstance(F, Sing):
        return Fraction(0)
    if isinstance(F, Fan):
        best = Fraction(0)
        for c in F.prefix + (F.tail,):
            best = max(best, radius_q(c))
        return F.w_q + best
    if isinstance(F, UnionApex):
        return max(radius_q(f) for f in F.fans)
    if isinstance(F, Scale):
        return F.a_q * radius_q(F.body)
    if isinstance(F, ProdQ):
        return sum((radius_q(f) for f in F.factors), Fraction(0))
    if isinstance(F, DisjUnion):
        return max(off + radius_q(b) for off, b in F.components)
    raise MalformedFanSet(f"not a fan set: {F!r}")


def diam_q(F: FanSet) -> Fraction:
    """max ||x - y||^q over pairs (exact).

    Points in different copies have disjoint supports beyond the common
    prefix, so their distance^q is the sum of the two one-sided norms; the
    best cross pair combines the two largest copy radii, with the
    omega-repeated tail available twice.
    """
    if isinstance(F, Sing):
        return Fraction(0)
    if isinstance(F, Fan):
        radii = sorted(
            (radius_q(c) for c in F.prefix + (F.tail, F.tail)), reverse=True
        )
        best = 2 * F.w_q + radii[0] + radii[1]
        for c in F.prefix + (F.tail,):
            best = max(best, diam_q(c))
        return best
    if isinstance(F, UnionApex):
        best = max(diam_q(f) for f in F.fans)
        if len(F.fans) > 1:
            radii = sorted((radius_q(f) for f in F.fans), reverse=True)
            best = max(best, radii[0] + radii[1])
        return best
    if isinstance(F, Scale):
        return F.a_q * diam_q(F.body)
    if isinstance(F, ProdQ):
        return sum((diam_q(f) for f in F.factors), Fraction(0))
    if isinstance(F, DisjUnion):
        best = max(diam_q(b) for _, b in F.components)
        if len(F.components) > 1:
            radii = sorted((off + radius_q(b) for off, b in F.components), reverse=True)
            best = max(best, radii[0] + radii[1])
        return best
    raise MalformedFanSet(f"not a fan set: {F!r}")


def contains_origin(F: FanSet) -> bool:
    if isinstance(F, Sing):
        return True
    if isinstance(F, (Fan, UnionApex)):
        return True  # the apex
    if isinstance(F, Scale):
        return contains_origin(F.body)
    if isinstance(F, ProdQ):
        return all(contains_origin(f) for f in F.factors)
    if isinstance(F, DisjUnion):
        return any(off == 0 and contains_origin(b) for off, b in F.components)
    raise MalformedFanSet(f"not a fan set: {F!r}")


def _root_reach(F: FanSet) -> Optional[Fraction]:
    """h at the root point (None if the set has no point at its root).

    h(x) is the farthest distance^q from x to a point present in every
    w*-neighborhood of x.  Only tail copies persist in every neighborhood
    (prefix copies and positively offset components can be excluded by
    bounding finitely many axes), so the apex of a fan reaches w_q +
    radius_q(tail), a union apex the max over its fans, and a leaf 0.
    """
    if isinstance(F, Sing):
        return Fraction(0)
    if isinstance(F, Fan):
        return F.w_q + radius_q(F.tail)
    if isinstance(F, UnionApex):
        return max(f.w_q + radius_q(f.tail) for f in F.fans)
    if isinstance(F, Scale):
        r = _root_reach(F.body)
        return None if r is None else F.a_q * r
    if isinstance(F, DisjUnion):
        for off, b in F.components:
            if off == 0:
                return _root_reach(b)
        return None
    raise MalformedFanSet(f"no single root point: {F!r}")


def local_diam_q(F: FanSet, path: tuple) -> Fraction:
    """Exact local diameter^q at the point addressed by `path`.

    Paths are tuples of steps ("prefix", i), ("tail",), ("fan", i),
    ("comp", i); the empty path addresses the root point.  For a top-level
    ProdQ the path is a tuple of per-factor paths and local diameters^q
    add across the disjoint factor groups.
    """
    if isinstance(F, ProdQ):
        if not isinstance(path, tuple) or len(path) != len(F.factors):
            raise UnknownPath("a product point needs one path per factor")
        return sum(
            (local_diam_q(f, p) for f, p in zip(F.factors, path)), Fraction(0)
        )
    return 2 * _reach_at(F, tuple(path))


def _reach_at(F: FanSet, path: tuple) -> Fraction:
    if isinstance(F, Scale):
        return F.a_q * _reach_at(F.body, path)
    if not path:
        r = _root_reach(F)
        if r is None:
            raise UnknownPath("this set has no point at its root")
        return r
    step, rest = path[0], path[1:]
    kind = step[0] if isinstance(step, tuple) and step else None
    if isinstance(F, Fan):
        if kind == "prefix" and len(step) == 2 and 0 <= step[1] < len(F.prefix):
            return _reach_at(F.prefix[step[1]], rest)
        if kind == "tail":
            return _reach_at(F.tail, rest)
        raise UnknownPath(f"step {step!r} does not match a fan")
    if isinstance(F, UnionApex):
        if kind == "fan" and len(step) == 2 and 0 <= step[1] < len(F.fans):
            if not rest:
                raise UnknownPath(
                    "the apex of a fan inside UnionApex is the shared apex: "
                    "address it with the empty path"
                )
            return _reach_at(F.fans[step[1]], rest)
        raise UnknownPath(f"step {step!r} does not match a union of fans")
    if isinstance(F, DisjUnion):
        if kind == "comp" and len(step) == 2 and 0 <= step[1] < len(F.components):
            return _reach_at(F.components[step[1]][1], rest)
        raise UnknownPath(f"step {step!r} does not match a disjoint union")
    raise UnknownPath(f"path continues below a leaf: {step!r}")


# ---------------------------------------------------------------------------
# filtration and derivation
# ---------------------------------------------------------------------------


def _filter_reach(F: FanSet, t_q: Fraction) -> Optional[FanSet]:
    """Keep exactly the points with h > t_q; None when nothing survives.

    The result is closed: h at the apex strictly exceeds h anywhere inside
    the tail copies (reach inside the tail is at most radius_q(tail), the
    apex adds the width), so an apex is never removed while tail interior
    survives.  When a tail dies under a surviving apex, the fan restructures
    into a disjoint union of the apex singleton and the shifted surviving
    prefix remnants.
    """
    if isinstance(F, Sing):
        return Sing() if 0 > t_q else None
    if isinstance(F, Fan):
        remnants = [(F.w_q, _filter_reach(c, t_q)) for c in F.prefix]
        tail = _filter_reach(F.tail, t_q)
        apex_alive = F.w_q + radius_q(F.tail) > t_q
        if not apex_alive:
            assert tail is None  # reach inside the tail is below the apex reach
            return disj(remnants)
        if tail is not None:
            kept = tuple(r for _, r in remnants if r is not None)
            return Fan(F.w_q, kept, tail)
        return disj([(Fraction(0), Sing())] + remnants)
    if isinstance(F, UnionApex):
        apex_alive = any(f.w_q + radius_q(f.tail) > t_q for f in F.fans)
        cores: list[Fan] = []
        leftovers: list[tuple[Fraction, Optional[FanSet]]] = []
        for f in F.fans:
            tail = _filter_reach(f.tail, t_q)
            remnants = [(f.w_q, _filter_reach(c, t_q)) for c in f.prefix]
            if tail is not None:
                kept = tuple(r for _, r in remnants if r is not None)
                cores.append(Fan(f.w_q, kept, tail))
            else:
                leftovers.extend(remnants)
        if not apex_alive:
            assert not cores
            return disj(leftovers)
        if cores:
            zero: FanSet = cores[0] if len(cores) == 1 else UnionApex(tuple(cores))
        else:
            zero = Sing()
        return disj([(Fraction(0), zero)] + leftovers)
    if isinstance(F, Scale):
        return scaled(F.a_q, _filter_reach(F.body, t_q / F.a_q))
    if isinstance(F, DisjUnion):
        return disj([(off, _filter_reach(b, t_q)) for off, b in F.components])
    if isinstance(F, ProdQ):
        raise OutsideExactFragment(
            "products derive through the product machinery, not pointwise filtration"
        )
    raise MalformedFanSet(f"not a fan set: {F!r}")


def filter_superlevel(F: FanSet, t_q: Fraction) -> Optional[FanSet]:
    """The sub-fan-set of points whose local diameter^q strictly exceeds t_q."""
    t_q = Fraction(t_q)
    if t_q < 0:
        raise InvalidParams("filtration thresholds are >= 0")
    return _filter_reach(F, t_q / 2)


def derive(F: FanSet, eps_q: Fraction) -> Optional[FanSet]:
    """The exact one-step eps-derivation s_eps(F); None when empty.

    A point survives iff its local diameter^q exceeds eps_q; the strict
    comparison matches the strict `diam > eps` in the derivation's
    definition, and local diameters are attained here (far tail pairs), so
    there is no boundary subtlety to round.
    """
    eps_q = Fraction(eps_q)
    if eps_q <= 0:
        raise InvalidParams("eps_q must be positive")
    return _filter_reach(F, eps_q / 2)


@dataclass(frozen=True)
class TraceStep:
    step: int
    snapshot: Optional[FanSet]
    apex_count: int
    diam_q: Fraction


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple[TraceStep, ...]


def count_apexes(F: Optional[FanSet]) -> int:
    """Number of cluster points (positive local diameter) — diagnostic."""
    if F is None or isinstance(F, Sing):
        return 0
    if isinstance(F, Fan):
        inner = sum(count_apexes(c) for c in F.prefix + (F.tail, F.tail))
        return 1 + inner
    if isinstance(F, UnionApex):
        return 1 + sum(count_apexes(f) - 1 for f in F.fans)
    if isinstance(F, Scale):
        return count_apexes(F.body)
    if isinstance(F, ProdQ):
        raise OutsideExactFragment(
            "products derive through the product machinery, not pointwise filtration"
        )
    if isinstance(F, DisjUnion):
        return sum(count_apexes(b) for _, b in F.components)
    raise MalformedFanSet(f"not a fan set: {F!r}")


def derive_steps(
    F: FanSet, eps_q: Fraction, m: int
) -> tuple[Optional[FanSet], DerivationTrace]:
    """m-fold derivation with a step-by-step trace."""
    if m < 0:
        raise InvalidParams("step count must be >= 0")
    cur: Optional[FanSet] = F
    steps = [TraceStep(0, cur, count_apexes(cur), diam_q(cur))]
    for k in range(1, m + 1):
        if cur is None:
            break
        cur = derive(cur, eps_q)
        steps.append(
            TraceStep(k, cur, count_apexes(cur), diam_q(cur) if cur is not None else Fraction(0))
        )
    return cur, DerivationTrace(tuple(steps))


def sz_eps(F: FanSet, eps_q: Fraction) -> Ordinal:
    """Least m with s_eps^m(F) empty, as an ordinal (always finite here).

    Each derivation step strictly shortens the longest root-to-leaf copy
    chain, so the iteration empties within depth+1 steps.
    """
    cur: Optional[FanSet] = F
    count = 0
    while cur is not None:
        cur = derive(cur, eps_q)
        count += 1
    return Ordinal.from_int(count)


# ---------------------------------------------------------------------------
# axis-group projection
# ---------------------------------------------------------------------------


def project(F: FanSet, groups: Sequence[int]) -> FanSet:
    """Project onto the named axis groups (exact on the fan class).

    For a product the groups are factor indices and projection keeps those
    factors.  For a disjoint union the groups are component indices: kept
    components survive unchanged and every dropped component collapses to
    the origin (its support is disjoint from the kept axes).
    """
    sel = sorted(set(groups))
    if isinstance(F, ProdQ):
        n = len(F.factors)
        if not sel or any(not 0 <= g < n for g in sel):
            raise GroupNotFound(f"factor indices must be within 0..{n - 1}")
        kept = [F.factors[g] for g in sel]
        return kept[0] if len(kept) == 1 else ProdQ(tuple(kept))
    if isinstance(F, DisjUnion):
        n = len(F.components)
        if not sel or any(not 0 <= g < n for g in sel):
            raise GroupNotFound(f"component indices must be within 0..{n - 1}")
        comps: list[tuple[Fraction, Optional[FanSet]]] = [F.components[g] for g in sel]
        if len(sel) < n:
            has_origin = any(off == 0 and contains_origin(b) for off, b in comps)
            if not has_origin:
                comps.append((Fraction(0), Sing()))
        out = disj(comps)
        assert out is not None
        return out
    raise GroupNotFound("only products and disjoint unions carry axis groups")
