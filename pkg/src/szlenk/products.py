"""Exact product-set machinery: grids, staircase derivations, covers.

Derivation of a product multiplies clusters componentwise, so the local
diameter^q of a product point is the sum of the factor local diameters^q.
The one-step derived set of a full product is therefore the super-level
region {x : sum_i lam_i(x_i) > eps_q}, which decomposes exactly into a
finite union of products of per-factor super-level sets indexed by the
minimal value tuples of the (finitely-valued) factor functions lam_i.

Iterating keeps the union-of-products representation optimistically: each
term is a full product, so its derived set splits by the same staircase;
the union of the per-term results is certified against the exact point-set
derivation of the whole union, and `ChainNestingViolated` is raised the
moment the representation can no longer be certified exact (points of one
term can in principle lend reach to points of another when the terms
interleave).  Callers then fall back to `bound_product_derivation`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .calculus import InvalidParams, frount_M_qpow
from .exactmath import pow_bounds
from .fansets import FanSet, ProdQ, OutsideExactFragment, derive, diam_q, scaled
from .pointmodel import (
    Point,
    PPoint,
    ProductModel,
    derive_product_set,
    dist_q,
)


class ChainNestingViolated(ValueError):
    """The union-of-products representation is no longer certified exact."""


# ---------------------------------------------------------------------------
# the A-grid of threshold tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AEpsGrid:
    """Parameters of the threshold grid for an n-factor scaled product.

    `a_q` and `diam_q` carry the q-th powers of the scale factors and the
    factor diameters; `eps` and `delta` are the plain thresholds (their
    difference sets the grid step, which only exists un-powered).
    """

    a_q: tuple[Fraction, ...]
    diam_q: tuple[Fraction, ...]
    eps: Fraction
    delta: Fraction
    q: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_q", tuple(Fraction(a) for a in self.a_q))
        object.__setattr__(self, "diam_q", tuple(Fraction(d) for d in self.diam_q))
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "q", Fraction(self.q))
        if not self.a_q or len(self.a_q) != len(self.diam_q):
            raise InvalidParams("need matching nonempty a_q and diam_q tuples")
        if any(a <= 0 for a in self.a_q):
            raise InvalidParams("scale factors must be positive")
        if any(d < 0 for d in self.diam_q):
            raise InvalidParams("diameters must be >= 0")
        if not 0 < self.delta < self.eps:
            raise InvalidParams("need 0 < delta < eps")
        if self.q < 1:
            raise InvalidParams("q must be >= 1")

    @property
    def n(self) -> int:
        return len(self.a_q)

    @property
    def step(self) -> Fraction:
        return (self.eps - self.delta) / 4


def a_eps_grid(g: AEpsGrid, max_size: int = 200_000) -> list[tuple[Fraction, ...]]:
    """All tuples (eps_bar_i) of multiples of (eps-delta)/4 with
    eps_bar_i <= diam_i and sum_i a_q_i * eps_bar_i^q >= (delta/2)^q.

    Comparisons round outward for fractional q (borderline tuples are
    included), which only enlarges the grid and keeps downstream
    containment checks sound.
    """
    s = g.step
    per_factor: list[list[tuple[Fraction, Fraction]]] = []
    for d_q in g.diam_q:
        vals: list[tuple[Fraction, Fraction]] = []
        j = 0
        while True:
            lo, hi = pow_bounds(j * s, g.q)
            if lo > d_q:
                break
            vals.append((j * s, hi))
            j += 1
        per_factor.append(vals)
    total = 1
    for vals in per_factor:
        total *= len(vals)
        if total > max_size:
            raise InvalidParams("grid enumeration too large")
    cut_lo, _ = pow_bounds(g.delta / 2, g.q)
    out: list[tuple[Fraction, ...]] = []
    for combo in itertools.product(*per_factor):
        acc = sum(
            (a * hi for a, (_, hi) in zip(g.a_q, combo)), Fraction(0)
        )
        if acc >= cut_lo:
            out.append(tuple(v for v, _ in combo))
    return out


# ---------------------------------------------------------------------------
# staircase derivation of products
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProductUnion:
    """A union of products of per-factor point subsets, plus the model."""

    model: ProductModel
    terms: tuple[tuple[frozenset, ...], ...]

    def points(self) -> frozenset[PPoint]:
        out: set[PPoint] = set()
        for term in self.terms:
            out.update(itertools.product(*term))
        return frozenset(out)

    def is_empty(self) -> bool:
        return not self.terms


def _lam_in(G: frozenset, cmap) -> dict[Point, Fraction]:
    """Local diameter^q of each point of G inside G (2 * max reach)."""
    out: dict[Point, Fraction] = {}
    for x in G:
        best = Fraction(0)
        for y in cmap[x]:
            if y in G:
                d = dist_q(x, y)
                if d > best:
                    best = d
        out[x] = 2 * best
    return out


def _prune(terms: list[tuple[frozenset, ...]]) -> tuple[tuple[frozenset, ...], ...]:
    """Dedupe terms and drop those componentwise contained in another."""
    uniq = list(dict.fromkeys(terms))
    kept: list[tuple[frozenset, ...]] = []
    for t in uniq:
        if any(o != t and all(a <= b for a, b in zip(t, o)) for o in uniq):
            continue
        kept.append(t)
    return tuple(kept)


def _staircase(
    model: ProductModel, Gs: Sequence[frozenset], eps_q: Fraction
) -> list[tuple[frozenset, ...]]:
    """Exact one-step derivation of the full product of the Gs."""
    lams = [_lam_in(G, model.cmaps[i]) for i, G in enumerate(Gs)]
    values = [sorted(set(lam.values())) for lam in lams]
    if any(not v for v in values):
        return []
    combos = [
        v for v in itertools.product(*values) if sum(v) > eps_q
    ]
    minimal = [
        v
        for v in combos
        if not any(
            u != v and all(a <= b for a, b in zip(u, v)) for u in combos
        )
    ]
    terms: list[tuple[frozenset, ...]] = []
    for v in minimal:
        term = tuple(
            frozenset(x for x in Gs[i] if lams[i][x] >= v[i])
            for i in range(len(Gs))
        )
        if all(term):
            terms.append(term)
    return terms


def _as_factor(a_q: Fraction, K: FanSet) -> FanSet:
    if isinstance(K, ProdQ):
        raise OutsideExactFragment("factors must come from the exact fragment")
    a_q = Fraction(a_q)
    if a_q <= 0:
        raise InvalidParams("scale factors must be positive")
    out = scaled(a_q, K)
    assert out is not None
    return out


def derive_product_step(
    factors: Sequence[tuple[Fraction, FanSet]], eps_q: Fraction
) -> ProductUnion:
    """Exact s_eps of prod_i a_i K_i as a union of products of super-level
    subsets of the factors (one product per minimal threshold tuple)."""
    eps_q = Fraction(eps_q)
    if not factors:
        raise InvalidParams("need at least one factor")
    if eps_q <= 0:
        raise InvalidParams("eps_q must be positive")
    bodies = [_as_factor(a_q, K) for a_q, K in factors]
    model = ProductModel.of(bodies)
    full = [frozenset(pts) for pts in model.factor_points]
    terms = _prune(_staircase(model, full, eps_q))
    pu = ProductUnion(model, terms)
    assert pu.points() == derive_product_set(model.tuples(), model, eps_q)
    return pu


def product_union_derive(pu: ProductUnion, eps_q: Fraction) -> ProductUnion:
    """One more derivation step, keeping the union-of-products form.

    Each term derives by its own staircase; the union of the results is
    checked against the exact point-set derivation of the whole union and
    `ChainNestingViolated` is raised if they disagree.
    """
    eps_q = Fraction(eps_q)
    if eps_q <= 0:
        raise InvalidParams("eps_q must be positive")
    truth = derive_product_set(pu.points(), pu.model, eps_q)
    new_terms: list[tuple[frozenset, ...]] = []
    for term in pu.terms:
        new_terms.extend(_staircase(pu.model, term, eps_q))
    out = ProductUnion(pu.model, _prune(new_terms))
    if out.points() != truth:
        raise ChainNestingViolated(
            "per-term staircases no longer cover the exact derived set; "
            "fall back to bound_product_derivation"
        )
    return out


def product_union_sz(pu: ProductUnion, eps_q: Fraction) -> int:
    """Least k >= 0 with the k-fold derivation of the union empty."""
    count = 0
    while not pu.is_empty():
        pu = product_union_derive(pu, eps_q)
        count += 1
    return count


def product_sz(
    factors: Sequence[tuple[Fraction, FanSet]], eps_q: Fraction
) -> int:
    """Least m with the m-fold derivation of prod_i a_i K_i empty, via the
    certified union-of-products iteration (products are never empty, so
    this is always >= 1)."""
    pu = derive_product_step(factors, eps_q)
    return 1 + product_union_sz(pu, eps_q)


# ---------------------------------------------------------------------------
# the finite emptiness bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductBound:
    verdict: str  # "empty" | "unknown"
    M: int


def _sz_int(K: FanSet, eps_q: Fraction) -> int:
    cur: Optional[FanSet] = K
    n = 0
    while cur is not None:
        cur = derive(cur, eps_q)
        n += 1
    return max(n, 1)


def bound_product_derivation(
    factors: Sequence[tuple[Fraction, FanSet]],
    eps_q: Fraction,
    q: Fraction,
    m: int,
) -> ProductBound:
    """Finite emptiness certificate for the derivation of prod_i a_i K_i.

    If the m-fold (eps/8)-derivation of every unscaled factor is empty, the
    whole scaled product empties within M = frount_M_qpow(max diam_q, eps_q,
    q, m) steps and the verdict is "empty"; otherwise "unknown".  Requires
    m >= 2 and sum_i a_q_i <= 1.
    """
    eps_q, q = Fraction(eps_q), Fraction(q)
    if not isinstance(m, int) or m < 2:
        raise InvalidParams("m must be an integer >= 2")
    if not factors:
        raise InvalidParams("need at least one factor")
    if eps_q <= 0:
        raise InvalidParams("eps_q must be positive")
    if q < 1:
        raise InvalidParams("q must be >= 1")
    total = Fraction(0)
    for a_q, K in factors:
        a_q = Fraction(a_q)
        if a_q <= 0:
            raise InvalidParams("scale factors must be positive")
        if isinstance(K, ProdQ):
            raise OutsideExactFragment("factors must come from the exact fragment")
        total += a_q
    if total > 1:
        raise InvalidParams("need sum of a_q factors <= 1")
    d_q = max(diam_q(K) for _, K in factors)
    M = frount_M_qpow(d_q, eps_q, q, m)
    _, hi8 = pow_bounds(Fraction(8), q)
    eps8_q = eps_q / hi8
    if all(_sz_int(K, eps8_q) <= m for _, K in factors):
        return ProductBound("empty", M)
    return ProductBound("unknown", M)


# ---------------------------------------------------------------------------
# ball covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BqCover:
    """The integer-tuple cover of the q-convex hull ball of the factors."""

    l: int
    q: Fraction
    n: int
    tuples: tuple[tuple[int, ...], ...]
    products: tuple[tuple[FanSet, ...], ...]


@dataclass(frozen=True)
class BqPoint:
    """A sample point a_1 x_1 + ... + a_n x_n with a_i in [0,1], x_i in K_i.

    `nonzero[i]` records whether x_i is a nonzero point (a zero x_i makes
    the i-th scale irrelevant)."""

    scales: tuple[Fraction, ...]
    nonzero: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "scales", tuple(Fraction(a) for a in self.scales)
        )
        object.__setattr__(self, "nonzero", tuple(bool(b) for b in self.nonzero))
        if len(self.scales) != len(self.nonzero):
            raise InvalidParams("scales and nonzero flags must align")
        if any(a < 0 or a > 1 for a in self.scales):
            raise InvalidParams("scales must lie in [0, 1]")


def bq_cover(factors: Sequence[FanSet], l: int, q: Fraction) -> BqCover:
    """Integer tuples k with sum_i k_i^q <= (l + n^(1/q))^q (outward-rounded)
    and the corresponding products of (k_i/l)-scaled factors."""
    q = Fraction(q)
    if not isinstance(l, int) or l < 1:
        raise InvalidParams("l must be an integer >= 1")
    if q < 1:
        raise InvalidParams("q must be >= 1")
    if not factors:
        raise InvalidParams("need at least one factor")
    for K in factors:
        if isinstance(K, ProdQ):
            raise OutsideExactFragment("factors must come from the exact fragment")
    n = len(factors)
    _, root_hi = pow_bounds(Fraction(n), 1 / q)
    _, bound_hi = pow_bounds(l + root_hi, q)
    k_max = 1
    while pow_bounds(Fraction(k_max + 1), q)[0] <= bound_hi:
        k_max += 1
    tuples: list[tuple[int, ...]] = []
    for k in itertools.product(range(1, k_max + 1), repeat=n):
        acc = sum((pow_bounds(Fraction(ki), q)[0] for ki in k), Fraction(0))
        if acc <= bound_hi:
            tuples.append(k)
    products = tuple(
        tuple(
            _as_factor(pow_bounds(Fraction(ki, l), q)[1], K)
            for ki, K in zip(k, factors)
        )
        for k in tuples
    )
    return BqCover(l, q, n, tuple(tuples), products)


def bq_member(point: BqPoint, cover: BqCover) -> bool:
    """Whether the sampled point lies in some product of the cover.

    A scaled factor (k_i/l) K_i absorbs a_i x_i whenever a_i <= k_i/l (the
    factor sets are star-shaped about 0: they contain every down-scaling of
    their points), and absorbs it trivially when x_i = 0."""
    if len(point.scales) != cover.n:
        raise InvalidParams("point arity does not match the cover")
    for k in cover.tuples:
        if all(
            (not nz) or a <= Fraction(ki, cover.l)
            for a, nz, ki in zip(point.scales, point.nonzero, k)
        ):
            return True
    return False
