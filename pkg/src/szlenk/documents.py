"""JSON document schemas for sets, spaces, traces, and reports.

Every document is a plain-JSON dict with schema version ``"v": 1``; all
rationals are carried as strings ("3/4", "2") so exactness survives
serialization, and set documents fix q once in the header ({"q": "2"}).
``dumps_canonical`` renders documents byte-deterministically (sorted keys,
fixed separators), which is what makes repeated runs diff-clean.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from . import ordinal
from .calculus import (
    Atom,
    ConstNorms,
    ConstTail,
    Copies,
    CSpace,
    DirectSum,
    EpsProfile,
    FiniteSum,
    GeometricNorms,
    LadderMembers,
    LadderTail,
    ParamFamily,
    ProfileTail,
    SpaceExpr,
    SpaceIndex,
)
from .fansets import (
    DerivationTrace,
    DisjUnion,
    Fan,
    FanSet,
    ProdQ,
    Scale,
    Sing,
    UnionApex,
)
from .ordinal import Ordinal, frac_from_str, frac_to_str

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """A document violates the schema."""


def _expect_dict(doc: object, what: str) -> dict:
    if not isinstance(doc, dict):
        raise DocumentError(f"{what} must be an object, got {type(doc).__name__}")
    return doc


def _expect_version(doc: dict) -> None:
    if doc.get("v") != SCHEMA_VERSION:
        raise DocumentError(f"unsupported document version {doc.get('v')!r}")


def _one_key(doc: dict, what: str) -> str:
    if len(doc) != 1:
        raise DocumentError(f"{what} must have exactly one variant key, got {sorted(doc)}")
    return next(iter(doc))


def _frac(doc: object, what: str) -> Fraction:
    try:
        return frac_from_str(doc)
    except ValueError as exc:
        raise DocumentError(f"{what}: {exc}") from None


def _ord(doc: object, what: str) -> Ordinal:
    try:
        return ordinal.from_json(doc)
    except ValueError as exc:
        raise DocumentError(f"{what}: {exc}") from None


# ---------------------------------------------------------------------------
# fan sets
# ---------------------------------------------------------------------------


def _fan_node_to_doc(F: FanSet) -> dict:
    if isinstance(F, Sing):
        return {"sing": {}}
    if isinstance(F, Fan):
        return {
            "fan": {
                "w_q": frac_to_str(F.w_q),
                "prefix": [_fan_node_to_doc(c) for c in F.prefix],
                "tail": _fan_node_to_doc(F.tail),
            }
        }
    if isinstance(F, UnionApex):
        return {"apex": {"fans": [_fan_node_to_doc(f) for f in F.fans]}}
    if isinstance(F, Scale):
        return {
            "scale": {"a_q": frac_to_str(F.a_q), "body": _fan_node_to_doc(F.body)}
        }
    if isinstance(F, ProdQ):
        return {"prod": {"factors": [_fan_node_to_doc(f) for f in F.factors]}}
    if isinstance(F, DisjUnion):
        return {
            "disj": {
                "components": [
                    [frac_to_str(off), _fan_node_to_doc(b)]
                    for off, b in F.components
                ]
            }
        }
    raise DocumentError(f"not a fan set: {F!r}")


def _fan_node_from_doc(doc: object) -> FanSet:
    node = _expect_dict(doc, "set node")
    kind = _one_key(node, "set node")
    body = _expect_dict(node[kind], f"{kind} body")
    if kind == "sing":
        return Sing()
    if kind == "fan":
        return Fan(
            _frac(body.get("w_q"), "fan w_q"),
            tuple(_fan_node_from_doc(c) for c in body.get("prefix", [])),
            _fan_node_from_doc(body.get("tail")),
        )
    if kind == "apex":
        fans = []
        for f in body.get("fans", []):
            sub = _fan_node_from_doc(f)
            if not isinstance(sub, Fan):
                raise DocumentError("apex members must be fan nodes")
            fans.append(sub)
        return UnionApex(tuple(fans))
    if kind == "scale":
        return Scale(_frac(body.get("a_q"), "scale a_q"), _fan_node_from_doc(body.get("body")))
    if kind == "prod":
        return ProdQ(tuple(_fan_node_from_doc(f) for f in body.get("factors", [])))
    if kind == "disj":
        comps = []
        for item in body.get("components", []):
            if not isinstance(item, list) or len(item) != 2:
                raise DocumentError("disj components must be [offset, node] pairs")
            comps.append((_frac(item[0], "disj offset"), _fan_node_from_doc(item[1])))
        return DisjUnion(tuple(comps))
    raise DocumentError(f"unknown set node kind {kind!r}")


def fan_node_to_doc(F: FanSet) -> dict:
    """Serialize a bare set node (no version/q header)."""
    return _fan_node_to_doc(F)


def fanset_to_doc(F: FanSet, q: Fraction) -> dict:
    return {"v": SCHEMA_VERSION, "q": frac_to_str(Fraction(q)), "set": _fan_node_to_doc(F)}


def fanset_from_doc(doc: object) -> tuple[FanSet, Fraction]:
    top = _expect_dict(doc, "set document")
    _expect_version(top)
    if "q" not in top or "set" not in top:
        raise DocumentError("set documents need 'q' and 'set' fields")
    q = _frac(top["q"], "document q")
    if q < 1:
        raise DocumentError("document q must be >= 1")
    return _fan_node_from_doc(top["set"]), q


# ---------------------------------------------------------------------------
# profiles and spaces
# ---------------------------------------------------------------------------


def _tail_to_doc(tail: ProfileTail) -> dict:
    if isinstance(tail, ConstTail):
        return {"const": ordinal.to_json(tail.value)}
    return {
        "ladder": {
            "slope": ordinal.to_json(tail.slope),
            "offset": ordinal.to_json(tail.offset),
            "base_q": frac_to_str(tail.base_q),
            "ratio_q": frac_to_str(tail.ratio_q),
        }
    }


def _tail_from_doc(doc: object) -> ProfileTail:
    node = _expect_dict(doc, "profile tail")
    kind = _one_key(node, "profile tail")
    if kind == "const":
        return ConstTail(_ord(node["const"], "const tail"))
    if kind == "ladder":
        body = _expect_dict(node["ladder"], "ladder tail")
        return LadderTail(
            _ord(body.get("slope"), "ladder slope"),
            _ord(body.get("offset"), "ladder offset"),
            _frac(body.get("base_q"), "ladder base_q"),
            _frac(body.get("ratio_q"), "ladder ratio_q"),
        )
    raise DocumentError(f"unknown profile tail kind {kind!r}")


def profile_to_doc(p: EpsProfile) -> dict:
    return {
        "steps": [[frac_to_str(t), ordinal.to_json(v)] for t, v in p.steps],
        "tail": _tail_to_doc(p.tail),
    }


def profile_from_doc(doc: object) -> EpsProfile:
    body = _expect_dict(doc, "profile")
    steps = []
    for item in body.get("steps", []):
        if not isinstance(item, list) or len(item) != 2:
            raise DocumentError("profile steps must be [threshold, ordinal] pairs")
        steps.append((_frac(item[0], "step threshold"), _ord(item[1], "step value")))
    return EpsProfile(tuple(steps), _tail_from_doc(body.get("tail", {"const": ordinal.to_json(Ordinal.from_int(1))})))


def _norms_to_doc(n) -> dict:
    if isinstance(n, ConstNorms):
        return {"const": frac_to_str(n.value)}
    return {"geometric": {"base": frac_to_str(n.base), "ratio": frac_to_str(n.ratio)}}


def _norms_from_doc(doc: object):
    node = _expect_dict(doc, "norm sequence")
    kind = _one_key(node, "norm sequence")
    if kind == "const":
        return ConstNorms(_frac(node["const"], "const norm"))
    if kind == "geometric":
        body = _expect_dict(node["geometric"], "geometric norms")
        return GeometricNorms(
            _frac(body.get("base"), "norm base"), _frac(body.get("ratio"), "norm ratio")
        )
    raise DocumentError(f"unknown norm sequence kind {kind!r}")


def _members_to_doc(m) -> dict:
    if isinstance(m, Copies):
        return {"copies": {"profile": profile_to_doc(m.profile), "compact": m.compact}}
    return {
        "ladder": {
            "slope": ordinal.to_json(m.slope),
            "offset": ordinal.to_json(m.offset),
            "low": ordinal.to_json(m.low),
            "base_q": frac_to_str(m.base_q),
            "ratio_q": frac_to_str(m.ratio_q),
        }
    }


def _members_from_doc(doc: object):
    node = _expect_dict(doc, "family members")
    kind = _one_key(node, "family members")
    body = _expect_dict(node[kind], f"{kind} members")
    if kind == "copies":
        return Copies(
            profile_from_doc(body.get("profile")), bool(body.get("compact", False))
        )
    if kind == "ladder":
        return LadderMembers(
            _ord(body.get("slope"), "members slope"),
            _ord(body.get("offset"), "members offset"),
            _ord(body.get("low"), "members low"),
            _frac(body.get("base_q"), "members base_q"),
            _frac(body.get("ratio_q"), "members ratio_q"),
        )
    raise DocumentError(f"unknown family members kind {kind!r}")


def _family_to_doc(fam: ParamFamily) -> dict:
    return {"norms": _norms_to_doc(fam.norms), "members": _members_to_doc(fam.members)}


def _family_from_doc(doc: object) -> ParamFamily:
    body = _expect_dict(doc, "family")
    return ParamFamily(_norms_from_doc(body.get("norms")), _members_from_doc(body.get("members")))


def _space_node_to_doc(e: SpaceExpr) -> dict:
    if isinstance(e, Atom):
        return {
            "atom": {
                "name": e.name,
                "norm": frac_to_str(e.norm_bound),
                "profile": profile_to_doc(e.profile),
                "compact": e.compact,
            }
        }
    if isinstance(e, CSpace):
        return {"cspace": {"gamma": ordinal.to_json(e.gamma)}}
    if isinstance(e, FiniteSum):
        return {"finite_sum": {"parts": [_space_node_to_doc(s) for s in e.parts]}}
    if isinstance(e, DirectSum):
        p = e.p if isinstance(e.p, str) else frac_to_str(e.p)
        body: dict = {"p": p}
        if isinstance(e.summands, ParamFamily):
            body["family"] = _family_to_doc(e.summands)
        else:
            body["summands"] = [_space_node_to_doc(s) for s in e.summands]
        return {"sum": body}
    raise DocumentError(f"not a space expression: {e!r}")


def _space_node_from_doc(doc: object) -> SpaceExpr:
    node = _expect_dict(doc, "space node")
    kind = _one_key(node, "space node")
    body = _expect_dict(node[kind], f"{kind} body")
    if kind == "atom":
        if "name" not in body or "profile" not in body:
            raise DocumentError("atoms need 'name' and 'profile'")
        return Atom(
            str(body["name"]),
            _frac(body.get("norm", "1"), "atom norm"),
            profile_from_doc(body["profile"]),
            bool(body.get("compact", False)),
        )
    if kind == "cspace":
        return CSpace(_ord(body.get("gamma"), "cspace gamma"))
    if kind == "finite_sum":
        return FiniteSum(tuple(_space_node_from_doc(s) for s in body.get("parts", [])))
    if kind == "sum":
        if "p" not in body:
            raise DocumentError("direct sums need 'p'")
        if ("family" in body) == ("summands" in body):
            raise DocumentError("direct sums need exactly one of 'family' or 'summands'")
        if "family" in body:
            return DirectSum(body["p"], _family_from_doc(body["family"]))
        return DirectSum(
            body["p"], tuple(_space_node_from_doc(s) for s in body["summands"])
        )
    raise DocumentError(f"unknown space node kind {kind!r}")


def space_to_doc(e: SpaceExpr) -> dict:
    return {"v": SCHEMA_VERSION, "space": _space_node_to_doc(e)}


def space_from_doc(doc: object) -> SpaceExpr:
    top = _expect_dict(doc, "space document")
    _expect_version(top)
    if "space" not in top:
        raise DocumentError("space documents need a 'space' field")
    return _space_node_from_doc(top["space"])


def space_index_to_doc(r: SpaceIndex) -> dict:
    out: dict = {"kind": r.kind, "rule": r.rule, "compact": r.compact}
    if r.index is not None:
        out["index"] = ordinal.to_json(r.index)
        out["index_text"] = ordinal.to_text(r.index)
    return out


# ---------------------------------------------------------------------------
# traces and reports
# ---------------------------------------------------------------------------


def trace_to_doc(trace: DerivationTrace, q: Fraction, sz_eps: Optional[int]) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "q": frac_to_str(Fraction(q)),
        "steps": [
            {
                "step": s.step,
                "set": None if s.snapshot is None else _fan_node_to_doc(s.snapshot),
                "apexes": s.apex_count,
                "diam_q": frac_to_str(s.diam_q),
            }
            for s in trace.steps
        ],
        "sz_eps": sz_eps,
    }


def dumps_canonical(doc: object) -> str:
    """Byte-deterministic rendering: sorted keys, fixed separators, LF end."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
