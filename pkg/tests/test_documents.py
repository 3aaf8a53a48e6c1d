"""Round-trip and schema tests for the JSON document layer."""
from fractions import Fraction

import pytest
from hypothesis import given, settings

from szlenk import ordinal
from szlenk.calculus import (
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
)
from szlenk.documents import (
    DocumentError,
    dumps_canonical,
    fanset_from_doc,
    fanset_to_doc,
    loads,
    profile_from_doc,
    profile_to_doc,
    space_from_doc,
    space_to_doc,
    trace_to_doc,
)
from szlenk.fansets import Fan, ProdQ, Sing, derive_steps
from szlenk.ordinal import Ordinal

from strategies import fan_sets, fracs

F = Fraction
F1 = Fan(F(1, 2), (), Sing())
W = Ordinal.omega()


def n(k: int) -> Ordinal:
    return Ordinal.from_int(k)


SPACES = [
    Atom("T", F(1), EpsProfile(), compact=True),
    Atom(
        "ladder",
        F(2),
        EpsProfile(
            ((F(1), n(1)), (F(1, 2), n(2))),
            LadderTail(W, n(3), F(1, 4), F(1, 2)),
        ),
    ),
    CSpace(ordinal.omega_pow(W)),
    FiniteSum((Atom("a", F(1), EpsProfile()), CSpace(W))),
    DirectSum("0", (Atom("a", F(1), EpsProfile()), Atom("b", F(1), EpsProfile()))),
    DirectSum(
        F(3, 2),
        ParamFamily(
            GeometricNorms(F(1), F(1, 2)),
            LadderMembers(W, n(1), n(1), F(1), F(1, 2)),
        ),
    ),
    DirectSum(
        "inf",
        ParamFamily(ConstNorms(F(1)), Copies(EpsProfile(), compact=False)),
    ),
]


class TestFanSetDocs:
    def test_frozen_example(self):
        doc = fanset_to_doc(F1, F(2))
        assert doc == {
            "v": 1,
            "q": "2",
            "set": {"fan": {"w_q": "1/2", "prefix": [], "tail": {"sing": {}}}},
        }
        assert fanset_from_doc(doc) == (F1, F(2))

    def test_product_and_disj(self):
        from szlenk.fansets import DisjUnion, Scale, UnionApex

        K = ProdQ((F1, Scale(F(1, 4), DisjUnion(((F(0), Sing()), (F(1), F1))))))
        K2 = UnionApex((F1, Fan(F(1, 3), (Sing(),), F1)))
        for s in (K, K2):
            doc = fanset_to_doc(s, F(1))
            back, q = fanset_from_doc(doc)
            assert back == s and q == 1
            assert fanset_to_doc(back, q) == doc

    @settings(max_examples=60, deadline=None)
    @given(fan_sets(), fracs(max_den=4, max_num=3))
    def test_roundtrip(self, s, q):
        if q < 1:
            q = 1 / q
        doc = fanset_to_doc(s, q)
        back, q2 = fanset_from_doc(doc)
        assert back == s and q2 == q
        assert fanset_to_doc(back, q2) == doc
        assert loads(dumps_canonical(doc)) == doc

    def test_errors(self):
        with pytest.raises(DocumentError):
            fanset_from_doc({"v": 2, "q": "1", "set": {"sing": {}}})
        with pytest.raises(DocumentError):
            fanset_from_doc({"v": 1, "set": {"sing": {}}})
        with pytest.raises(DocumentError):
            fanset_from_doc({"v": 1, "q": "1/2", "set": {"sing": {}}})
        with pytest.raises(DocumentError):
            fanset_from_doc({"v": 1, "q": "1", "set": {"blob": {}}})
        with pytest.raises(DocumentError):
            fanset_from_doc({"v": 1, "q": "1", "set": {"sing": {}, "fan": {}}})
        with pytest.raises(DocumentError):
            fanset_from_doc(
                {"v": 1, "q": "1", "set": {"fan": {"w_q": "x", "tail": {"sing": {}}}}}
            )
        with pytest.raises(DocumentError):
            fanset_from_doc(
                {"v": 1, "q": "1", "set": {"apex": {"fans": [{"sing": {}}]}}}
            )
        with pytest.raises(DocumentError):
            fanset_from_doc(
                {"v": 1, "q": "1", "set": {"disj": {"components": [["1"]]}}}
            )


class TestSpaceDocs:
    @pytest.mark.parametrize("e", SPACES, ids=lambda e: type(e).__name__)
    def test_roundtrip(self, e):
        doc = space_to_doc(e)
        back = space_from_doc(doc)
        assert back == e
        assert space_to_doc(back) == doc

    def test_profile_roundtrip(self):
        p = EpsProfile(((F(1, 2), n(2)),), ConstTail(n(4)))
        assert profile_from_doc(profile_to_doc(p)) == p

    def test_tail_defaults_to_const_one(self):
        p = profile_from_doc({"steps": []})
        assert p == EpsProfile()

    def test_errors(self):
        with pytest.raises(DocumentError):
            space_from_doc({"v": 1})
        with pytest.raises(DocumentError):
            space_from_doc({"v": 1, "space": {"sum": {"p": "0"}}})
        with pytest.raises(DocumentError):
            space_from_doc(
                {
                    "v": 1,
                    "space": {
                        "sum": {"p": "0", "summands": [], "family": {}}
                    },
                }
            )
        with pytest.raises(DocumentError):
            space_from_doc({"v": 1, "space": {"atom": {"name": "x"}}})
        with pytest.raises(DocumentError):
            space_from_doc({"v": 1, "space": {"widget": {}}})


class TestTraceDocs:
    def test_trace_doc_shape(self):
        final, trace = derive_steps(F1, F(1, 2), 3)
        doc = trace_to_doc(trace, F(1), sz_eps=2)
        assert doc["v"] == 1 and doc["q"] == "1" and doc["sz_eps"] == 2
        assert [s["step"] for s in doc["steps"]] == [0, 1, 2]
        assert doc["steps"][-1]["set"] is None
        assert doc["steps"][0]["apexes"] == 1
        assert doc["steps"][0]["diam_q"] == "1"


class TestCanonical:
    def test_key_order_is_canonical(self):
        a = dumps_canonical({"b": 1, "a": [{"y": 2, "x": 3}]})
        b = dumps_canonical({"a": [{"x": 3, "y": 2}], "b": 1})
        assert a == b
        assert a.endswith("\n")

    def test_loads_error(self):
        with pytest.raises(DocumentError):
            loads("{nope")
