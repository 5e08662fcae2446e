import json
import time

import pytest
from hypothesis import given, settings

from c1ke.export import proof_to_dict, proof_to_dot, proof_to_json, proof_to_text
from c1ke.families import gen_phi5, medical_cases
from c1ke.formula import And, Atom, Cons, Imp, Neg, parse_formula, parse_sequent
from c1ke.oracle import admissible
from c1ke.rules import F, RuleId, SignedFormula, T
from c1ke.tableau import (
    Branch,
    Closure,
    NodeLimitExceeded,
    NotSaturated,
    Signature,
    Split,
    StrategyConfig,
    TimeLimitExceeded,
    Verdict,
    branch_formulas,
    extract_countermodel,
    init_tableau,
    leaves,
    prove,
    saturate_linear,
    select_pb,
    select_witness_pb,
)
from strategies import sequents

P, Q, K, L, M = (Atom(x) for x in "PQKLM")


def sf(sign, text):
    return SignedFormula(sign, parse_formula(text))


GNC = parse_sequent("|- ~(P & (~P & @P))")
GNC_FORMULAS = {
    sf(F, "~(P & (~P & @P))"), sf(T, "P & (~P & @P)"), sf(T, "P"), sf(T, "~P & @P"),
    sf(T, "~P"), sf(T, "@P"), sf(F, "P"),
}


class TestInit:
    def test_gnc(self):
        b = init_tableau(GNC)
        assert b.entries == [sf(F, "~(P & (~P & @P))")]

    def test_sigma_expands(self):
        b = init_tableau(GNC)
        assert b.entries[0].formula is parse_formula("~(P & (~P & @P))").canon
        b = init_tableau(GNC, StrategyConfig(signature_mode=Signature.SIGMA_CIRC))
        assert b.entries[0].formula is parse_formula("~(P & (~P & @P))")

    def test_order(self):
        case1 = medical_cases()[0].sequent
        b = init_tableau(case1)
        assert len(b) == 7
        assert [e.sign for e in b.entries] == [T] * 6 + [F]
        assert b.entries[-1] == SignedFormula(F, And(K, Neg(L)))


class TestSaturation:
    def test_gnc_saturates_and_closes(self):
        b, apps, closed = saturate_linear(init_tableau(GNC))
        assert closed
        assert set(b.entries) == GNC_FORMULAS
        t, f = b.closure
        assert b.entries[t] == sf(T, "P") and b.entries[f] == sf(F, "P")
        assert RuleId.PB not in {a.rule for a in apps}

    def test_atom_unchanged(self):
        b, apps, closed = saturate_linear(Branch.from_entries([sf(T, "P")]))
        assert not closed and apps == [] and len(b) == 1

    def test_single_t_and(self):
        b, apps, closed = saturate_linear(Branch.from_entries([sf(T, "P & Q")]))
        assert not closed
        assert b.entries == [sf(T, "P & Q"), sf(T, "P"), sf(T, "Q")]
        assert [a.rule for a in apps] == [RuleId.T_AND]

    def test_no_duplicates(self):
        b, _, _ = saturate_linear(Branch.from_entries([sf(T, "P & P")]))
        assert b.entries == [sf(T, "P & P"), sf(T, "P")]


class TestSelectPB:
    def test_implication_candidate(self):
        b, _, _ = saturate_linear(Branch.from_entries([sf(T, "P -> Q")]))
        pos, rule, pb = select_pb(b)
        assert pos == 0 and rule is RuleId.T_IMP_1 and pb is P

    def test_atoms_only(self):
        b, _, _ = saturate_linear(Branch.from_entries([sf(T, "P"), sf(F, "Q")]))
        assert select_pb(b) is None

    def test_f_cons_and_candidate(self):
        entries = [SignedFormula(F, Cons(And(P, Q)).canon)]
        b, _, _ = saturate_linear(Branch.from_entries(entries))
        pos, rule, pb = select_pb(b)
        assert rule is RuleId.F_CONS_AND_1 and pb is Cons(P).canon

    def test_pb_formula_never_decided(self):
        for case in medical_cases():
            res = prove(case.sequent)
            assert res.stats.pb_applications == 0


class TestProve:
    def test_gnc(self):
        t0 = time.perf_counter()
        res = prove(GNC)
        assert time.perf_counter() - t0 < 0.01
        assert res.verdict is Verdict.CLOSED
        assert res.stats.branches == 1 and res.stats.pb_applications == 0
        assert res.stats.formula_nodes == 7
        assert {n.sf for n in res.nodes.values()} == GNC_FORMULAS
        assert isinstance(res.root.end, Closure)
        t, f = res.root.end.refs
        assert res.nodes[t].sf == sf(T, "P") and res.nodes[f].sf == sf(F, "P")

    def test_independent_atoms_open(self):
        res = prove(parse_sequent("P |- Q"))
        assert res.verdict is Verdict.OPEN and res.stats.formula_nodes == 2
        assert extract_countermodel(res.open_branch).values == {P.digest: 1, Q.digest: 0}

    def test_medical_case3_branch(self):
        res = prove(medical_cases()[2].sequent)
        assert res.verdict is Verdict.OPEN
        entries = set(res.open_branch.entries)
        for text in ("K", "L", "M", "~K", "~L"):
            assert sf(T, text) in entries

    @pytest.mark.parametrize("text", ["P | Q |- P", "P -> Q, Q -> P |- P", "@(P & Q) |- @P"])
    def test_branch_accounting(self, text):
        res = prove(parse_sequent(text))
        assert res.stats.branches == res.stats.pb_applications + 1
        assert len(leaves(res.root)) == res.stats.branches or res.verdict is Verdict.OPEN

    def test_split_children_start_with_pb(self):
        res = prove(parse_sequent("P -> Q, Q -> P |- P & Q"))
        split = res.root.end
        assert isinstance(split, Split)
        assert split.left.nodes[0].sf == SignedFormula(T, split.pb_formula)
        assert split.right.nodes[0].sf == SignedFormula(F, split.pb_formula)

    def test_justifications_lie_above(self):
        res = prove(gen_phi5(2).sequent)
        for path in branch_formulas(res):
            assert path
        def walk(seg, above):
            for n in seg.nodes:
                assert set(n.premiss_refs) <= above
                above = above | {n.id}
            if isinstance(seg.end, Split):
                walk(seg.end.left, above)
                walk(seg.end.right, above)
            elif isinstance(seg.end, Closure):
                assert set(seg.end.refs) <= above
        walk(res.root, frozenset())

    def test_node_limit(self):
        with pytest.raises(NodeLimitExceeded) as info:
            prove(gen_phi5(6).sequent, StrategyConfig(node_limit=100))
        assert info.value.kind == "node"
        assert info.value.stats.formula_nodes <= 100

    def test_time_limit(self):
        with pytest.raises(TimeLimitExceeded) as info:
            prove(gen_phi5(9).sequent, StrategyConfig(time_limit=1e-4))
        assert info.value.kind == "time"

    def test_bad_config(self):
        with pytest.raises(ValueError):
            StrategyConfig(node_limit=0)
        with pytest.raises(ValueError):
            StrategyConfig(pb_selection="largest")


class TestCountermodel:
    def test_unsaturated_branch_rejected(self):
        b = Branch.from_entries([sf(T, "~P"), sf(F, "P")])
        with pytest.raises(NotSaturated):
            extract_countermodel(b)

    def test_closed_branch_rejected(self):
        b, _, _ = saturate_linear(init_tableau(GNC))
        with pytest.raises(NotSaturated):
            extract_countermodel(b)

    def test_case3_model(self):
        res = prove(medical_cases()[2].sequent)
        model = extract_countermodel(res.open_branch)
        assert admissible(model)
        expect = {"K": 1, "L": 1, "M": 1, "~K": 1, "~L": 1, "~M": 0}
        assert {k: model[parse_formula(k)] for k in expect} == expect


class TestWitnessPB:
    SEQ = parse_sequent("A, B, @A, @B, ~(A & B), ~(@(A & B) & E) |- E")

    def test_restricted_pb_alone_leaves_branch_open(self):
        res = prove(self.SEQ, StrategyConfig(witness_pb=False))
        assert res.verdict is Verdict.OPEN
        assert select_witness_pb(res.open_branch) is not None

    def test_witness_pb_closes(self):
        assert prove(self.SEQ).verdict is Verdict.CLOSED


class TestConfigsAgree:
    @settings(max_examples=150, deadline=None)
    @given(sequents(5, 2))
    def test_signature_modes_agree(self, s):
        a = prove(s)
        b = prove(s, StrategyConfig(signature_mode=Signature.SIGMA_CIRC))
        assert a.verdict is b.verdict

    @settings(max_examples=150, deadline=None)
    @given(sequents(5, 2))
    def test_derived_rules_do_not_change_verdicts(self, s):
        assert prove(s).verdict is prove(s, StrategyConfig(use_derived_rules=False)).verdict

    @settings(max_examples=100, deadline=None)
    @given(sequents(5, 2))
    def test_pb_policy_does_not_change_verdicts(self, s):
        assert prove(s).verdict is prove(s, StrategyConfig(pb_selection="first")).verdict

    @settings(max_examples=100, deadline=None)
    @given(sequents(5, 3))
    def test_accounting(self, s):
        st = prove(s).stats
        assert st.branches == st.pb_applications + 1
        distinct = {SignedFormula(T, p) for p in s.premises} | {SignedFormula(F, s.conclusion)}
        assert st.formula_nodes >= len(distinct)


class TestExport:
    def test_json_is_deterministic_and_has_no_timing(self):
        s = gen_phi5(2).sequent
        a, b = proof_to_json(prove(s)), proof_to_json(prove(s))
        assert a == b
        doc = json.loads(a)
        assert doc["schema_version"] == 1
        assert "elapsed_ms" not in doc["stats"]
        assert "elapsed_ms" in proof_to_dict(prove(s), timing=True)["stats"]

    def test_json_tree_gnc(self):
        doc = proof_to_dict(prove(GNC))
        tree = doc["tree"]
        assert [n["kind"] for n in tree] == ["formula"] * 7 + ["closure"]
        assert tree[0] == {"kind": "formula", "id": 0, "sign": "F", "formula": "~(P & ~P & ~(P & ~P))"}
        assert tree[-1]["premiss_refs"] == [2, 6]
        assert doc["verdict"] == "Closed" and doc["stats"]["rule_applications"]["t_neg_cons"] == 1

    def test_json_open_has_countermodel(self):
        doc = proof_to_dict(prove(parse_sequent("P |- Q")))
        assert doc["tree"][-1] == {"kind": "open"}
        assert sorted(map(tuple, doc["countermodel"])) == [("P", 1), ("Q", 0)]

    def test_json_split(self):
        doc = proof_to_dict(prove(gen_phi5(1).sequent))
        split = doc["tree"][-1]
        assert split["kind"] == "split" and len(split["children"]) == 2

    def test_dot(self):
        dot = proof_to_dot(prove(gen_phi5(1).sequent))
        assert dot.startswith("digraph proof {") and dot.rstrip().endswith("}")
        assert "schema_version=1" in dot
        assert dot.count('label="×"') == 3
        assert "shape=diamond" in dot

    def test_text(self):
        text = proof_to_text(prove(GNC))
        assert text.splitlines()[0].split() == ["0", "F", "¬(P", "∧", "¬P", "∧", "¬(P", "∧", "¬P))", "[premise]"]
        assert "× (2, 6)" in text
