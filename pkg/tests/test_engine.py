from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pidlint.engine import (
    EngineConfig,
    apply_match,
    detect_rule,
    diff,
    is_suppressed,
    run_all,
    run_rule,
)
from pidlint.errors import ConvergenceError, PidlintError, StaleMatchError
from pidlint.matching import Condition, Match, find_matches
from pidlint.model import PidGraph
from pidlint.rules import (
    RuleEdge,
    RuleGraph,
    RuleMeta,
    RuleNode,
    corrected_pattern,
    erroneous_pattern,
)


def _meta(rule_id="t", missing=True, recommendation="suggested", order=1) -> RuleMeta:
    return RuleMeta(id=rule_id, milestone="issue for design", description="d",
                    explanation="e", recommendation=recommendation,
                    missing_component=missing, source="s", order=order)


def protected_pump_graph() -> PidGraph:
    g = PidGraph()
    g.add_node("a", "Vessel")
    g.add_node("s", "Strainer")
    g.add_node("p", "Pump")
    g.add_edge("e1", "a", "s", "pipe")
    g.add_edge("e2", "s", "p", "pipe")
    return g


class TestSuppression:
    def test_protected_pump_suppresses_strainer_rule(self, rules_by_id):
        g = protected_pump_graph()
        rule = rules_by_id["10"]
        matches = find_matches(erroneous_pattern(rule), g)
        assert [m.node_map for m in matches] == [{"x": "s", "pump": "p"}]
        assert is_suppressed(rule, matches[0], g)

    def test_unprotected_pump_not_suppressed(self, rules_by_id):
        g = PidGraph()
        g.add_node("a", "Vessel")
        g.add_node("p", "Pump")
        g.add_edge("e1", "a", "p", "pipe")
        rule = rules_by_id["10"]
        matches = find_matches(erroneous_pattern(rule), g)
        assert len(matches) == 1
        assert not is_suppressed(rule, matches[0], g)

    def test_rule19_self_suppresses_after_application(self, rules_by_id):
        g = PidGraph()
        g.add_node("p", "Pump")
        g.add_node("b", "Vessel")
        g.add_edge("e1", "p", "b", "pipe")
        rule = rules_by_id["19"]
        fixed, _ = run_rule(rule, g, EngineConfig(mode="fix"))
        for match in find_matches(erroneous_pattern(rule), fixed):
            assert is_suppressed(rule, match, fixed)

    def test_non_missing_component_rule_never_suppressed(self, rules_by_id):
        rule = rules_by_id["3"]
        g = PidGraph()
        g.add_node("v", "GlobeValve")
        match = Match({"v": "v"})
        assert not is_suppressed(rule, match, g)

    def test_protection_counts_through_piping_runs(self, rules_by_id):
        # A strainer upstream of an intermediate block valve still protects
        # the pump: the corrected layout is matched over piping runs.
        g = protected_pump_graph()
        g.remove_edge("e2")
        g.add_node("bv", "GateValve")
        g.add_edge("e2a", "s", "bv", "pipe")
        g.add_edge("e2b", "bv", "p", "pipe")
        rule = rules_by_id["10"]
        matches = find_matches(erroneous_pattern(rule), g)
        assert [m.node_map for m in matches] == [{"x": "bv", "pump": "p"}]
        assert is_suppressed(rule, matches[0], g)

    def test_equipment_breaks_a_piping_run(self, rules_by_id):
        # A strainer feeding an intermediate vessel does not protect the pump.
        g = PidGraph()
        g.add_node("a", "Vessel")
        g.add_node("s", "Strainer")
        g.add_node("t", "Vessel")
        g.add_node("p", "Pump")
        g.add_edge("e1", "a", "s", "pipe")
        g.add_edge("e2", "s", "t", "pipe")
        g.add_edge("e3", "t", "p", "pipe")
        rule = rules_by_id["10"]
        matches = find_matches(erroneous_pattern(rule), g)
        assert [m.node_map for m in matches] == [{"x": "t", "pump": "p"}]
        assert not is_suppressed(rule, matches[0], g)


class TestApplyMatch:
    def test_rule19_deltas(self, fixture_graph, rules_by_id):
        rule = rules_by_id["19"]
        matches = find_matches(erroneous_pattern(rule), fixture_graph)
        target = next(m for m in matches if m.node_map["pump"] == "P4711")
        updated, record = apply_match(rule, target, fixture_graph)
        assert record.delta_nodes == 1 and record.delta_edges == 1
        assert record.inserted_node_ids == ["19:CheckValve:1"]
        assert len(record.inserted_edge_ids) == 2
        assert record.deleted_edge_ids == ["pe02"]
        assert updated.validate() == []
        # source graph untouched
        assert fixture_graph.node_count == 33

    def test_rule21_deltas(self, fixture_graph, rules_by_id):
        rule = rules_by_id["21"]
        matches = find_matches(erroneous_pattern(rule), fixture_graph)
        updated, record = apply_match(rule, matches[0], fixture_graph)
        assert record.delta_nodes == 4 and record.delta_edges == 4
        assert len(record.deleted_edge_ids) == 2
        assert len(record.inserted_edge_ids) == 6
        assert updated.validate() == []

    def test_rule3_copies_line_size(self, rules_by_id):
        g = PidGraph()
        g.add_node("up", "Vessel")
        g.add_node("gv", "GlobeValve")
        g.add_node("down", "Vessel")
        g.add_node("act", "Actuator")
        g.add_edge("in", "up", "gv", "pipe", {"nominalDiameterDN": 150})
        g.add_edge("out", "gv", "down", "pipe", {"nominalDiameterDN": 150})
        g.add_edge("sig", "act", "gv", "signal")
        rule = rules_by_id["3"]
        matches = find_matches(erroneous_pattern(rule), g)
        assert len(matches) == 1
        updated, record = apply_match(rule, matches[0], g)
        assert record.deleted_node_ids == ["gv"]
        assert record.inserted_node_ids == ["3:BallValve:1"]
        replacement_in = updated.edges_between("up", "3:BallValve:1")
        assert len(replacement_in) == 1
        assert replacement_in[0].attributes["nominalDiameterDN"] == 150
        # the actuator is re-wired to the replacement valve
        assert len(updated.edges_between("act", "3:BallValve:1")) == 1
        assert updated.node_count == 4 and updated.edge_count == 3

    def test_node_deletion_cascade_is_recorded(self, rules_by_id):
        # An extra signal into the globe valve is not part of the match but
        # disappears with the deleted node; the record must list it.
        g = PidGraph()
        g.add_node("up", "Vessel")
        g.add_node("gv", "GlobeValve")
        g.add_node("down", "Vessel")
        g.add_node("act", "Actuator")
        g.add_node("pi", "PressureInstrument")
        g.add_edge("in", "up", "gv", "pipe", {"nominalDiameterDN": 100})
        g.add_edge("out", "gv", "down", "pipe")
        g.add_edge("sig", "act", "gv", "signal")
        g.add_edge("extra", "gv", "pi", "signal")
        rule = rules_by_id["3"]
        matches = find_matches(erroneous_pattern(rule), g)
        updated, record = apply_match(rule, matches[0], g)
        assert "extra" in record.deleted_edge_ids
        assert updated.validate() == []

    def test_stale_match_rejected(self, fixture_graph, rules_by_id):
        rule = rules_by_id["19"]
        matches = find_matches(erroneous_pattern(rule), fixture_graph)
        mutated = fixture_graph.copy()
        mutated.remove_node(matches[0].node_map["pump"])
        with pytest.raises(StaleMatchError):
            apply_match(rule, matches[0], mutated)

    def test_fresh_ids_count_upward(self, fixture_graph, rules_by_id):
        rule = rules_by_id["19"]
        g, _ = run_rule(rule, fixture_graph, EngineConfig(mode="fix"))
        assert "19:CheckValve:1" in g.nodes
        assert "19:CheckValve:2" in g.nodes


class TestRunRule:
    def test_rule9_once_then_quiet(self, fixture_graph, rules_by_id):
        rule = rules_by_id["9"]
        config = EngineConfig(mode="fix")
        g1, records = run_rule(rule, fixture_graph, config)
        assert len(records) == 1
        assert records[0].match.node_map == {"vessel": "T4750"}
        g2, again = run_rule(rule, g1, config)
        assert again == []

    def test_rule21_hits_both_pumps(self, fixture_graph, rules_by_id):
        _, records = run_rule(rules_by_id["21"], fixture_graph, EngineConfig(mode="fix"))
        assert len(records) == 2
        pumps = sorted(r.match.node_map["pump"] for r in records)
        assert pumps == ["P4711", "P4712"]

    def test_rule3_finds_nothing_on_fixture(self, fixture_graph, rules_by_id):
        _, records = run_rule(rules_by_id["3"], fixture_graph, EngineConfig(mode="fix"))
        assert records == []

    def test_self_triggering_rule_hits_cap(self):
        # Every pump gets a sibling pump piped off it: never converges.
        rule = RuleGraph(
            _meta(rule_id="evil", missing=False),
            [RuleNode("p", "Pump", "keep"), RuleNode("q", "Pump", "insert")],
            [RuleEdge("pq", "p", "q", "pipe", "insert")],
        )
        g = PidGraph()
        g.add_node("seed", "Pump")
        config = EngineConfig(mode="fix", max_applications_per_rule=25)
        with pytest.raises(ConvergenceError) as err:
            run_rule(rule, g, config)
        assert err.value.rule_id == "evil"


class TestRunAll:
    def test_fix_mode_fixture_totals(self, fixture_graph, rules, fix_config):
        result = run_all(rules, fixture_graph, fix_config)
        assert Counter(r.rule_id for r in result.records) == \
            {"9": 1, "21": 2, "10": 2, "19": 2}
        assert len(result.records) == 7
        assert result.graph.node_count == 46
        assert result.graph.edge_count == 49
        assert result.graph.validate() == []

    def test_record_order_follows_rule_order(self, fixture_graph, rules, fix_config):
        result = run_all(rules, fixture_graph, fix_config)
        assert [r.rule_id for r in result.records] == ["9", "21", "21", "10", "10", "19", "19"]

    def test_detect_mode_leaves_graph_alone(self, fixture_graph, rules, detect_config):
        result = run_all(rules, fixture_graph, detect_config)
        assert result.graph is fixture_graph
        assert fixture_graph.node_count == 33
        assert all(r.status == "proposed" for r in result.records)
        assert len(result.records) == 7

    def test_mandatory_threshold(self, fixture_graph, rules):
        config = EngineConfig(mode="fix", recommendation_threshold="mandatory")
        result = run_all(rules, fixture_graph, config)
        assert Counter(r.rule_id for r in result.records) == {"9": 1, "21": 2}

    def test_milestone_filter(self, fixture_graph, rules):
        config = EngineConfig(mode="fix", milestone_filter="issue for construction")
        result = run_all(rules, fixture_graph, config)
        assert result.records == []
        config = EngineConfig(mode="fix", milestone_filter="issue for design")
        result = run_all(rules, fixture_graph, config)
        assert len(result.records) == 7

    def test_duplicate_rule_ids_rejected(self, fixture_graph, rules):
        with pytest.raises(PidlintError):
            run_all(list(rules) + [rules[0]], fixture_graph, EngineConfig())

    def test_idempotent_on_fixture(self, fixture_graph, rules, fix_config):
        once = run_all(rules, fixture_graph, fix_config)
        twice = run_all(rules, once.graph, fix_config)
        assert twice.records == []
        assert twice.graph == once.graph

    def test_explanations_copied_verbatim(self, fixture_graph, rules, fix_config, rules_by_id):
        result = run_all(rules, fixture_graph, fix_config)
        for record in result.records:
            assert record.explanation == rules_by_id[record.rule_id].meta.explanation
            assert record.explanation.strip()

    def test_placement_order_dependence(self, fixture_graph, rules, fix_config):
        result = run_all(rules, fixture_graph, fix_config)
        g = result.graph
        for pump in ("P4711", "P4712"):
            (in_edge, upstream), = g.neighbors(pump, "in", "pipe")
            assert upstream.cls == "Strainer"
            (bv_edge, block), = g.neighbors(upstream.id, "in", "pipe")
            assert block.cls == "GateValve"
            drains = [n for _, n in g.neighbors(block.id, "out", "pipe")
                      if n.cls == "DrainValve"]
            assert len(drains) == 1
            (out_edge, downstream), = g.neighbors(pump, "out", "pipe")
            assert downstream.cls == "CheckValve"
            (bv2_edge, block2), = g.neighbors(downstream.id, "out", "pipe")
            assert block2.cls == "GateValve"

    def test_timing_fields_populated(self, fixture_graph, rules, fix_config):
        result = run_all(rules, fixture_graph, fix_config)
        assert set(result.per_rule_ms) == {"3", "9", "10", "19", "21"}
        assert all(v >= 0 for v in result.per_rule_ms.values())
        assert result.total_ms >= max(result.per_rule_ms.values())


class TestDiff:
    def test_identical_graphs_empty_diff(self, fixture_graph):
        d = diff(fixture_graph, fixture_graph.copy())
        assert d.is_empty

    def test_single_added_node(self, fixture_graph):
        after = fixture_graph.copy()
        after.add_node("new", "Strainer")
        d = diff(fixture_graph, after)
        assert [n.id for n in d.added_nodes] == ["new"]
        assert d.removed_nodes == [] and d.added_edges == [] and d.removed_edges == []

    def test_full_run_gross_counts(self, fixture_graph, rules, fix_config):
        result = run_all(rules, fixture_graph, fix_config)
        d = diff(fixture_graph, result.graph)
        assert len(d.added_nodes) == 13
        assert len(d.removed_nodes) == 0
        assert len(d.added_edges) == 17
        assert len(d.removed_edges) == 4
        # net change matches the 33/36 -> 46/49 transformation
        assert len(d.added_nodes) - len(d.removed_nodes) == 13
        assert len(d.added_edges) - len(d.removed_edges) == 13

    def test_diff_applies_back(self, fixture_graph, rules, fix_config):
        result = run_all(rules, fixture_graph, fix_config)
        d = diff(fixture_graph, result.graph)
        assert d.apply_to(fixture_graph) == result.graph


# -- convergence properties on random plant-shaped graphs ----------------------


def _random_plant(seed: int) -> PidGraph:
    """Random small plant: pumps/vessels/exchangers chained by pipes.

    Pumps are normalized to the standard nozzle pair: at most one suction
    pipe, at most one discharge pipe, and distinct partners on the two sides.
    The isolation rule's pattern (one upstream wildcard, one downstream
    wildcard) is built for exactly that layout; pumps with several suction
    branches or a single shared neighbor take more than one pass to settle
    and are not physical P&ID layouts at this abstraction level.
    """
    rng = random.Random(seed)
    g = PidGraph()
    count = rng.randint(2, 7)
    classes = ["Pump", "Vessel", "HeatExchanger", "ButterflyValve", "Strainer",
               "CheckValve", "GateValve", "DrainValve", "LevelInstrument"]
    for i in range(count):
        g.add_node(f"n{i}", rng.choice(classes))
    ids = sorted(g.nodes)
    serial = 0
    for _ in range(rng.randint(1, 10)):
        a, b = rng.choice(ids), rng.choice(ids)
        if a == b:
            continue
        kind = "signal" if rng.random() < 0.2 else "pipe"
        g.add_edge(f"e{serial}", a, b, kind)
        serial += 1
    # Normalize pump piping: first in-pipe and first out-pipe survive,
    # and the discharge partner must differ from the suction partner.
    for nid in ids:
        if g.nodes[nid].cls != "Pump":
            continue
        ins = g.neighbors(nid, "in", "pipe")
        for edge, _ in ins[1:]:
            g.remove_edge(edge.id)
        suction_partner = ins[0][1].id if ins else None
        outs = [pair for pair in g.neighbors(nid, "out", "pipe")
                if pair[1].id != suction_partner]
        keep = outs[0][0].id if outs else None
        for edge, _ in g.neighbors(nid, "out", "pipe"):
            if edge.id != keep:
                g.remove_edge(edge.id)
    return g


@given(st.integers(min_value=0, max_value=10**9))
@settings(max_examples=40, deadline=None)
def test_run_all_is_idempotent_on_random_plants(seed):
    from pidlint.rules import builtin_rules

    rule_set = builtin_rules()
    graph = _random_plant(seed)
    config = EngineConfig(mode="fix", recommendation_threshold="consideration",
                          max_applications_per_rule=200)
    once = run_all(rule_set, graph, config)
    assert once.graph.validate() == []
    twice = run_all(rule_set, once.graph, config)
    assert twice.records == []


@given(st.integers(min_value=0, max_value=10**9))
@settings(max_examples=40, deadline=None)
def test_each_application_is_self_suppressing(seed):
    """Right after a missing-component rule fires, the same region is covered."""
    from pidlint.rules import builtin_rules

    graph = _random_plant(seed)
    for rule in builtin_rules():
        if not rule.meta.missing_component:
            continue
        matches = find_matches(erroneous_pattern(rule), graph)
        open_matches = [m for m in matches if not is_suppressed(rule, m, graph)]
        if not open_matches:
            continue
        updated, record = apply_match(rule, open_matches[0], graph)
        region = (set(record.match.node_map.values()) - set(record.deleted_node_ids)) \
            | set(record.inserted_node_ids)
        still_open = [
            m for m in find_matches(erroneous_pattern(rule), updated)
            if set(m.node_map.values()) <= region
            and not is_suppressed(rule, m, updated)
        ]
        assert still_open == []
