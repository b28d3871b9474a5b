"""
Unit tests for the node orchestrator
"""

from dressed_cavity.pipeline import NodeStatus, PipelineOrchestrator, first_failure


def _chain(*nodes):
    orchestrator = PipelineOrchestrator("test")
    for name, func in nodes:
        orchestrator.register_node(name, func)
    for (upstream, _), (downstream, _) in zip(nodes, nodes[1:]):
        orchestrator.register_edge(upstream, downstream)
    return orchestrator


def test_nodes_run_in_edge_order():
    calls = []
    orchestrator = _chain(
        ("compute", lambda trace: trace.append("compute") or 1),
        ("verify", lambda trace: trace.append("verify") or 2),
        ("emit", lambda trace: trace.append("emit") or 3),
    )
    results = orchestrator.execute_pipeline("compute", trace=calls)
    assert calls == ["compute", "verify", "emit"]
    assert [r.status for r in results.values()] == [NodeStatus.SUCCESS] * 3
    assert results["emit"].data == 3
    assert first_failure(results) is None


def test_failure_skips_downstream_nodes():
    def broken(trace):
        raise ValueError("bad state")

    calls = []
    orchestrator = _chain(
        ("compute", lambda trace: trace.append("compute")),
        ("verify", broken),
        ("emit", lambda trace: trace.append("emit")),
    )
    results = orchestrator.execute_pipeline("compute", trace=calls)
    assert calls == ["compute"]
    assert results["verify"].status is NodeStatus.FAILURE
    assert results["emit"].status is NodeStatus.SKIPPED
    failure = first_failure(results)
    assert failure.node_name == "verify"
    assert isinstance(failure.error, ValueError)


def test_unregistered_node_reported():
    orchestrator = PipelineOrchestrator("test")
    result = orchestrator.run_node("missing")
    assert result.status is NodeStatus.FAILURE
    assert isinstance(result.error, KeyError)


def test_execution_log_records_each_transition():
    orchestrator = _chain(("only", lambda: None))
    orchestrator.execute_pipeline("only")
    statuses = [entry["status"] for entry in orchestrator.logs]
    assert statuses == ["running", "success"]
    assert all(entry["pipeline"] == "test" for entry in orchestrator.logs)
