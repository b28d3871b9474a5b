import logging
import time
from collections.abc import Callable
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Optional

logger = logging.getLogger(__name__)


class NodeStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    SUCCESS = "success"
    FAILURE = "failure"
    SKIPPED = "skipped"


@dataclass
class NodeResult:
    node_name: str
    status: NodeStatus
    data: Any
    error: Optional[BaseException]
    execution_time: float
    timestamp: datetime


class PipelineOrchestrator:
    """Runs registered nodes breadth-first along registered edges; stops at the first failure."""

    def __init__(self, name: str = "pipeline"):
        self.name = name
        self.nodes: dict[str, Callable[..., Any]] = {}
        self.edges: dict[str, list[str]] = {}
        self.logs: list[dict[str, Any]] = []

    def register_node(self, name: str, func: Callable[..., Any]) -> None:
        """Register a pipeline node."""
        self.nodes[name] = func

    def register_edge(self, from_node: str, to_node: str) -> None:
        """Register an edge between nodes."""
        self.edges.setdefault(from_node, []).append(to_node)

    def log_execution(
        self,
        node_name: str,
        status: NodeStatus,
        error: Optional[BaseException] = None,
        execution_time: float = 0.0,
    ) -> None:
        entry = {
            "pipeline": self.name,
            "node_name": node_name,
            "status": status.value,
            "timestamp": datetime.now().isoformat(),
            "execution_time": execution_time,
            "error": str(error) if error else None,
        }
        self.logs.append(entry)
        if status is NodeStatus.FAILURE:
            logger.error(
                "%s/%s failed after %.3fs: %s", self.name, node_name, execution_time, error
            )
        else:
            logger.debug("%s/%s %s (%.3fs)", self.name, node_name, status.value, execution_time)

    def run_node(self, node_name: str, **kwargs: Any) -> NodeResult:
        if node_name not in self.nodes:
            error = KeyError(f"Node {node_name} not registered")
            self.log_execution(node_name, NodeStatus.FAILURE, error=error)
            return NodeResult(node_name, NodeStatus.FAILURE, None, error, 0.0, datetime.now())

        start = time.perf_counter()
        try:
            data = self.nodes[node_name](**kwargs)
        except Exception as e:
            elapsed = time.perf_counter() - start
            self.log_execution(node_name, NodeStatus.FAILURE, error=e, execution_time=elapsed)
            return NodeResult(node_name, NodeStatus.FAILURE, None, e, elapsed, datetime.now())

        elapsed = time.perf_counter() - start
        self.log_execution(node_name, NodeStatus.SUCCESS, execution_time=elapsed)
        return NodeResult(node_name, NodeStatus.SUCCESS, data, None, elapsed, datetime.now())

    def execute_pipeline(self, start_node: str, **kwargs: Any) -> dict[str, NodeResult]:
        """Execute from start_node; nodes after a failure are marked skipped."""
        results: dict[str, NodeResult] = {}
        visited: set[str] = set()
        queue = [start_node]
        failed = False

        while queue:
            node_name = queue.pop(0)
            if node_name in visited:
                continue
            visited.add(node_name)

            if failed:
                results[node_name] = NodeResult(
                    node_name, NodeStatus.SKIPPED, None, None, 0.0, datetime.now()
                )
            else:
                self.log_execution(node_name, NodeStatus.RUNNING)
                result = self.run_node(node_name, **kwargs)
                results[node_name] = result
                failed = result.status is NodeStatus.FAILURE

            queue.extend(self.edges.get(node_name, []))

        return results


def first_failure(results: dict[str, NodeResult]) -> Optional[NodeResult]:
    for result in results.values():
        if result.status is NodeStatus.FAILURE:
            return result
    return None
