"""Order-2 opportunistic network coding: graph model, clique selection, simulator."""

from o2onc.packets import PacketSet
from o2onc.model import (Classification, ReceiverState, Verdict, Vertex,
                         apply_reception, classify)
from o2onc.graph import CodingGraph, Rules, build_graph, exists_benefiting_combination
from o2onc.clique import WeightedGraph, greedy_clique_search, max_weight_clique_exact
from o2onc.coding import broadcast_and_update, determine_combination
from o2onc.sim import (Scenario, ScenarioTemplate, Scheduler, SimResult,
                       optimal_lower_bound, run_batch, run_delivery)

__all__ = [
    "PacketSet", "Classification", "ReceiverState", "Verdict", "Vertex",
    "apply_reception", "classify", "CodingGraph", "Rules", "build_graph",
    "exists_benefiting_combination", "WeightedGraph", "greedy_clique_search",
    "max_weight_clique_exact", "broadcast_and_update", "determine_combination",
    "Scenario", "ScenarioTemplate", "Scheduler", "SimResult",
    "optimal_lower_bound", "run_batch", "run_delivery",
]
