"""Independent oracles the implementation is checked against.

These deliberately avoid the summary fixpoint: reachability questions
are answered by bounded breadth-first search over configurations, game
questions by unfolding a hierarchical machine into its (finite)
configuration graph and running the plain finite-arena attractor.
"""

from collections import deque
from typing import Iterable, Set, Tuple

from rhagames.games import FiniteArena, Player, attractor
from rhagames.rsm import (
    Location,
    RsmConfiguration,
    RsmModel,
    available_actions,
    initial_config,
    node,
    rsm_step,
)


def bfs_configs(model: RsmModel, start_node: str, max_context: int) -> Set[RsmConfiguration]:
    """All configurations reachable with context length <= max_context."""
    start = initial_config(start_node)
    seen = {start}
    queue = deque([start])
    while queue:
        config = queue.popleft()
        for action in available_actions(model, config):
            nxt = rsm_step(model, config, action)
            if len(nxt.context) > max_context or nxt in seen:
                continue
            seen.add(nxt)
            queue.append(nxt)
    return seen


def bfs_reachable(model: RsmModel, start_node: str, finals: Iterable[Location], max_context: int = 8) -> bool:
    final_set = frozenset(finals)
    return any(cfg.location in final_set for cfg in bfs_configs(model, start_node, max_context))


def bfs_terminates(model: RsmModel, start_node: str, max_context: int = 8) -> bool:
    exits = set()
    for comp in model.components:
        exits.update(node(x) for x in comp.exits)
    return any(
        not cfg.context and cfg.location in exits
        for cfg in bfs_configs(model, start_node, max_context)
    )


def unfold_arena(model: RsmModel, partition, start_node: str) -> Tuple[FiniteArena, RsmConfiguration]:
    """Unfold a hierarchical machine into its configuration graph.  Only
    terminates when the call graph is acyclic (contexts stay bounded)."""
    start = initial_config(start_node)
    states = {start}
    transitions = []
    queue = deque([start])
    while queue:
        config = queue.popleft()
        for action in available_actions(model, config):
            nxt = rsm_step(model, config, action)
            transitions.append((config, action, nxt))
            if nxt not in states:
                states.add(nxt)
                queue.append(nxt)
    owner = {cfg: partition[cfg.location] for cfg in states}
    return FiniteArena(states, transitions, owner), start


def oracle_reachability_winner(model, partition, start_node, finals) -> Player:
    arena, start = unfold_arena(model, partition, start_node)
    final_set = frozenset(finals)
    targets = [cfg for cfg in arena.states if cfg.location in final_set]
    winning, _ = attractor(arena, targets)
    return Player.ACHILLES if start in winning else Player.TORTOISE


def oracle_termination_winner(model, partition, start_node) -> Player:
    arena, start = unfold_arena(model, partition, start_node)
    exits = set()
    for comp in model.components:
        exits.update(node(x) for x in comp.exits)
    targets = [cfg for cfg in arena.states if not cfg.context and cfg.location in exits]
    winning, _ = attractor(arena, targets)
    return Player.ACHILLES if start in winning else Player.TORTOISE
