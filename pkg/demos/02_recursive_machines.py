#!/usr/bin/env python3
"""Recursive state machines: call/return semantics, reachability,
termination, and the exit-set summary game solver.

The machine below has a component that calls itself, so its
configuration space is infinite; the summary solver still decides the
games in finite time.
"""

from rhagames.games import Player
from rhagames.rsm import (
    RsmComponent,
    RsmModel,
    call,
    node,
    reachable,
    ret,
    rsm_step,
    initial_config,
    solve_reachability_game,
    solve_termination_game,
    terminates,
    validate,
)

ACH, TOR = Player.ACHILLES, Player.TORTOISE

# "Outer" calls "Inner" through box k; Inner either exits immediately or
# recurses through its own box r before exiting.
inner = RsmComponent(
    name="Inner", nodes=("ie", "ix"), entries=("ie",), exits=("ix",), boxes={"r": "Inner"}
)
inner.transitions = {
    (node("ie"), "again"): call("r", "ie"),
    (node("ie"), "leave"): node("ix"),
    (ret("r", "ix"), "back"): node("ix"),
}
outer = RsmComponent(
    name="Outer", nodes=("oe", "win", "ox"), entries=("oe",), exits=("ox",), boxes={"k": "Inner"}
)
outer.transitions = {
    (node("oe"), "invoke"): call("k", "ie"),
    (ret("k", "ix"), "done"): node("win"),
    (node("win"), "out"): node("ox"),
}
model = RsmModel([outer, inner])
assert validate(model) == []

# Walk the first few configurations by hand.
config = initial_config("oe")
for action in ("invoke", "call", "again", "call", "leave", "ret"):
    config = rsm_step(model, config, action)
    print(f"after {action:7s}: context={list(config.context)} at {config.location}")

print("reachable(oe -> win):", reachable(model, "oe", [node("win")]))
print("terminates(oe):      ", terminates(model, "oe"))

# Now make it a game: Tortoise owns the Inner entry, so Tortoise decides
# whether to recurse.  Recursing forever avoids the exit, so Tortoise
# wins both objectives from the outer entry.
partition = {loc: ACH for loc in model.all_locations()}
partition[node("ie")] = TOR
winner, table = solve_reachability_game(model, partition, "oe", [node("win")])
print("reachability winner with Tortoise steering Inner:", winner.value)
winner, _ = solve_termination_game(model, partition, "oe")
print("termination winner:                              ", winner.value)

# Hand the entry back to Achilles and both games flip.
partition[node("ie")] = ACH
winner, _ = solve_reachability_game(model, partition, "oe", [node("win")])
print("reachability winner with Achilles steering:      ", winner.value)
