#!/usr/bin/env python3
"""Finite reachability games: the attractor solver and scripted playouts.

Achilles wants to reach the goal, Tortoise wants to avoid it forever.
The attractor computes Achilles' winning region together with a
positional strategy witnessing it.
"""

from rhagames.games import FiniteArena, Player, attractor, play, positional, stop_index

ACH, TOR = Player.ACHILLES, Player.TORTOISE

# A five-state arena.  From "start" Achilles may walk into Tortoise
# territory ("trap") or take the safe two-step corridor.
arena = FiniteArena(
    states=["start", "corridor", "trap", "goal", "pit"],
    transitions=[
        ("start", "safe", "corridor"),
        ("start", "greedy", "trap"),
        ("corridor", "walk", "goal"),
        ("trap", "mercy", "goal"),
        ("trap", "drop", "pit"),
        ("pit", "stay", "pit"),
    ],
    owner={"start": ACH, "corridor": ACH, "trap": TOR, "goal": ACH, "pit": TOR},
)

winning, strategy = attractor(arena, ["goal"])
print("Achilles wins from:", sorted(winning))
print("witness strategy:  ", strategy)

# The trap is not in the winning set: Tortoise simply drops to the pit.
assert "trap" not in winning

# Play the witness strategy against a Tortoise that always drops.
run = play(
    arena,
    "start",
    positional(strategy, fallback_first=arena),
    positional({"trap": "drop", "pit": "stay"}),
    max_steps=10,
)
print("playout:", " -> ".join(str(s) for s in run.states))
print("goal reached at index:", stop_index(run, ["goal"]))
