#!/usr/bin/env python3
"""The undecidability gadgets at desk scale.

A two-counter machine is compiled into a reachability-game arena on a
recursive automaton: three clocks (rta3) or four stopwatches with
glitch-free calls (rsa4).  After k instructions the clocks encode the
machine state exactly:

    x = 1 / (2^(k+c1) * 3^(k+c2)),   y = 1 / 2^k,   z = 0.

Achilles simulates the machine by choosing delays; Tortoise may at any
point step into a check component.  Checks pass (ending the game in
Achilles' favour at a "pass" node) exactly when the simulation was
faithful, and every faithful playout stays below 4 time units.
"""

from fractions import Fraction

from rhagames.compiler import compile, expected_valuation
from rhagames.harness import (
    check_encoding,
    check_time_ledger,
    deviated_achilles,
    enumerate_verify_addresses,
    faithful_achilles,
    playout,
    reachable_final_bounded,
    tortoise_skip_all,
    tortoise_verify_at,
)
from rhagames.tcm import parse_text

machine = parse_text(
    "L0: INC c1 GOTO L1\n"
    "L1: INC c2 GOTO L2\n"
    "L2: DEC c1 GOTO L3\n"
    "L3: HALT\n"
)

for target in ("rta3", "rsa4"):
    arena = compile(machine, target)
    print(f"== target {target}: {len(arena.model.components)} components, "
          f"variables {arena.model.variables}")

    # Faithful simulation against a Tortoise that never verifies.
    verdict = playout(arena, faithful_achilles(machine, arena), tortoise_skip_all(arena))
    print(f"   skip-all: {verdict.outcome} at {verdict.location}, "
          f"duration {verdict.elapsed} (< 4)")

    # Every instruction entry carries the exact encoding.
    report = check_encoding(verdict, machine, arena)
    ledger = check_time_ledger(verdict, arena)
    print(f"   encoding exact: {report.ok}; time ledger ok: {ledger.ok}")
    print(f"   encoding after the three instructions: "
          f"{ {k: str(v) for k, v in expected_valuation(3, 0, 1).items()} }")

    # Tortoise verifies the very first division: the check passes and the
    # game ends at a pass node (Achilles still wins).
    verdict = playout(
        arena,
        faithful_achilles(machine, arena),
        tortoise_verify_at(arena, 0, "div1.check1"),
        time_bound=None,
    )
    print(f"   verify step 0 div1: {verdict.outcome} at {verdict.location}, "
          f"duration {verdict.elapsed}")

    # A cheating Achilles (first delay off by 1/64) is caught by the same
    # check: the playout dead-ends and no final location stays reachable.
    cheat = deviated_achilles(machine, arena, 0, Fraction(1, 64))
    verdict = playout(arena, cheat, tortoise_verify_at(arena, 0, "div1.check1"), time_bound=None)
    punished = not reachable_final_bounded(arena, verdict.trace.last(), depth=40)
    print(f"   deviation by 1/64: {verdict.outcome}; punished: {punished}")

    print(f"   addressable verification decisions: "
          f"{len(enumerate_verify_addresses(arena, machine))}")
    print()
