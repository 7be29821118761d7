#!/usr/bin/env python3
"""Two-counter machines: the text format and the deterministic interpreter."""

from rhagames.tcm import format_text, parse_text, tcm_run

# Pump c1 to two, then transfer it into c2 through a zero-check loop.
PROGRAM = """
L0: INC c1 GOTO L1
L1: INC c1 GOTO L2
L2: IFZ c1 THEN L5 ELSE L3
L3: DEC c1 GOTO L4
L4: INC c2 GOTO L2
L5: HALT
"""

machine = parse_text(PROGRAM)
print(format_text(machine))

trace, halted = tcm_run(machine, max_steps=100)
print(f"halted: {halted} after {len(trace) - 1} executed instructions")
for cfg in trace:
    print(f"  L{cfg.pc}: c1={cfg.c1} c2={cfg.c2}")

# A machine that never halts is simply truncated.
looper = parse_text("L0: IFZ c1 THEN L0 ELSE L1\nL1: HALT\n")
trace, halted = tcm_run(looper, max_steps=10)
print(f"\nself-loop: halted={halted}, visited {len(trace)} configurations")
