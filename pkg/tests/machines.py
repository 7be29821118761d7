"""Corpus of two-counter machines used across the test suite.

The halting corpus stays under 20 executed instructions per machine and
exercises both counters and every instruction kind; the non-halting
corpus loops forever in distinct shapes.
"""

from rhagames.tcm import Dec, Halt, Inc, TwoCounterMachine, ZeroCheck


def halting_corpus():
    """Ten halting machines with at most 20 executed steps."""
    return [
        # inc c1 then halt                                            (2 steps)
        TwoCounterMachine((Inc("c1", 1), Halt())),
        # inc c2 then halt                                            (2 steps)
        TwoCounterMachine((Inc("c2", 1), Halt())),
        # inc both, dec c1                                            (4 steps)
        TwoCounterMachine((Inc("c1", 1), Inc("c2", 2), Dec("c1", 3), Halt())),
        # pump c1 to 2, drain via zero-check loop                     (8 steps)
        TwoCounterMachine((
            Inc("c1", 1), Inc("c1", 2),
            ZeroCheck("c1", 3, 4), Dec("c1", 2), Halt(),
        )),
        # pump c2 to 2, drain via zero-check loop                     (8 steps)
        TwoCounterMachine((
            Inc("c2", 1), Inc("c2", 2),
            ZeroCheck("c2", 3, 4), Dec("c2", 2), Halt(),
        )),
        # zero branch taken immediately on c1                         (2 steps)
        TwoCounterMachine((ZeroCheck("c1", 0, 1), Halt())),
        # zero branch taken immediately on c2                         (2 steps)
        TwoCounterMachine((ZeroCheck("c2", 0, 1), Halt())),
        # inc/dec round trips on both counters                        (5 steps)
        TwoCounterMachine((
            Inc("c1", 1), Dec("c1", 2), Inc("c2", 3), Dec("c2", 4), Halt(),
        )),
        # move c1 into c2: pump 2, transfer loop                     (13 steps)
        TwoCounterMachine((
            Inc("c1", 1), Inc("c1", 2),
            ZeroCheck("c1", 3, 5), Dec("c1", 4), Inc("c2", 2), Halt(),
        )),
        # interleave counters, drain c2                              (10 steps)
        TwoCounterMachine((
            Inc("c2", 1), Inc("c1", 2), Inc("c2", 3),
            ZeroCheck("c2", 4, 5), Dec("c2", 3), Halt(),
        )),
    ]


def nonhalting_corpus():
    """Five machines whose unique run never reaches HALT."""
    return [
        # zero-check self-loop on the zero branch
        TwoCounterMachine((ZeroCheck("c1", 1, 0), Halt())),
        # inc/dec ping-pong on c1
        TwoCounterMachine((Inc("c1", 1), Dec("c1", 0), Halt())),
        # c2 grows forever
        TwoCounterMachine((Inc("c2", 0), Halt())),
        # grow c1 and keep re-checking the positive branch
        TwoCounterMachine((Inc("c1", 1), ZeroCheck("c1", 0, 2), Halt())),
        # alternate counters forever
        TwoCounterMachine((Inc("c1", 1), Inc("c2", 2), Dec("c1", 3), Dec("c2", 0), Halt())),
    ]
