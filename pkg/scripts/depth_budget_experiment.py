#!/usr/bin/env python3
"""How the multiplicative-depth budget interacts with round count.

Bob keeps masking the same encrypted matrix, so its depth grows by 2 every
round and the round-r score vector sits at level 2r+2. A path graph with k
vertices needs ceil(k/2) rounds, which makes paths a clean probe: sweep
budgets and watch where decryption starts failing, then compare against
refresh mode (fresh matrix per round, score level pinned at 4).
"""
from hechordal.backend import default_params
from hechordal.graphs import builtin_graph
from hechordal.protocol import Outcome, run_local


def outcome_label(verdict):
    if verdict.outcome is Outcome.ABORTED:
        return f"ABORTED@r{verdict.rounds_used}"
    return f"{verdict.outcome.value}/r{verdict.rounds_used}"


def main():
    sizes = (4, 6, 8, 12)
    budgets = (4, 6, 8, 10, 12, 14, None)
    header = "budget".ljust(10) + "".join(f"path-{n}".rjust(14) for n in sizes)

    print("standard mode (score level 2r+2):")
    print(header)
    for budget in budgets:
        row = [("unbounded" if budget is None else str(budget)).ljust(10)]
        for n in sizes:
            verdict, _ = run_local(builtin_graph(f"path-{n}"), default_params(n, budget=budget))
            row.append(outcome_label(verdict).rjust(14))
        print("".join(row))

    print("\nrefresh mode (score level constant 4):")
    print(header)
    for budget in (3, 4, None):
        row = [("unbounded" if budget is None else str(budget)).ljust(10)]
        for n in sizes:
            verdict, _ = run_local(builtin_graph(f"path-{n}"), default_params(n, budget=budget), refresh=True)
            row.append(outcome_label(verdict).rjust(14))
        print("".join(row))

    print("\nreading: path-k needs ceil(k/2) rounds; standard mode needs budget >= 2*rounds+2,")
    print("refresh mode needs budget >= 4 regardless of round count.")


if __name__ == "__main__":
    main()
