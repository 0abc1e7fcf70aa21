import re

_CRITERION_TITLES = {
    1: "theorem orderings on 1000 random stake vectors",
    2: "Zipf halving for exact power-law snapshots",
    3: "Shapley sampled-vs-exact oracle equivalence",
    4: "Nakamoto greedy vs exhaustive subsets",
    5: "stake-Shapley Pearson correlation",
    6: "compounding Gini dynamics over 100 epochs",
    7: "Sybil deterrent closed forms",
    8: "archived chain data reproduction",
    9: "seeded byte determinism",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    outcomes: dict[int, set[str]] = {}
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "skipped":
                continue
            match = re.search(r"test_acceptance\.py::.*test_criterion_(\d+)", rep.nodeid)
            if match:
                outcomes.setdefault(int(match.group(1)), set()).add(outcome)
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(outcomes):
        seen = outcomes[num]
        if "failed" in seen:
            status = "FAIL"
        elif "passed" in seen:
            status = "PASS"
        else:
            status = "SKIP"
        terminalreporter.write_line(
            f"criterion {num}: {status} - {_CRITERION_TITLES.get(num, '')}"
        )
