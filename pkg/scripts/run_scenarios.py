"""Run every scenario in scripts/scenarios and write reports under out/.

Usage: python scripts/run_scenarios.py [out_dir] [name ...]
"""

import sys
import time
from pathlib import Path

from treeconf.scenario import Scenario, run_scenario

HERE = Path(__file__).parent


def main(argv):
    out = Path(argv[0]) if argv else Path("out")
    wanted = set(argv[1:])
    status = 0
    for path in sorted((HERE / "scenarios").glob("*.json")):
        if wanted and path.stem not in wanted:
            continue
        start = time.perf_counter()
        outcome = run_scenario(Scenario.load(path))
        outcome.write(out / path.stem)
        flag = "REFUTED" if outcome.refuted else "ok"
        print(f"{path.stem:28s} {flag:8s} {time.perf_counter() - start:6.2f}s  {outcome.report['verdict']}")
        status = max(status, 2 if outcome.refuted else 0)
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
