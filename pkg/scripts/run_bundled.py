"""Run every pipeline over the bundled systems and write one JSON report per system."""

import argparse
import time
from importlib import resources
from pathlib import Path

from cstar.cli import Options, parse_system, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("reports"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    failures = 0
    t_all = time.perf_counter()
    for p in sorted(resources.files("cstar.data").iterdir()):
        if not p.name.endswith(".json"):
            continue
        t0 = time.perf_counter()
        rep = run("all", parse_system(p), Options(depth=args.depth, seed=args.seed))
        (args.out / p.name).write_bytes(rep.emit("json"))
        bad = [c.id for c in rep.checks if not c.passed]
        failures += bool(bad) or rep.error is not None
        skipped = ", ".join(rep.data.get("skipped", {})) or "-"
        print(f"{p.stem:28s} {'PASS' if rep.passed else 'FAIL'}  {len(rep.checks):4d} checks  "
              f"{time.perf_counter() - t0:6.2f}s  skipped: {skipped}")
        for cid in bad:
            print(f"    failed: {cid}")
        if rep.error:
            print(f"    error: {rep.error}")
    print(f"total {time.perf_counter() - t_all:.1f}s, {failures} failing systems")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
