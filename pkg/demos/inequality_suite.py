"""Run the inequality verification suite and print the report.

Uses a reduced sample count so the demo finishes quickly; the acceptance
tests run the full 100000-sample version. Every check reports the minimum
margin found, already net of the certified numerical error, so any
positive number means the inequality held with room to spare everywhere
the grid looked.
"""

import time

from poispred import run_all

t0 = time.time()
report = run_all(samples=20_000, seed=42)
print(report.to_text())
print(f"\nelapsed: {time.time() - t0:.1f}s")

worst = min(report.checks, key=lambda c: c.min_margin)
print(f"tightest margin: {worst.name} at {worst.min_margin:.3e} (point {worst.worst_point})")
