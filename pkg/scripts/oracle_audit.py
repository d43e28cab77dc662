#!/usr/bin/env python3
"""Cross-validate the sideband solver against time-domain integration.

For each selected preset: seed the integrator on the stable branch, drive it
with a weak signal, demodulate the settled tail and compare the extracted
upper-sideband amplitude against the linear-solve backend.  Also reports the
linearity defect when the signal amplitude is doubled.

Usage: python scripts/oracle_audit.py [preset ...]   (default: 4b 5a 9b)
"""
import sys
import time

from qdresponse.model import default_signal_amplitude
from qdresponse.oracle import (
    demodulate_sidebands,
    integrate_mean_field,
    max_step,
    steady_state_vector,
)
from qdresponse.presets import get_preset
from qdresponse.response import solve_sidebands
from qdresponse.steady import Stability, solve_steady_branches


def audit(figure_id: str) -> float:
    preset = get_preset(figure_id)
    p = preset.params.replace(delta0=preset.oracle_delta0)
    p = p.replace(es0=default_signal_amplitude(p))
    stable = [b for b in solve_steady_branches(p)
              if b.stability is Stability.STABLE]
    branch = min(stable, key=lambda b: b.w0)
    dt = min(0.01, max_step(p))
    init = steady_state_vector(branch)
    t0 = time.perf_counter()
    one = demodulate_sidebands(
        integrate_mean_field(p, init, 260.0, dt, es0=p.es0), p.delta0)
    two = demodulate_sidebands(
        integrate_mean_field(p, init, 260.0, dt, es0=2.0 * p.es0), p.delta0)
    elapsed = time.perf_counter() - t0
    bands = solve_sidebands(p, branch)
    dev = abs(one.a_plus - bands.a_plus) / abs(bands.a_plus)
    lin = abs(two.a_plus / one.a_plus - 2.0)
    print(f"{figure_id:>4}  delta0={p.delta0:6.2f}  a+ dev={dev:.3e}  "
          f"linearity defect={lin:.3e}  ({elapsed:.1f}s)")
    return max(dev, lin)


def main() -> int:
    ids = sys.argv[1:] or ["4b", "5a", "9b"]
    worst = max(audit(fid) for fid in ids)
    print(f"worst deviation: {worst:.3e}")
    return 0 if worst < 1e-3 else 2


if __name__ == "__main__":
    sys.exit(main())
