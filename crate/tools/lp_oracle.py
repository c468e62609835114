#!/usr/bin/env python3
"""Offline LP oracle for the solver acceptance criterion.

Reads tools/lp_instances.json (written by the ignored test
`export_lp_instances` in crates/core/tests/acceptance.rs) and solves each
instance

    min  sum_i t_i
    s.t. t >= +D g,  t >= -D g          (D: zero-extended differences)
         -gamma <= A g - b <= gamma
         -cap <= g <= cap

exactly with scipy's HiGHS backend, then writes the optimal TV values and
minimizers to tools/lp_optima.json. Rerun whenever the instance set changes:

    cargo test -p mstv --test acceptance export_lp_instances -- --ignored
    python3 tools/lp_oracle.py
"""
import json
import pathlib

import numpy as np
from scipy.optimize import linprog

ROOT = pathlib.Path(__file__).resolve().parent


def diff_matrix(m: int) -> np.ndarray:
    """Zero-extended difference operator: (m+1) x m."""
    d = np.zeros((m + 1, m))
    d[0, 0] = 1.0
    for i in range(1, m):
        d[i, i] = 1.0
        d[i, i - 1] = -1.0
    d[m, m - 1] = -1.0
    return d


def solve(inst: dict) -> dict:
    m = inst["m"]
    a = np.array(inst["a"])
    b = np.array(inst["b"])
    gamma = inst["gamma"]
    cap = inst["cap"]
    d = diff_matrix(m)
    k = m + 1  # number of t variables
    # Variables x = [g (m); t (k)].
    c = np.concatenate([np.zeros(m), np.ones(k)])
    a_ub = np.block(
        [
            [d, -np.eye(k)],
            [-d, -np.eye(k)],
            [a, np.zeros((a.shape[0], k))],
            [-a, np.zeros((a.shape[0], k))],
        ]
    )
    b_ub = np.concatenate([np.zeros(2 * k), b + gamma, gamma - b])
    bounds = [(-cap, cap)] * m + [(0, None)] * k
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"seed {inst['seed']}: LP failed: {res.message}")
    g = res.x[:m]
    return {"seed": inst["seed"], "m": m, "tv": float(res.fun), "g": g.tolist()}


def main() -> None:
    instances = json.loads((ROOT / "lp_instances.json").read_text())
    optima = [solve(inst) for inst in instances]
    (ROOT / "lp_optima.json").write_text(json.dumps(optima, indent=1) + "\n")
    print(f"solved {len(optima)} instances")


if __name__ == "__main__":
    main()
