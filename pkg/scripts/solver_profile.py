"""Iterations and runtime of the membership solver on feasible inputs.

Compares the solver with and without the low-rank refinement step on
seeded semiclassical squares.

    python3 scripts/solver_profile.py --n 4 --s 3 --count 3
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from qmagic import construct, decompose


@dataclass
class ProfileConfig:
    n: int = 4
    s: int = 3
    count: int = 3
    seed: int = 0
    max_iter: int = 20_000


def profile(cfg: ProfileConfig, refine: bool) -> list[tuple[int, str, float, int, float]]:
    rows = []
    for k in range(cfg.count):
        seed = cfg.seed + k
        a = construct.assemble(construct.random_semiclassical(cfg.n, cfg.s, seed))
        t0 = time.perf_counter()
        v = decompose.semiclassical_membership(a, max_iter=cfg.max_iter, refine=refine)
        rows.append((seed, v.status.value, v.residual, v.iterations, time.perf_counter() - t0))
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for name, default in vars(ProfileConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = ProfileConfig(**vars(p.parse_args()))
    for refine in (True, False):
        print(f"refine={refine}")
        for seed, status, res, it, dt in profile(cfg, refine):
            print(f"  seed {seed:3d}  {status:<16} residual {res:.2e}  iterations {it:6d}  {dt:6.2f}s")


if __name__ == "__main__":
    main()
