"""Scan the rank-one dilation of A (+) B over random pairs of bases.

For every (m, seed) this prints the commutator of A (+) B, the compression
error ||V^* C V - (A (+) B)||, the exact test on C and the numerical
membership verdict for A (+) B with and without facial reduction.

    python3 scripts/counterexample_scan.py --m 2 3 --seeds 5
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from qmagic import construct, decompose, linalg
from qmagic.mconv import compress
from qmagic.squares import classify


@dataclass
class ScanConfig:
    halves: list[int] = field(default_factory=lambda: [2, 3])
    seeds: int = 3
    max_iter: int = 20_000
    # the plain solver at n = 6 carries 720 blocks; keep it optional
    plain_max_n: int = 4


def scan(cfg: ScanConfig) -> list[dict]:
    rows = []
    for m in cfg.halves:
        for seed in range(-1, cfg.seeds):
            if seed < 0:
                b = construct.build_counterexample(m)
                label = "default"
            else:
                b = construct.build_counterexample(
                    m, linalg.random_haar_basis(m, 2 * seed), linalg.random_haar_basis(m, 2 * seed + 1)
                )
                label = f"haar/{seed}"
            row = {
                "m": m,
                "bases": label,
                "commutator": classify(b.direct_sum).residuals["commutator"],
                "compress_err": compress(b.dilation, b.contraction).distance(b.direct_sum),
                "exact_on_C": decompose.rank_one_semiclassical_test(b.dilation).is_semiclassical,
            }
            for fr in (True, False):
                if not fr and b.n > cfg.plain_max_n:
                    row["plain"] = "skipped"
                    continue
                t0 = time.perf_counter()
                v = decompose.semiclassical_membership(b.direct_sum, max_iter=cfg.max_iter, facial_reduction=fr)
                key = "reduced" if fr else "plain"
                row[key] = f"{v.status.value} res={v.residual:.3g} it={v.iterations} ({time.perf_counter() - t0:.2f}s)"
            rows.append(row)
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--m", type=int, nargs="+", default=ScanConfig().halves)
    p.add_argument("--seeds", type=int, default=ScanConfig.seeds)
    p.add_argument("--max-iter", type=int, default=ScanConfig.max_iter)
    args = p.parse_args()
    cfg = ScanConfig(halves=args.m, seeds=args.seeds, max_iter=args.max_iter)
    for row in scan(cfg):
        print(
            f"m={row['m']} {row['bases']:>8}  comm={row['commutator']:.3f}  "
            f"compress={row['compress_err']:.1e}  exact(C)={row['exact_on_C']}\n"
            f"    reduced: {row['reduced']}\n    plain:   {row['plain']}"
        )


if __name__ == "__main__":
    main()
