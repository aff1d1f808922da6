#!/usr/bin/env python3
"""
Generic Arrangement Benchmark
Times the degeneration homotopy on random integer arrangements over a (d, n) grid.

Entries of L are uniform integers in [-20, 20] and u is standard complex
normal; a generic arrangement has C(n, d) solutions, all tracked by
as many paths.  Timings are machine-local and only reported.
"""

import argparse
import logging
import sys
from math import comb
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.core.arrangement import random_integer_arrangement  # noqa: E402
from src.core.errors import ScatteringError  # noqa: E402
from src.core.homotopy import random_complex, track_all  # noqa: E402
from src.utils.config import TrackerConfig  # noqa: E402

logger = logging.getLogger(__name__)


class GenericBenchmark:
    def __init__(self, dims: List[int], sizes: List[int], repeats: int = 1, seed: int = 0,
                 max_solutions: int = 500):
        self.dims = dims
        self.sizes = sizes
        self.repeats = repeats
        self.seed = seed
        self.max_solutions = max_solutions
        self.rows: List[Dict[str, Any]] = []

    def cells(self) -> List[tuple]:
        """Grid cells with d < n whose expected count stays under the cap."""
        return [(d, n) for d in self.dims for n in self.sizes
                if d < n and comb(n, d) <= self.max_solutions]

    def run_cell(self, d: int, n: int, rng: np.random.Generator) -> Dict[str, Any]:
        arrangement = random_integer_arrangement(d, n, rng)
        u = random_complex(rng, n + 1)
        config = TrackerConfig(seed=self.seed)
        try:
            report = track_all(arrangement, u, config=config, rng=rng, bench=True)
        except ScatteringError as e:
            logger.warning(f"d={d}, n={n}: {type(e).__name__}: {e.message}")
            return {'d': d, 'n': n, 'expected': comb(n, d), 'error': type(e).__name__}

        timings = report.timings or {}
        return {
            'd': d,
            'n': n,
            'expected': comb(n, d),
            'paths': report.counts_check['paths'],
            'interior': len(report.interior),
            'failed': report.path_stats['failed'],
            'combinatorics_s': round(timings.get('combinatorics', 0.0), 3),
            'start_s': round(timings.get('start', 0.0), 3),
            'tracking_s': round(timings.get('tracking', 0.0), 3),
            'total_s': round(sum(timings.values()), 3),
        }

    def run(self) -> pd.DataFrame:
        rng = np.random.default_rng(self.seed)
        jobs = [cell for cell in self.cells() for _ in range(self.repeats)]
        for d, n in tqdm(jobs, desc="Benchmark cells"):
            self.rows.append(self.run_cell(d, n, rng))
        return pd.DataFrame(self.rows)

    @staticmethod
    def pivot(frame: pd.DataFrame) -> pd.DataFrame:
        """Median total time per cell laid out as d rows by n columns."""
        if frame.empty or 'total_s' not in frame:
            return frame
        return frame.pivot_table(index='d', columns='n', values='total_s', aggfunc='median')


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description='Time the homotopy on generic arrangements')
    parser.add_argument('--d', type=int, nargs='+', default=[2, 3, 4], help='Ambient dimensions')
    parser.add_argument('--n', type=int, nargs='+', default=[6, 7, 8], help='Values of n (n+1 hyperplanes)')
    parser.add_argument('--repeats', type=int, default=1)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--max-solutions', type=int, default=500, help='Skip cells with more solutions')
    parser.add_argument('--out', type=str, help='CSV file for the raw rows')
    parser.add_argument('--verbose', '-v', action='store_true')
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(asctime)s - %(levelname)s - %(message)s')

    bench = GenericBenchmark(args.d, args.n, args.repeats, args.seed, args.max_solutions)
    frame = bench.run()
    if args.out:
        frame.to_csv(args.out, index=False)
        print(f"✅ Raw timings saved to {args.out}")
    print(frame.to_string(index=False))
    print()
    print(GenericBenchmark.pivot(frame).to_string())
    return 0


if __name__ == "__main__":
    sys.exit(main())
