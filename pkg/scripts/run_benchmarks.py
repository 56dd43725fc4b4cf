#!/usr/bin/env python3
"""
Benchmark script for roofcoh sweeps and the roof optimizer.
"""

import argparse
import os
import sys
import time
from typing import Dict, List, Tuple

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from roofcoh import FORMATION, RoofConfig, SweepSpec, roof_value, run_sweep
from roofcoh.utils.sampling import ginibre_mixed

# (label, spec, runtime target in seconds)
SWEEP_CASES: List[Tuple[str, SweepSpec, float]] = [
    ("chain rule 2x2", SweepSpec(dims=[2, 2], count=1000, inequalities=["bipartite-sufficient"]), 10.0),
    ("chain rule 3x3", SweepSpec(dims=[3, 3], count=1000, inequalities=["bipartite-sufficient"]), 10.0),
    ("tripartite 2x2x2", SweepSpec(dims=[2, 2, 2], count=1000, inequalities=["tripartite"]), 60.0),
    ("tripartite 2x3x2", SweepSpec(dims=[2, 3, 2], count=500, inequalities=["tripartite"]), 60.0),
    ("npartite 2x2x2x2", SweepSpec(dims=[2, 2, 2, 2], count=1000, inequalities=["npartite"]), 60.0),
    ("product half 2x3", SweepSpec(dims=[2, 3], count=1000, measure="half",
                                   inequalities=["product-additivity"]), 30.0),
]


def benchmark_sweeps(workers: int) -> Dict[str, Tuple[float, float, float]]:
    """Time the acceptance sweeps"""
    print("Benchmarking sweeps...")
    results = {}
    for label, spec, target in SWEEP_CASES:
        start_time = time.time()
        result = run_sweep(spec, workers=workers)
        duration = time.time() - start_time
        min_gap = min(r.gap for r in result.reports)
        results[label] = (duration, target, min_gap)
        print(f"  {label}: {duration:.2f} s (target {target:.0f} s), min gap {min_gap:.3e}")
    return results


def benchmark_roof(dims: List[int], restarts: List[int]) -> Dict[Tuple[int, int], float]:
    """Time single roof evaluations on Ginibre rank-2 states"""
    print("Benchmarking roof optimizer...")
    results = {}
    for dim in dims:
        rho = ginibre_mixed(dim, 2, seed=7)
        for n in restarts:
            start_time = time.time()
            value = roof_value(rho, FORMATION, RoofConfig(restarts=n)).value
            duration = time.time() - start_time
            results[(dim, n)] = duration
            print(f"  dim {dim}, {n} restarts: {duration:.2f} s, value {value:.8f}")
    return results


def print_sweep_results(results: Dict[str, Tuple[float, float, float]]):
    print("\nSweep Benchmarks")
    print("=" * 60)
    print(f"{'Case':<20} {'Duration (s)':<14} {'Target (s)':<12} {'Status':<8}")
    print("-" * 60)
    for label, (duration, target, _) in results.items():
        status = "ok" if duration <= target else "SLOW"
        print(f"{label:<20} {duration:<14.2f} {target:<12.0f} {status:<8}")


def main():
    parser = argparse.ArgumentParser(description="roofcoh Benchmark Suite")
    parser.add_argument("--sweeps", action="store_true", help="Benchmark acceptance sweeps")
    parser.add_argument("--roof", action="store_true", help="Benchmark the roof optimizer")
    parser.add_argument("--all", action="store_true", help="Run all benchmarks")
    parser.add_argument("--workers", type=int, default=None, help="Sweep worker processes")

    args = parser.parse_args()

    if not any([args.sweeps, args.roof, args.all]):
        args.all = True

    print("roofcoh Benchmark Suite")
    print("=" * 60)

    if args.all or args.sweeps:
        print_sweep_results(benchmark_sweeps(args.workers))

    if args.all or args.roof:
        benchmark_roof([2, 4, 8], [1, 8, 32])

    print("\nBenchmarking completed")


if __name__ == "__main__":
    main()
