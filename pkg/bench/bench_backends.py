#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Generates a synthetic population once, then runs the full per-ego metric
pass (components, clip decomposition, bridging) under each backend by
swapping the kernel bindings in place.  Outputs a small table plus a
cross-check that both backends produced identical reports.

Usage: python bench/bench_backends.py [--egos N] [--seed S]
"""

import argparse
import time

from egodiversity import _kernels_py, kernels
from egodiversity.bridges import BridgeConfig
from egodiversity.diversity import compute_report
from egodiversity.kclip import ClipConfig
from egodiversity.synthgen import PopulationGenSpec, gen_population

KERNEL_NAMES = (
    "induced_edges",
    "weak_labels",
    "scc_labels",
    "kclip_run",
    "jaccard_bridges",
    "jaccard_merge_count",
)


def _backends():
    out = {"python": _kernels_py}
    try:
        from egodiversity import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out


def _swap(impl):
    for name in KERNEL_NAMES:
        setattr(kernels, name, getattr(impl, name))


def run(n_egos: int, seed: int, max_followers: int) -> None:
    spec = PopulationGenSpec(
        n_egos=n_egos,
        diversity_effect=0.5,
        noise_sigma=0.05,
        seed=seed,
        max_followers=max_followers,
    )
    print(f"generating population: {n_egos} egos (seed {seed}) ...")
    g, _ = gen_population(spec)
    print(f"graph: {g.n_nodes} nodes, {g.n_edges} edges")

    clip = ClipConfig(k=5)
    bridge = BridgeConfig()
    ks = [2, 5]
    results = {}
    timing = {}
    backends = _backends()
    if "cython" not in backends:
        print("note: compiled kernels not built; benchmarking python only")

    for name, impl in backends.items():
        _swap(impl)
        # warm-up over a slice so first-call overheads stay out of the timing
        for ego in range(min(200, n_egos)):
            compute_report(g, ego, clip=clip, bridge=bridge, ks=ks)
        start = time.perf_counter()
        reports = [
            compute_report(g, ego, clip=clip, bridge=bridge, ks=ks)
            for ego in range(n_egos)
        ]
        timing[name] = time.perf_counter() - start
        results[name] = reports

    _swap(backends.get("cython", _kernels_py))  # leave the fast one active

    print()
    print(f"{'backend':<10} {'total s':>10} {'egos/s':>12}")
    for name, secs in timing.items():
        print(f"{name:<10} {secs:>10.3f} {n_egos / secs:>12.0f}")
    if len(timing) == 2:
        print(f"\nspeedup (python / cython): {timing['python'] / timing['cython']:.1f}x")
        same = results["python"] == results["cython"]
        print(f"identical reports across backends: {same}")
        if not same:
            raise SystemExit("backend outputs diverged")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--egos", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-followers", type=int, default=20,
                    help="larger neighborhoods shift work into the kernels")
    args = ap.parse_args()
    run(args.egos, args.seed, args.max_followers)


if __name__ == "__main__":
    main()
