"""Draw one realization of each bundled cluster process and summarize it.

Run: python demos/simulate_clusters.py
"""

import numpy as np

from renewalcluster import (
    Exponential,
    PoissonCount,
    RngStream,
    bartlett_lewis_preset,
    gated_cluster_preset,
    guard_band,
    sample_delayed_marked_renewal,
    sample_renewal_cluster_process,
)


def describe(name, pattern):
    pts = pattern.points
    print(f"{name}: {len(pattern)} points on ({pattern.window[0]}, {pattern.window[1]}]")
    if len(pattern):
        print(f"  first/last point: {pts[0]:.3f} / {pts[-1]:.3f}")
        print(f"  mean nearest gap: {np.diff(pts).mean():.3f}")
    print(f"  overflow tally (points dropped at the edges): {pattern.overflow}")


def main():
    rng = RngStream(2024)

    gated = gated_cluster_preset()
    print(f"gated preset guard band: {guard_band(gated):.2f}")
    describe("gated clusters on (0, 100]",
             sample_renewal_cluster_process(gated, 0.0, 100.0, rng.substream(0)))

    bl = bartlett_lewis_preset(1.0, PoissonCount(1.0), Exponential(1.0))
    describe("Poisson parents with step clusters on (0, 100]",
             sample_renewal_cluster_process(bl, 0.0, 100.0, rng.substream(1)))

    # the marked view keeps each arrival's gap, size, and offsets
    marked = sample_delayed_marked_renewal(gated, 30.0, 0.0, rng.substream(2))
    print(f"\nmarked view, first arrivals of {len(marked)}:")
    for a in marked.arrivals[:5]:
        print(
            f"  epoch {a.epoch:7.3f}  gap {a.interarrival:5.3f}  "
            f"cluster size {a.cluster_size}"
        )


if __name__ == "__main__":
    main()
