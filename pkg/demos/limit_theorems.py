"""Monte Carlo checks of the long-run limits: window means, void
probabilities, the forward recurrence CDF, and the renewal convolution.

Run: python demos/limit_theorems.py
"""

import numpy as np

from renewalcluster import (
    Exponential,
    PoissonCount,
    StepFunction,
    bartlett_lewis_preset,
    bartlett_lewis_void_probability,
    estimate_renewal_function,
    estimate_void_probability,
    estimate_window_mean,
    gated_cluster_preset,
    key_renewal_convolve,
    key_renewal_limit,
    stream_for,
)


def main():
    gated = gated_cluster_preset()
    rep = estimate_window_mean(gated, 200.0, 1.0, 4000, stream_for(0, "demo-window"))
    print(f"window mean at t=200: {rep.estimate:.4f} +- {rep.std_error:.4f} "
          f"(limit {rep.target})")

    bl = bartlett_lewis_preset(1.0, PoissonCount(1.0), Exponential(1.0))
    void = estimate_void_probability(bl, 100.0, 1.0, 20_000, stream_for(0, "demo-void"))
    closed = bartlett_lewis_void_probability(1.0, 1.0, lambda y: np.exp(-y), 1.0)
    print(f"void probability: empirical {void.estimate:.4f}, closed form {closed:.5f}")

    # renewal convolution against its key-renewal limit
    g = StepFunction(((0.0, 1.0, 1.0), (2.0, 4.0, 0.5)))
    grid = np.array([196.0, 198.0, 199.0, 200.0])
    tab = estimate_renewal_function(gated, grid, 10_000, stream_for(0, "demo-renewal"))
    value = key_renewal_convolve(tab, g, 200.0)
    print(f"renewal convolution at t=200: {value:.4f} "
          f"(limit {key_renewal_limit(gated, g):.4f})")


if __name__ == "__main__":
    main()
