#!/usr/bin/env python3
"""Communication graphs, their weight matrices, and mixing speed.

Builds the standard topologies at N = 16, prints each one's
second-largest eigenvalue modulus (smaller = faster information
spread), and checks the cumulative mixing deviation against its
4 log(N) / (1 - lambda2) ceiling.
"""

import numpy as np

from decbandits.network import (
    Topology,
    build_metropolis,
    mixing_deviation,
    second_eigenvalue_modulus,
)


def spectral_table(n=16):
    topologies = [
        ("complete", Topology.complete(n)),
        ("3-regular ring", Topology.k_regular(n, 3)),
        ("4x4 grid", Topology.grid(4, 4)),
        ("cycle", Topology.cycle(n)),
    ]
    print(f"{'topology':<16} {'lambda2':>10} {'1-lambda2':>10} {'bound':>9} {'dev(200)':>9}")
    for name, topo in topologies:
        W = build_metropolis(topo)
        lam = second_eigenvalue_modulus(W)
        gap = 1.0 - lam
        bound = 4.0 * np.log(n) / gap
        dev = mixing_deviation(W, 200, agent=0)
        print(f"{name:<16} {lam:>10.4f} {gap:>10.4f} {bound:>9.2f} {dev:>9.2f}")
    print("\ndev(200) = summed distance of agent 0's weight row from uniform")
    print("over 200 rounds; it must stay below the bound column.\n")


def show_metropolis_weights():
    W = build_metropolis(Topology.cycle(5))
    print("Metropolis weights of the 5-cycle (rows sum to 1, symmetric):")
    with np.printoptions(precision=3, suppress=True):
        print(W)


if __name__ == "__main__":
    spectral_table()
    show_metropolis_weights()
