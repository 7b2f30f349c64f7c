"""End-to-end walkthrough on synthetic evolving subspaces.

Generates the default dataset (five 4-dimensional subspaces of R^30, 21
points each, drifting over 10 steps), fits the continuous-time affinity
dynamic, then clusters at every observed time and prints an accuracy
table next to the static sparse baseline.

Run from the repository root:

    python3 demos/synthetic_pipeline.py
"""

import numpy as np

from evosc import (Rng, SscConfig, SynthConfig, TrainConfig, affinity,
                   clustering_accuracy, generate, init_params, mat,
                   spectral_cluster, ssc_solve, train)
from evosc.odesolve import ode_solve
from evosc.train import initial_state


def main():
    print("generating dataset ...")
    data = generate(SynthConfig(seed=0))
    print(f"  {data.n_steps} snapshots of shape "
          f"{data.n_features} x {data.n_points}")

    cfg = TrainConfig(lam=1.0, epochs=45)
    rng = Rng(0)
    params0 = init_params(rng, data.n_points, data.n_features, hidden=40, layers=2)

    print("training the affinity dynamic (this takes a minute or two) ...")
    params, report = train(data, params0, cfg)
    final = report.epochs[-1]
    print(f"  final loss {final['total']:.4f}, per-entry residual MSE "
          f"{final['mse']:.5f}, convergence epoch {report.convergence_epoch}")

    h0 = initial_state(params, cfg)
    states = ode_solve(h0, params, data.control_path(), data.timestamps, cfg.solve)

    crng = Rng(0)
    print("\n  time   ours    static-ssc")
    for t, h in zip(data.timestamps, states):
        a = affinity(mat(h.value))
        ours = clustering_accuracy(spectral_cluster(a, 5, crng), data.labels)
        x = data.snapshots[int(round(t * data.n_steps)) - 1]
        c = ssc_solve(x, SscConfig(lam=10.0, max_iters=500))
        ssc = clustering_accuracy(spectral_cluster(affinity(c), 5, crng), data.labels)
        print(f"  {t:.1f}    {ours:.3f}   {ssc:.3f}")


if __name__ == "__main__":
    main()
