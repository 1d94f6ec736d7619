"""Train on synthetic packing instances and report how much of the single-best-to-oracle gap closes.

    python scripts/run_synthetic_e2e.py [noise ...]
"""

import logging
import sys

from confscout.experiments import gap_closure_experiment


def main(argv):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    for noise in [float(a) for a in argv] or [0.05, 0.0]:
        r = gap_closure_experiment(noise=noise)
        print(f"noise={noise:g} single_best={r.single_best_config} gamma(sbs)={r.gamma_single_best:.1f} "
              f"gamma(model)={r.gamma_model:.1f} gamma(oracle)={r.gamma_oracle:.1f} "
              f"closure={r.closure:.3f} accuracy={r.accuracy:.3f} ({r.seconds:.0f} s)")


if __name__ == "__main__":
    main(sys.argv[1:])
