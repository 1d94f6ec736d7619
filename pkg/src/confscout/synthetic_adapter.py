"""Process-protocol adapter around the synthetic solver.

    python -m confscout.synthetic_adapter --instance I --settings S --seed N \\
        --time-limit T --output OUT --config-id C [--noise X]

Writes ``{"status": "ok", "gamma": ...}`` to OUT.  Serves as the reference
shim for attaching a real solver.
"""

import argparse
import json
import sys

from .milp import InstanceError, load_instance
from .synthetic import DEFAULT_NOISE, synthetic_gamma


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="confscout.synthetic_adapter", description=__doc__.splitlines()[0])
    ap.add_argument("--instance", required=True, help="instance file (.json or .mps)")
    ap.add_argument("--settings", required=True, help="settings file (read but unused by the synthetic solver)")
    ap.add_argument("--seed", type=int, required=True, help="run seed")
    ap.add_argument("--time-limit", type=float, required=True, help="time limit in seconds (unused)")
    ap.add_argument("--output", required=True, help="where to write the result document")
    ap.add_argument("--config-id", type=int, required=True, help="penalty-table column")
    ap.add_argument("--noise", type=float, default=DEFAULT_NOISE, help="noise amplitude")
    args = ap.parse_args(argv)
    try:
        inst = load_instance(args.instance)
        with open(args.settings, encoding="utf-8"):
            pass
        doc = {"status": "ok", "gamma": synthetic_gamma(inst, args.config_id, args.seed, args.noise)}
    except (OSError, InstanceError, ValueError) as exc:
        doc = {"status": "error", "message": str(exc)}
    with open(args.output, "w", encoding="utf-8") as f:
        json.dump(doc, f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
