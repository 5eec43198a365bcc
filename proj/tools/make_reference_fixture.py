#!/usr/bin/env python3
"""Writes data/reference_records.jsonl: trial records whose pooled confusion
counts per strategy match a fixed target table.

32 sessions, one 20-trial block per strategy (the random block of the last
session has 19 trials, so that condition totals 639). Answers are all
correct and no offer is accepted; theta follows the strategy's rule, with a
zero draw for the random strategy.
"""

import argparse
import json
import random

COUNTS = {
    # shown_wanted, shown_not_wanted, not_shown_not_wanted, not_shown_wanted
    "aligned": (313, 156, 78, 93),
    "random": (214, 140, 91, 194),
    "misaligned": (199, 161, 74, 206),
}
BLOCKS = ["aligned", "misaligned", "random"]
SESSIONS = 32
TRIALS = 20
THETA_INIT = 12.0


def cells(condition, rng):
    sw, snw, nsnw, nsw = COUNTS[condition]
    out = [(True, True)] * sw + [(True, False)] * snw + [(False, False)] * nsnw + [(False, True)] * nsw
    rng.shuffle(out)
    return out


def delta(condition, offered):
    # every answer is correct and nothing is accepted
    aligned = 4.0 if offered else 1.0
    if condition == "aligned":
        return aligned
    if condition == "misaligned":
        return -aligned
    return 0.0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/reference_records.jsonl")
    args = ap.parse_args()

    rng = random.Random(3)
    pools = {c: cells(c, rng) for c in BLOCKS}
    lines = []
    for s in range(SESSIONS):
        sid = "ref-%02d" % s
        for b, condition in enumerate(BLOCKS, start=1):
            pool = pools[condition]
            n = min(TRIALS, len(pool))
            block, pools[condition] = pool[:n], pool[n:]
            theta = THETA_INIT
            for i, (offered, need) in enumerate(block):
                g = b * TRIALS + i
                y = theta + 1.0 if offered else theta - 1.0
                after = theta + delta(condition, offered)
                rec = {
                    "block": b,
                    "condition": condition,
                    "features": {
                        "hover_time_ms": 0,
                        "hovers": 0,
                        "task_difficulty": i % 2,
                        "tonic_difference": 0.0,
                        "ypos_flips": 0,
                    },
                    "low_eda_coverage": False,
                    "outcome": {
                        "answer_correct": True,
                        "chosen_option": 0,
                        "duration_ms": 10000,
                        "help_accepted": False,
                        "help_offered": offered,
                        "reported_load": None,
                        "self_reported_need": need,
                    },
                    "session_id": sid,
                    "spec": {
                        "correct_option": 0,
                        "difficulty": i % 2,
                        "global_index": g,
                        "n_options": 5,
                        "trial_index": i,
                    },
                    "t_trigger_ms": g * 10000 + 1000 if offered else None,
                    "theta_after": after,
                    "theta_before": theta,
                    "triggered": offered,
                    "y_eda": y,
                    "y_final": y,
                    "y_mouse": y - 0.5,
                }
                lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
                theta = after
    assert all(not p for p in pools.values())
    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
