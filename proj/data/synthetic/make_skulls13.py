#!/usr/bin/env python3
"""Generate the synthetic 13-skull fixture (skulls13.csv, skulls13.meta).

Values are invented. Only the shape is realistic: 13 labelled skulls, 47
variables of which 27 form the "paper27" set, and per-skull missing counts
on those 27 that match the reference audit. Rerun to regenerate; output is
deterministic.
"""

import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

SKULLS = [
    # label, group, missing count among the 27
    ("Spy I", "neanderthalensis", 2),
    ("Spy II", "neanderthalensis", 4),
    ("Krapina C", "neanderthalensis", 11),
    ("Krapina D", "neanderthalensis", 16),
    ("Neandertal", "neanderthalensis", 0),
    ("Gibraltar", "neanderthalensis", 13),
    ("Pithecanthropus", "erectus", 6),
    ("Kannstatt", "sapiens", 5),
    ("Galey Hill", "sapiens", 15),
    ("Brunn", "sapiens", 15),
    ("Brüx", "sapiens", 0),
    ("Egisheim", "sapiens", 18),
    ("Nowosiółka", "sapiens", 0),
]

# name -> (sapiens mean, neanderthal shift, erectus shift, noise sd)
BASE = {
    "L1": (186, 14, 8, 4), "L2": (180, 12, 6, 4), "L3": (100, 8, 4, 3), "L4": (96, 9, 6, 3),
    "L5": (112, 7, 3, 3), "L6": (120, 6, 10, 3), "L7": (38, 4, 3, 2), "L8": (52, 5, 4, 2),
    "B1": (142, 6, -8, 4), "B2": (98, 8, -6, 3), "B3": (118, 10, 2, 3), "B4": (128, 8, -4, 3),
    "B5": (112, 6, 0, 3), "B6": (26, 3, 2, 1.5),
    "H1": (132, -20, -30, 4), "H2": (112, -16, -24, 4), "H3": (62, -8, -12, 3),
    "H4": (118, -14, -20, 4),
    "C1": (520, 20, 0, 10), "C2": (370, 10, 5, 8), "C3": (305, 12, 8, 8),
}
ANGLES = {"A1": (82, -12, -18, 3), "A2": (62, -8, -10, 3), "A3": (48, -10, -14, 3)}
RATIOS = {"I1": ("B1", "L1"), "I2": ("H1", "L1"), "I3": ("B2", "B1")}
EXTRAS = [f"X{k}" for k in range(1, 21)]

# Always observed, neither ratios nor ratio components: every pair shares
# at least these under every variable mode, set and filter.
CORE = {"L2", "B3", "H2"}
# The focal sits between the two clades.
FOCAL_MIX = 0.45


def main():
    rng = random.Random(1909)
    paper27 = list(BASE) + list(ANGLES) + list(RATIOS)
    variables = paper27 + EXTRAS
    assert len(paper27) == 27 and len(variables) == 47

    means = dict(BASE) | dict(ANGLES)
    rows = []
    for label, group, n_missing in SKULLS:
        if label == "Nowosiółka":
            w = {"neanderthalensis": FOCAL_MIX, "erectus": 0.0}
        else:
            w = {"neanderthalensis": 1.0 if group == "neanderthalensis" else 0.0,
                 "erectus": 1.0 if group == "erectus" else 0.0}
        true = {}
        for name, (mu, dn, de, sd) in means.items():
            true[name] = mu + w["neanderthalensis"] * dn + w["erectus"] * de + rng.gauss(0, sd)
        for name, (num, den) in RATIOS.items():
            true[name] = 100 * true[num] / true[den]
        for k, name in enumerate(EXTRAS):
            true[name] = 40 + 3 * k + 6 * w["neanderthalensis"] + rng.gauss(0, 2)

        candidates = [v for v in paper27 if v not in CORE]
        missing = set(rng.sample(candidates, n_missing))
        missing |= {x for x in EXTRAS if rng.random() < 0.55}

        cells = []
        for name in variables:
            if name in missing:
                cells.append("")
                continue
            value = true[name]
            if name in RATIOS:
                cells.append(f"{value:.1f}")
            elif name not in CORE and name in BASE and rng.random() < 0.06:
                lo = round(value) - rng.randint(1, 3)
                hi = round(value) + rng.randint(1, 3)
                dash = "–" if rng.random() < 0.5 else "-"
                cells.append(f"{lo}{dash}{hi}")
            else:
                cells.append(f"{round(value)}")
        rows.append((label, group, cells))

    def q(s):
        return f'"{s}"' if ("," in s or '"' in s) else s

    with open(HERE / "skulls13.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(["label"] + variables) + "\n")
        for label, _, cells in rows:
            f.write(",".join([q(label)] + cells) + "\n")

    with open(HERE / "skulls13.meta", "w", encoding="utf-8", newline="\n") as f:
        f.write("# Synthetic 13-skull fixture; generated by make_skulls13.py\n\n")
        f.write("[table]\nfocal = \"Nowosiółka\"\nreference_a = \"Neandertal\"\n"
                "reference_b = \"Brüx\"\n\n[kinds]\n")
        for name in ANGLES:
            f.write(f"{name} = angle_degrees\n")
        f.write("\n[ratios]\n")
        for name, (num, den) in RATIOS.items():
            f.write(f"{name} = [{num}, {den}]\n")
        f.write("\n[groups]\n")
        for label, group, _ in rows:
            f.write(f"\"{label}\" = {group}\n")
        f.write("\n[variable_sets]\npaper27 = [" + ", ".join(paper27) + "]\n")


if __name__ == "__main__":
    main()
