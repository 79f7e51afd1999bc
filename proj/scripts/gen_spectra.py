#!/usr/bin/env python3
# Copyright 2026 The radfield Authors.
# SPDX-License-Identifier: Apache-2.0
"""Write filtered Kramers bremsstrahlung spectra in the two-column CSV layout
(energy_keV,relative_intensity) consumed by the simulator.

    python3 scripts/gen_spectra.py data/spectra
"""

import math
import sys

import xraydb


def kramers(kvp, al_mm, step=0.5):
    rows = []
    e = 10.0
    while e <= kvp + 1e-9:
        fluence = max(kvp - e, 0.0) / e
        mu_al = xraydb.material_mu("Al", e * 1e3, density=2.699)
        rows.append((e, fluence * math.exp(-mu_al * al_mm / 10.0)))
        e += step
    peak = max(v for _, v in rows)
    return [(e, v / peak) for e, v in rows]


def main(out_dir):
    for kvp, al in ((100, 2.5), (60, 2.5)):
        path = f"{out_dir}/kramers_{kvp}kvp_{al}mmAl.csv"
        with open(path, "w") as f:
            f.write("energy_keV,relative_intensity\n")
            for e, v in kramers(kvp, al):
                f.write(f"{e:.1f},{v:.6e}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/spectra")
