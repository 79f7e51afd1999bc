#!/usr/bin/env python3
# Copyright 2026 The radfield Authors.
# SPDX-License-Identifier: Apache-2.0
"""Regenerate src/transport/material_tables.inc and
src/dosimetry/air_mu_tr_table.inc from the xraydb photon cross-section
database (NIST XCOM derived). Run from the repository root:

    pip install xraydb
    python3 scripts/gen_attenuation_tables.py src
"""

import functools
import math
import sys

import xraydb

ENERGIES_KEV = [10, 15, 20, 25, 30, 35, 40, 45, 50, 60, 70, 80, 100, 125, 150]

# Mass fractions.
MATERIALS = {
    # NIST "Air, Dry (near sea level)"
    "air": (1.20479e-3, {"C": 0.000124, "N": 0.755268, "O": 0.231781, "Ar": 0.012827}),
    "water": (1.0, {"H": 0.111894, "O": 0.888106}),
    # ICRU four-component soft tissue
    "soft_tissue": (1.0, {"H": 0.101172, "C": 0.111000, "N": 0.026000, "O": 0.761828}),
}

# NIST mass energy-absorption coefficients for dry air (cm2/g). Below 150 keV
# radiative losses of secondary electrons are negligible, so mu_en ~= mu_tr.
AIR_MU_EN_NIST = [
    (10, 4.742), (15, 1.334), (20, 0.5389), (30, 0.1537), (40, 0.06833),
    (50, 0.04098), (60, 0.03041), (80, 0.02407), (100, 0.02325), (150, 0.02496),
]


def mass_coeff(fractions, energy_ev, kind):
    return sum(w * xraydb.material_mu(el, energy_ev, density=1.0, kind=kind)
               for el, w in fractions.items())


def loglog(points, e):
    for (e0, v0), (e1, v1) in zip(points, points[1:]):
        if e0 <= e <= e1:
            t = (math.log(e) - math.log(e0)) / (math.log(e1) - math.log(e0))
            return math.exp(math.log(v0) + t * (math.log(v1) - math.log(v0)))
    raise ValueError(e)


def main(src_dir):
    with open(f"{src_dir}/transport/material_tables.inc", "w") as out:
        write_materials(out)
    with open(f"{src_dir}/dosimetry/air_mu_tr_table.inc", "w") as out:
        write_mu_tr(out)


def write_materials(out):
    emit = functools.partial(print, file=out)
    emit("// Generated by scripts/gen_attenuation_tables.py. Do not edit.")
    emit("// Columns: energy_keV, mu/rho total, photoelectric, incoherent (cm2/g).")
    for name, (density, fractions) in MATERIALS.items():
        emit(f"inline const MaterialTableData k_{name}_table{{\"{name}\", {density!r}, {{")
        for e in ENERGIES_KEV:
            ev = e * 1e3
            tot = mass_coeff(fractions, ev, "total")
            pe = mass_coeff(fractions, ev, "photo")
            inc = mass_coeff(fractions, ev, "incoh")
            emit(f"    {{{e:.1f}, {tot:.6e}, {pe:.6e}, {inc:.6e}}},")
        emit("}};")


def write_mu_tr(out):
    emit = functools.partial(print, file=out)
    emit("// Generated by scripts/gen_attenuation_tables.py. Do not edit.")
    emit("// Dry air mass energy-transfer coefficient (cm2/g).")
    emit("inline constexpr std::array<std::pair<double, double>, "
          f"{len(ENERGIES_KEV)}> k_air_mu_tr_table{{{{")
    for e in ENERGIES_KEV:
        emit(f"    {{{e:.1f}, {loglog(AIR_MU_EN_NIST, e):.6e}}},")
    emit("}};")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src")
