#!/usr/bin/env python3
"""Regenerates rates.csv from a simple power-demand model.

The values are NOT transcribed MOVES base rates. Each operating-mode bin is
assigned a representative VSP and speed, fuel power is idle power plus road
power over a fixed engine efficiency, and pollutants scale with fuel energy.
Drop in transcribed base rates with the same schema for real studies.

    python3 synth_rates.py > rates.csv
"""

# (opmode, representative VSP kW/t, representative speed mph)
BINS = [
    (0, None, None),  # braking
    (1, 0.0, 0.0),  # idle
    (11, -3.0, 12.5), (12, 1.5, 12.5), (13, 4.5, 12.5), (14, 7.5, 12.5),
    (15, 10.5, 12.5), (16, 15.0, 12.5),
    (21, -3.0, 37.5), (22, 1.5, 37.5), (23, 4.5, 37.5), (24, 7.5, 37.5),
    (25, 10.5, 37.5), (27, 15.0, 37.5), (28, 21.0, 37.5), (29, 27.0, 37.5),
    (30, 33.0, 37.5),
    (33, 3.0, 60.0), (35, 9.0, 60.0), (37, 15.0, 60.0), (38, 21.0, 60.0),
    (39, 27.0, 60.0), (40, 33.0, 60.0),
]

VEHICLES = {
    # idle kW, mass t, pollutant multiplier
    "LDV": (7.0, 1.4788, 1.0),
    "LDT": (9.5, 1.86686, 1.3),
}

EFFICIENCY = 0.22
SPEED_KW_PER_MPH = 0.05
BRAKING_IDLE_FRACTION = 0.6
CO2_G_PER_KJ = 0.0715


def sig(x, digits=6):
    return float(f"{x:.{digits}g}")


def row(veh, mode, vsp, mph):
    idle_kw, mass, mult = VEHICLES[veh]
    if mode == 0:
        kw = BRAKING_IDLE_FRACTION * idle_kw
        pos = 0.0
    else:
        pos = max(vsp, 0.0)
        kw = idle_kw + mass * pos / EFFICIENCY + SPEED_KW_PER_MPH * mph
    energy = kw * 3600.0
    mj = energy / 1000.0
    co = mj * 0.2 * mult * (1.0 + (pos / 18.0) ** 2)
    hc = mj * 0.02 * mult * (1.0 + pos / 30.0)
    nox = mj * 0.03 * mult * (1.0 + pos / 15.0)
    co2 = energy * CO2_G_PER_KJ
    return [sig(v) for v in (energy, co, hc, nox, co2)]


def main():
    print("# provenance: synthesized placeholder base rates (power-demand model in synth_rates.py); not transcribed MOVES values")
    print("# provenance: schema v1; generated 2026-10-15")
    print("# unit: energy=kJ/h")
    print("# unit: CO=g/h")
    print("# unit: HC=g/h")
    print("# unit: NOx=g/h")
    print("# unit: CO2=g/h")
    print("# braking: a <= -2 mph/s, or a < -1 mph/s for this and the two previous seconds")
    print("# idle: speed < 1 mph")
    print("source_type,opmode,energy,CO,HC,NOx,CO2")
    for veh in VEHICLES:
        for mode, vsp, mph in BINS:
            vals = row(veh, mode, vsp, mph)
            print(",".join([veh, str(mode)] + [repr(v) for v in vals]))


if __name__ == "__main__":
    main()
