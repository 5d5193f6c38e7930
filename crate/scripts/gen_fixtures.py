#!/usr/bin/env python3
"""Writes the bundled synthetic cases and scenario files to crates/core/data.

Rerunning reproduces the committed files exactly.
"""
import csv
import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"

TURBINE = {
    "cut_in_ms": 3.0,
    "rated_ms": 12.0,
    "cut_out_ms": 25.0,
    "rated_power_mw": 2.0,
    "thrust_coefficient": 0.8,
    "rotor_diameter_m": 80.0,
    "hub_height_m": 100.0,
    "roughness_m": 0.1,
}


def wind_site(bus, rows, per_row, length):
    return {
        "bus": bus,
        "turbine": TURBINE,
        "layout": {
            "rows": rows,
            "row_length_m": length,
            "max_turbines_per_row": per_row,
            "max_speed_ms": 20.0,
            "speed_grid_points": 40,
        },
        "unit_cost_cny_per_mw": 2000.0,
    }


def storage(bus, power, energy):
    return {
        "bus": bus,
        "power_max_mw": power,
        "energy_max_mwh": energy,
        "power_cost_cny_per_mw": 600.0,
        "energy_cost_cny_per_mwh": 400.0,
    }


def gen(bus, pmin, pmax, ramp, pieces):
    return {
        "bus": bus,
        "p_min_mw": pmin,
        "p_max_mw": pmax,
        "ramp_min_mw_per_h": -ramp,
        "ramp_max_mw_per_h": ramp,
        "fuel": [{"slope_cny_per_mwh": s, "offset_cny": o} for s, o in pieces],
    }


def line(a, b, x, cap):
    return {"from": a, "to": b, "reactance_pu": x, "capacity_mw": cap}


def case(name, periods, hours, buses, gens, lines, winds, stores):
    return {
        "name": name,
        "periods": periods,
        "period_hours": hours,
        "buses": [{"id": b, "demand_max_mw": d} for b, d in buses],
        "generators": gens,
        "lines": lines,
        "wind_sites": winds,
        "storage_sites": stores,
        "charge_efficiency": 0.95,
        "discharge_efficiency": 0.95,
        "soc_min": 0.1,
        "soc_max": 0.9,
    }


CASES = [
    case(
        "bus1", 1, 1.0,
        [(1, 120.0)],
        [gen(1, 0.0, 80.0, 80.0, [(300.0, 0.0), (450.0, -6000.0)])],
        [],
        [wind_site(1, 2, 10, 1800.0)],
        [storage(1, 30.0, 60.0)],
    ),
    case(
        "bus3", 3, 8.0,
        [(1, 0.0), (2, 70.0), (3, 80.0)],
        [
            gen(1, 10.0, 90.0, 8.0, [(300.0, 0.0)]),
            gen(2, 0.0, 40.0, 10.0, [(420.0, 0.0), (520.0, -2000.0)]),
        ],
        [line(1, 2, 0.1, 70.0), line(2, 3, 0.2, 50.0), line(1, 3, 0.2, 60.0)],
        [wind_site(3, 2, 10, 1800.0)],
        [storage(2, 30.0, 120.0)],
    ),
    case(
        "bus6", 4, 6.0,
        [(1, 0.0), (2, 0.0), (3, 0.0), (4, 90.0), (5, 90.0), (6, 90.0)],
        [
            gen(1, 20.0, 90.0, 10.0, [(280.0, 0.0), (380.0, -5000.0)]),
            gen(2, 10.0, 70.0, 12.0, [(330.0, 0.0)]),
            gen(3, 5.0, 60.0, 15.0, [(420.0, 0.0)]),
        ],
        [
            line(1, 2, 0.2, 60.0), line(1, 4, 0.2, 70.0), line(1, 5, 0.3, 60.0),
            line(2, 3, 0.25, 40.0), line(2, 4, 0.1, 80.0), line(2, 5, 0.3, 50.0),
            line(2, 6, 0.2, 60.0), line(3, 5, 0.26, 50.0), line(3, 6, 0.1, 70.0),
            line(4, 5, 0.4, 40.0), line(5, 6, 0.3, 40.0),
        ],
        [wind_site(4, 2, 12, 2400.0), wind_site(6, 3, 10, 1800.0)],
        [storage(5, 40.0, 160.0), storage(6, 30.0, 120.0)],
    ),
]

# (normal, extreme) training counts, held-out counts per case.
COUNTS = {"bus1": ((5, 3), (20, 10)), "bus3": ((6, 3), (20, 10)), "bus6": ((8, 4), (24, 12))}


def profile(periods):
    # Daily load shape sampled at the period midpoints.
    t = (np.arange(periods) + 0.5) / periods
    return 0.85 + 0.15 * np.sin(2 * np.pi * (t - 0.3))


def scenarios(c, counts, rng, prefix):
    periods = c["periods"]
    shape = profile(periods)
    loads = [b for b in c["buses"] if b["demand_max_mw"] > 0]
    rows = []
    for label, n, speed, level in (
        ("normal", counts[0], (6.0, 14.0), (0.40, 0.65)),
        ("extreme", counts[1], (0.0, 5.0), (0.85, 1.00)),
    ):
        for k in range(n):
            sid = f"{prefix}{label[0]}{k:02d}"
            base = rng.uniform(*level)
            for t in range(periods):
                for i, _ in enumerate(c["wind_sites"]):
                    v = float(np.clip(rng.uniform(*speed) + rng.normal(0, 0.5), 0.0, 20.0))
                    rows.append((sid, label, t + 1, i, "wind_speed", round(v, 3)))
                for b in loads:
                    d = b["demand_max_mw"] * min(1.0, base * shape[t] / shape.max() * rng.uniform(0.95, 1.05))
                    rows.append((sid, label, t + 1, b["id"], "demand", round(d, 3)))
    return rows


def write(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["scenario_id", "label", "period", "entity_id", "kind", "value"])
        w.writerows(rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for n, c in enumerate(CASES):
        name = c["name"]
        (OUT / f"{name}.json").write_text(json.dumps(c, indent=2) + "\n")
        train, held = COUNTS[name]
        write(OUT / f"{name}_scenarios.csv", scenarios(c, train, np.random.default_rng(100 + n), "s"))
        write(OUT / f"{name}_heldout.csv", scenarios(c, held, np.random.default_rng(200 + n), "h"))


if __name__ == "__main__":
    main()
