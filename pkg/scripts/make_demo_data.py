#!/usr/bin/env python3
"""Regenerate the bundled synthetic demo tables and configs under src/nvthermo/data/."""

from pathlib import Path

import yaml

from nvthermo.demos import RECIPES, build_demo_model, demo_measurements
from nvthermo.tables import MEASUREMENT_COLUMNS, write_expansion_table, write_mode_table, write_table
from nvthermo.thermo import dA_dT

DATA = Path(__file__).resolve().parents[1] / "src" / "nvthermo" / "data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    expansion_written = False
    for name in RECIPES:
        model = build_demo_model(name)
        if not expansion_written:
            write_expansion_table(DATA / "expansion_demo.csv", model.expansion)
            expansion_written = True
        write_mode_table(DATA / f"modes_{name}.csv", model.modes)
        cfg = {
            "thermo": {
                "a_stc0_Hz": float(model.a_stc0),
                "c_stc_Hz": float(model.c_stc),
                "temperatures_K": {"start": 0.0, "stop": 400.0, "num": 81},
                "merge_window_meV": 1.0,
            },
            "paths": {"modes": f"modes_{name}.csv", "expansion": "expansion_demo.csv"},
        }
        header = f"# synthetic demo model '{name}' (not from first-principles data)\n"
        (DATA / f"demo_{name}.yaml").write_text(header + yaml.safe_dump(cfg, sort_keys=False))
        d = dA_dT(model, 300.0)
        print(f"{name:16s} dA/dT(300 K) = {d.total:.4f} Hz/K  (stc {d.stc:.3f}, dyn {d.dyn:.3f})")
    write_table(DATA / "measurements_c13_2.csv", MEASUREMENT_COLUMNS, demo_measurements())
    (DATA / "demo_tempco.yaml").write_text(
        "# synthetic 13C(2)-class measurements on three NVs at 15, 20 and 25 G\n"
        + yaml.safe_dump({"paths": {"measurements": "measurements_c13_2.csv"}}, sort_keys=False)
    )


if __name__ == "__main__":
    main()
