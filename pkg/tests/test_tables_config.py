import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nvthermo.config import (
    ENV_VAR,
    RunConfig,
    dump_config,
    grid,
    load_config,
    resolve_config,
    system_from_yaml,
    system_to_yaml,
)
from nvthermo.errors import ParseError
from nvthermo.spin import SpinSystem, build_hamiltonian
from nvthermo.tables import (
    MEASUREMENT_COLUMNS,
    fmt,
    format_table,
    parse_expansion_table,
    parse_measurements,
    parse_phonon_table,
    write_mode_table,
)
from nvthermo.thermo import synthetic_mode_table

HEADER = ",".join(MEASUREMENT_COLUMNS)
GOOD = HEADER + "\nNV-1,C13-2,295.0,13670000.0,13701000.0,3.0\nNV-1,C13-2,305.0,13671100.0,13702100.0,3.0\n"


def write(tmp_path, name, text, encoding="utf-8"):
    p = tmp_path / name
    p.write_bytes(text.encode(encoding))
    return p


# measurements


def test_measurements_two_rows(tmp_path):
    recs = parse_measurements(write(tmp_path, "m.csv", GOOD))
    assert len(recs) == 2
    assert recs[0].nv_id == "NV-1"
    assert recs[1].mean == (13671100.0 + 13702100.0) / 2


def test_measurements_bom_crlf_identical(tmp_path):
    plain = parse_measurements(write(tmp_path, "a.csv", GOOD))
    raw = ("\ufeff" + GOOD.replace("\n", "\r\n")).encode("utf-8")
    p = tmp_path / "b.csv"
    p.write_bytes(raw)
    assert raw[:3] == b"\xef\xbb\xbf" and b"\r\n" in raw
    assert parse_measurements(p) == plain


def test_measurements_zero_sigma_names_row(tmp_path):
    text = GOOD + "NV-2,C13-2,300.0,1.0,2.0,0\n"
    with pytest.raises(ParseError) as info:
        parse_measurements(write(tmp_path, "m.csv", text))
    assert info.value.line == 4
    assert info.value.column == 6
    assert "line 4" in str(info.value) and "m.csv" in str(info.value)


def test_measurements_malformed_number(tmp_path):
    text = GOOD + "NV-2,C13-2,3OO,1.0,2.0,1\n"
    with pytest.raises(ParseError) as info:
        parse_measurements(write(tmp_path, "m.csv", text))
    assert (info.value.line, info.value.column) == (4, 3)


def test_measurements_missing_column(tmp_path):
    text = "nvId,nucleus,T_K,omegaPlus_Hz,omegaMinus_Hz\nNV,C,1,2,3\n"
    with pytest.raises(ParseError, match="sigma_Hz"):
        parse_measurements(write(tmp_path, "m.csv", text))


def test_measurements_unknown_column(tmp_path):
    text = HEADER + ",extra\nNV,C,1,2,3,4,5\n"
    with pytest.raises(ParseError, match="extra"):
        parse_measurements(write(tmp_path, "m.csv", text))


def test_measurements_nonpositive_temperature(tmp_path):
    text = HEADER + "\nNV,C13-1,0,2,3,4\n"
    with pytest.raises(ParseError, match="T_K"):
        parse_measurements(write(tmp_path, "m.csv", text))


# mode and expansion tables


def test_mode_table_1530(tmp_path):
    table = synthetic_mode_table(1530, seed=1)
    p = tmp_path / "modes.csv"
    write_mode_table(p, table)
    back = parse_phonon_table(p)
    assert len(back) == 1530
    np.testing.assert_array_equal(back.energies, table.energies)
    np.testing.assert_array_equal(back.c, table.c)


def test_mode_table_duplicate_index(tmp_path):
    text = "index,energy_meV,b_Hz,c_Hz\n1,10,0,1\n2,11,0,1\n1,12,0,1\n"
    with pytest.raises(ParseError, match="duplicate mode index 1") as info:
        parse_phonon_table(write(tmp_path, "m.csv", text))
    assert info.value.line == 4


def test_mode_table_zero_energy(tmp_path):
    text = "index,energy_meV,b_Hz,c_Hz\n1,0,0,1\n"
    with pytest.raises(ParseError, match="energy_meV"):
        parse_phonon_table(write(tmp_path, "m.csv", text))


def test_expansion_descending(tmp_path):
    text = "T_K,rel_expansion\n0,0\n200,2e-5\n100,3e-5\n"
    with pytest.raises(ParseError, match="strictly increasing") as info:
        parse_expansion_table(write(tmp_path, "e.csv", text))
    assert info.value.line == 4


def test_expansion_round_trip(tmp_path):
    text = "# source=synthetic\nT_K,rel_expansion\n0,0\n100,1e-6\n300,2.5e-5\n"
    table = parse_expansion_table(write(tmp_path, "e.csv", text))
    np.testing.assert_array_equal(table.temperatures, [0, 100, 300])


@settings(max_examples=200, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trip(x):
    assert float(fmt(x)) == x


def test_format_table_metadata():
    text = format_table(("a", "b"), [(1, 0.5)], {"seed": 3})
    assert text == "# seed=3\na,b\n1,0.5\n"


# config


def test_defaults_build_demo_system():
    cfg = RunConfig()
    s = cfg.spin_system()
    assert s.B == (0.0, 0.0, 20.0)
    assert len(s.carbons) == 1


def test_unknown_top_level_key(tmp_path):
    p = write(tmp_path, "c.yaml", "sytem:\n  D_Hz: 2.87e9\n")
    with pytest.raises(ParseError, match="sytem"):
        load_config(p)


def test_unknown_nested_key(tmp_path):
    p = write(tmp_path, "c.yaml", "system:\n  D_hz: 2.87e9\n")
    with pytest.raises(ParseError, match="D_hz"):
        load_config(p)


def test_yaml_syntax_error_location(tmp_path):
    p = write(tmp_path, "c.yaml", "system:\n  D_Hz: [1, 2\n")
    with pytest.raises(ParseError) as info:
        load_config(p)
    assert info.value.line is not None


def test_config_dump_round_trip(tmp_path):
    cfg = RunConfig()
    p = tmp_path / "c.yaml"
    dump_config(cfg, p)
    assert load_config(p) == cfg


def test_paths_resolve_relative_to_config(tmp_path):
    p = write(tmp_path, "c.yaml", "paths:\n  modes: data/m.csv\n")
    cfg = load_config(p)
    assert cfg.resolve(cfg.paths.modes) == tmp_path / "data" / "m.csv"


def test_env_fallback(tmp_path, monkeypatch):
    p = write(tmp_path, "c.yaml", "simulation:\n  seed: 77\n")
    monkeypatch.setenv(ENV_VAR, str(p))
    assert resolve_config().simulation.seed == 77
    monkeypatch.delenv(ENV_VAR)
    assert resolve_config().simulation.seed == RunConfig().simulation.seed


def test_spin_system_yaml_round_trip(c13_tensor):
    s = SpinSystem(B=(1.5, -0.25, 510.0), carbons=(c13_tensor, np.diag([1e5, 2e5, 3e5])))
    back = system_from_yaml(system_to_yaml(s))
    np.testing.assert_array_equal(build_hamiltonian(back), build_hamiltonian(s))


def test_grid():
    np.testing.assert_array_equal(grid({"start": 295, "stop": 320, "num": 6}), np.linspace(295, 320, 6))
    np.testing.assert_array_equal(grid([1, 2, 3]), [1.0, 2.0, 3.0])
