"""Config parsing, defaults, provenance, and exact serialization."""

import importlib.resources

import numpy as np
import pytest

from mixsep.config import (
    SWEEP_DEFAULT_POINTS,
    SWEEP_DEFAULT_RANGE_A0,
    default_config,
    default_sweep_a0,
    load_config,
    parse_config,
    serialize_config,
)
from mixsep.constants import A_BOHR
from mixsep.errors import ParseError, ValidationError
from mixsep.physics import scattering_length


def test_defaults_match_shipped_scenario():
    cfg = default_config()
    sc = cfg.scenario
    assert sc.n_bosons == 2.9e4
    assert sc.n_fermions == 1.4e5
    assert sc.condensate_fraction == 0.5
    assert sc.a_bf == 0.0
    assert sc.thermal_model == "gaussian"
    assert cfg.n_rho == 128 and cfg.n_z == 256
    assert cfg.solver.mode == "full"
    assert cfg.sweep_b_gauss is None
    assert cfg.l3 == pytest.approx(1.0e-25 * 1.0e-12, rel=1e-15)
    np.testing.assert_allclose(
        np.array(cfg.sweep_a_bf) / A_BOHR, default_sweep_a0(), rtol=1e-12
    )


def test_default_sweep_is_geometric():
    pts = default_sweep_a0()
    assert len(pts) == SWEEP_DEFAULT_POINTS
    assert pts[0] == SWEEP_DEFAULT_RANGE_A0[0]
    assert pts[-1] == SWEEP_DEFAULT_RANGE_A0[1]
    ratios = pts[1:] / pts[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)


def test_empty_text_equals_defaults():
    assert parse_config("") == default_config()


def test_provenance_tags():
    cfg = parse_config("[mixture]\nn_bosons = 1e4\n")
    assert cfg.provenance["mixture.n_bosons"] == "file"
    assert cfg.provenance["mixture.n_fermions"] == "default"
    # boson trap frequencies come from the fermion trap via the mass and
    # polarizability ratio unless the file pins them
    assert cfg.provenance["bosons.nu_rho_hz"] == "derived"
    cfg2 = parse_config("[bosons]\nnu_rho_hz = 150\n")
    assert cfg2.provenance["bosons.nu_rho_hz"] == "file"
    assert cfg2.provenance["bosons.nu_z_hz"] == "derived"


def test_serialize_round_trips_bit_exact():
    text = """
[mixture]
n_bosons = 31234.0
a_bf_a0 = 613.77
condensate_fraction = 0.41
[solver]
tol_energy = 3.5e-11
seed = 7
[fits]
l3_cm6_per_s = 2.75e-26
"""
    cfg = parse_config(text)
    cfg2 = parse_config(serialize_config(cfg))
    assert cfg2 == cfg
    assert cfg2.raw == cfg.raw
    assert cfg2.sweep_a_bf == cfg.sweep_a_bf


def test_serialize_round_trips_field_list():
    cfg = parse_config("[sweep]\nb_list_gauss = 335.5, 335.7, 335.9\n")
    assert cfg.sweep_b_gauss == (335.5, 335.7, 335.9)
    expect = tuple(scattering_length(cfg.resonance, b) for b in cfg.sweep_b_gauss)
    assert cfg.sweep_a_bf == expect
    assert cfg.provenance["sweep.a_bf_list_a0"] == "derived"
    out = serialize_config(cfg)
    assert "b_list_gauss" in out
    assert "a_bf_list_a0" not in out
    assert parse_config(out) == cfg


def test_explicit_a_bf_list():
    cfg = parse_config("[sweep]\na_bf_list_a0 = 100 300 900\n")
    assert cfg.sweep_b_gauss is None
    np.testing.assert_allclose(
        np.array(cfg.sweep_a_bf), np.array([100.0, 300.0, 900.0]) * A_BOHR
    )


def test_both_sweep_lists_rejected():
    with pytest.raises(ValidationError, match="not both"):
        parse_config(
            "[sweep]\na_bf_list_a0 = 100 200\nb_list_gauss = 335.5 335.6\n"
        )


def test_unknown_section_rejected():
    with pytest.raises(ValidationError, match=r"\[lasers\]"):
        parse_config("[lasers]\npower = 5\n")


def test_unknown_key_rejected():
    with pytest.raises(ValidationError, match="n_atoms"):
        parse_config("[mixture]\nn_atoms = 1e4\n")


def test_bad_value_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_config("[grid]\nn_rho = hello\n")
    assert exc.value.line == 2
    assert "n_rho" in str(exc.value)


def test_malformed_ini():
    with pytest.raises(ParseError):
        parse_config("key_without_section = 1\n")


def test_condensate_fraction_bounds():
    with pytest.raises(ValidationError, match="condensate_fraction"):
        parse_config("[mixture]\ncondensate_fraction = 1.2\n")


def test_grid_and_solver_validation():
    with pytest.raises(ValidationError, match="8 x 8"):
        parse_config("[grid]\nn_rho = 4\n")
    with pytest.raises(ValidationError, match="box_factor"):
        parse_config("[grid]\nbox_factor = 0.9\n")
    with pytest.raises(ValidationError, match="mode"):
        parse_config("[solver]\nmode = exact\n")
    with pytest.raises(ValidationError, match="span"):
        parse_config("[fits]\nspan = 1.5\n")
    with pytest.raises(ValidationError, match="l3"):
        parse_config("[fits]\nl3_cm6_per_s = 0\n")


def test_inline_comments_stripped():
    cfg = parse_config("[mixture]\nn_bosons = 5e4  # bump for contrast\n")
    assert cfg.scenario.n_bosons == 5.0e4


def test_packaged_default_file_matches_defaults():
    res = importlib.resources.files("mixsep") / "data" / "default.cfg"
    cfg = parse_config(res.read_text(encoding="utf-8"))
    assert cfg == default_config()


def test_load_config_reads_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("[mixture]\na_bf_a0 = 444\n", encoding="utf-8")
    cfg = load_config(p)
    assert cfg.scenario.a_bf == pytest.approx(444 * A_BOHR)


def test_serialize_requires_raw_values():
    cfg = default_config()
    bare = type(cfg)(
        scenario=cfg.scenario,
        resonance=cfg.resonance,
        n_rho=cfg.n_rho,
        n_z=cfg.n_z,
        box_factor=cfg.box_factor,
        solver=cfg.solver,
        sweep_a_bf=cfg.sweep_a_bf,
        sweep_b_gauss=cfg.sweep_b_gauss,
        l3=cfg.l3,
        smooth_span=cfg.smooth_span,
        smooth_n_boot=cfg.smooth_n_boot,
        smooth_seed=cfg.smooth_seed,
    )
    with pytest.raises(ValidationError):
        serialize_config(bare)
