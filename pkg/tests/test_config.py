import pytest

from ypl.config import RunConfig, parse_config
from ypl.errors import ConfigError


def _toml(tmp_path, text):
    p = tmp_path / "run.toml"
    p.write_text(text)
    return p


def test_empty_file_gives_defaults(tmp_path):
    cfg = parse_config(_toml(tmp_path, ""))
    assert cfg == RunConfig()
    assert (cfg.n, cfg.alpha, cfg.beta, cfg.case, cfg.profile) == (4, 0.1, 0.1, "pp", "phi2_zero")
    assert cfg.params.sigma == 1.0


def test_full_file(tmp_path):
    cfg = parse_config(_toml(tmp_path, """
[model]
case = "mp"
alpha = 0.2
[gen]
A = 1.1
b = [0.1, 0.0, 0.0, -0.1]
[sample]
count = 50
seed = 7
[tol]
algebra = 1e-9
[dynamics]
amplitudes = [0.1, 0.3]
"""))
    assert cfg.params.eps1 == -1 and cfg.params.eps2 == 1
    assert cfg.gen_params.A == 1.1 and cfg.gen_params.b == (0.1, 0.0, 0.0, -0.1)
    assert cfg.sample.count == 50 and cfg.tol.algebra == 1e-9
    assert cfg.amplitudes == (0.1, 0.3)


def test_zero_a_is_rejected(tmp_path):
    with pytest.raises(ConfigError) as err:
        parse_config(_toml(tmp_path, "[gen]\nA = 0.0\n"))
    assert str(err.value) == "gen.A: AB must be nonzero"


def test_trig_mixing_switches_for_mixed_case():
    with pytest.warns(UserWarning, match="hyperbolic"):
        cfg = parse_config(overrides={"model": {"case": "pm"}, "gen": {"mixing": "trig"}})
    assert cfg.mixing == "hyperbolic"


def test_hyperbolic_mixing_needs_mixed_case():
    with pytest.raises(ConfigError, match="gen.mixing"):
        parse_config(overrides={"gen": {"mixing": "hyperbolic"}})


@pytest.mark.parametrize("text, path", [
    ("[model]\ncolour = 1\n", "model.colour"),
    ("[extras]\nx = 1\n", "extras"),
    ("[model]\ncase = \"zz\"\n", "model.case"),
    ("[model]\nalpha = -0.1\n", "model.alpha"),
    ("[model]\nprofile = \"custom:nope\"\n", "model.profile"),
    ("[model]\neps1 = 2\n", "model.eps1"),
    ("[gen]\na = [0.1, 0.2]\n", "gen.a"),
    ("[output]\nformat = \"xml\"\n", "output.format"),
    ("[snyder]\nprofiles = [\"cubic\"]\n", "snyder.profiles"),
    ("[sample]\ncount = 0\n", "sample"),
])
def test_bad_values_name_their_field(tmp_path, text, path):
    with pytest.raises(ConfigError) as err:
        parse_config(_toml(tmp_path, text))
    assert err.value.path == path


def test_bad_toml_and_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="invalid TOML"):
        parse_config(_toml(tmp_path, "[model\n"))
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "absent.toml")


def test_overrides_win(tmp_path):
    path = _toml(tmp_path, "[model]\nalpha = 0.3\n[sample]\nseed = 1\n")
    cfg = parse_config(path, {"model": {"alpha": 0.05, "beta": None}, "sample": {"seed": 9}})
    assert cfg.alpha == 0.05 and cfg.beta == 0.1 and cfg.sample.seed == 9


def test_eps_pair_maps_to_case():
    cfg = parse_config(overrides={"model": {"eps1": -1, "eps2": -1}})
    assert cfg.case == "mm"
    with pytest.raises(ConfigError, match="contradicts"):
        parse_config(overrides={"model": {"case": "pp", "eps1": -1, "eps2": -1}})


def test_amplitude_string():
    cfg = parse_config(overrides={"dynamics": {"amplitudes": "0.1, 0.25,"}})
    assert cfg.amplitudes == (0.1, 0.25)
    with pytest.raises(ConfigError):
        parse_config(overrides={"dynamics": {"amplitudes": "0.1,x"}})
    with pytest.raises(ConfigError):
        parse_config(overrides={"dynamics": {"amplitudes": "-0.1"}})


def test_to_dict_drops_output_fields():
    d = RunConfig(out="x.json").to_dict()
    assert "out" not in d and d["amplitudes"] == [0.2, 0.4, 0.6]
