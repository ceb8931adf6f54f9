import pytest

from tpikit import CollisionModel, ConfigError, collision_model, load_config

FULL_CONFIG = """\
[problem]
dimension = 1
dx = 0.01
eps = 1e-5
scheme = weno3
j_nodes = 10
collision = profile
omega_breakpoints = 0.5, 1.0
omega_values = 1.0, 0.1
initial_density = gaussian_1d

[tpi]
mode = clustered
outer = prk4
m_min = 3.0
k_max = 8

[run]
t_end = 0.5
snapshots = 3

[output]
dir = out/test
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_full_round_trip(tmp_path):
    cfg = load_config(write(tmp_path, FULL_CONFIG))
    assert cfg.dx == 0.01
    assert cfg.eps == 1e-5
    assert cfg.scheme == "weno3"
    assert cfg.collision == "profile"
    assert cfg.omega_breakpoints == (0.5, 1.0)
    assert cfg.omega_values == (1.0, 0.1)
    assert cfg.tpi_mode == "clustered"
    assert cfg.outer == "prk4"
    assert cfg.k_max == 8
    assert cfg.t_end == 0.5
    assert cfg.snapshots == 3
    assert cfg.out_dir == "out/test"
    model = collision_model(cfg)
    assert model == CollisionModel("profile", breakpoints=(0.5, 1.0),
                                   values=(1.0, 0.1))


def test_defaults_fill_in(tmp_path):
    text = """\
[problem]
dx = 0.01
eps = 1e-5
initial_density = step_profile_1d

[tpi]
mode = zero_one
"""
    cfg = load_config(write(tmp_path, text))
    assert cfg.dimension == 1
    assert cfg.scheme == "upwind1"
    assert cfg.j_nodes == 10
    assert cfg.collision == "constant"
    assert cfg.omega == 1.0
    assert cfg.outer == "pfe"
    assert cfg.k_inner == 1
    assert cfg.h_last_over_dx == 0.5
    assert cfg.h0 is None
    assert cfg.t_end == 1.0
    assert cfg.snapshots == 5
    assert cfg.out_dir is None
    assert collision_model(cfg) == CollisionModel("constant", omega=1.0)


def test_missing_file_and_sections(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")
    with pytest.raises(ConfigError, match=r"missing section \[tpi\]"):
        load_config(write(tmp_path, "[problem]\ndx = 0.01\neps = 1e-5\n"
                                    "initial_density = gaussian_1d\n"))
    with pytest.raises(ConfigError, match="missing required key"):
        load_config(write(tmp_path, "[problem]\ndx = 0.01\neps = 1e-5\n"
                                    "initial_density = gaussian_1d\n[tpi]\n"))


def test_unknown_sections_and_keys_rejected(tmp_path):
    with pytest.raises(ConfigError, match=r"unknown section \[extra\]"):
        load_config(write(tmp_path, FULL_CONFIG + "\n[extra]\nfoo = 1\n"))
    bad = FULL_CONFIG.replace("j_nodes = 10", "j_nodes = 10\nnodes = 10")
    with pytest.raises(ConfigError, match=r"unknown key \[problem\] nodes"):
        load_config(write(tmp_path, bad))


def test_bad_values_rejected(tmp_path):
    bad = FULL_CONFIG.replace("eps = 1e-5", "eps = tiny")
    with pytest.raises(ConfigError, match=r"bad value for \[problem\] eps"):
        load_config(write(tmp_path, bad))


@pytest.mark.parametrize("transform,message", [
    (lambda t: t.replace("dx = 0.01", "dx = 0.013"), "does not divide"),
    (lambda t: t.replace("eps = 1e-5", "eps = -1e-5"), "eps must be positive"),
    (lambda t: t.replace("scheme = weno3", "scheme = weno9"), "scheme must be"),
    (lambda t: t.replace("dimension = 1", "dimension = 3"), "dimension"),
    (lambda t: t.replace("mode = clustered", "mode = automatic"), "tpi mode"),
    (lambda t: t.replace("outer = prk4", "outer = rk8"), "outer must be"),
    (lambda t: t.replace("omega_values = 1.0, 0.1", "omega_values = 1.0, -0.1"),
     "bad collision model"),
    (lambda t: t.replace("t_end = 0.5", "t_end = 0"), "t_end"),
    (lambda t: t.replace("snapshots = 3", "snapshots = -1"), "snapshots"),
    (lambda t: t.replace("k_max = 8", "k_max = 11"), "k_max"),
    (lambda t: t.replace("initial_density = gaussian_1d",
                         "initial_density = gaussian_9d"), "initial_density"),
], ids=["dx", "eps", "scheme", "dimension", "mode", "outer", "omega_values",
        "t_end", "snapshots", "k_max", "initial"])
def test_cross_validation_errors(tmp_path, transform, message):
    with pytest.raises(ConfigError, match=message):
        load_config(write(tmp_path, transform(FULL_CONFIG)))


def test_clustered_mode_restrictions(tmp_path):
    with_h0 = FULL_CONFIG.replace("mode = clustered", "mode = clustered\nh0 = 1e-6")
    with pytest.raises(ConfigError, match="zero_one mode only"):
        load_config(write(tmp_path, with_h0))
    two_d = FULL_CONFIG.replace("dimension = 1", "dimension = 2")
    two_d = two_d.replace("initial_density = gaussian_1d",
                          "initial_density = gaussian_2d")
    two_d = two_d.replace("collision = profile", "collision = constant")
    with pytest.raises(ConfigError, match="one-dimensional spectrum"):
        load_config(write(tmp_path, two_d))


def test_dimension_profile_consistency(tmp_path):
    text = """\
[problem]
dimension = 2
dx = 0.02
eps = 1e-5
initial_density = gaussian_1d

[tpi]
mode = zero_one
"""
    with pytest.raises(ConfigError, match="one-dimensional profile"):
        load_config(write(tmp_path, text))
    text_1d = text.replace("dimension = 2", "dimension = 1").replace(
        "gaussian_1d", "gaussian_2d")
    with pytest.raises(ConfigError, match="dimension = 2"):
        load_config(write(tmp_path, text_1d))
