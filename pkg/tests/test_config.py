"""YAML run configuration, environment substitution and seed resolution."""

import textwrap
from pathlib import Path

import pytest

from levelstat.errors import ConfigError
from levelstat.experiments import (
    EnvironmentSubstitution,
    OutputConfig,
    RunConfig,
    format_location,
    parse_config,
    resolve_seed,
)

WEGNER = textwrap.dedent(
    """
    experiment: wegner
    graph:
      kind: chain
      n_sites: 8
    distribution:
      kind: uniform
      low: 0.0
      high: 1.0
    intervals:
      - [0.4, 0.6]
    n_samples: 500
    seed: 3
    """
)


def paths(error: ConfigError):
    return [e.path for e in error.errors]


def test_minimal_wegner_config():
    """A minimal config fills defaults and builds its domain objects."""
    config = parse_config(WEGNER, environ={})

    assert config.experiment == "wegner"
    assert config.n_sites == 8
    assert config.intervals == [(0.4, 0.6)]
    assert config.confidence_level == 0.99
    assert config.output.formats == ["csv", "json"]
    assert config.graph.build().n_sites == 8
    assert config.distribution.build().rho_inf == pytest.approx(1.0)


def test_alpha_without_sets():
    """alpha needs site sets; the error points at ``sets``."""
    text = WEGNER.replace("experiment: wegner", "experiment: minami") + "alpha: 0.5\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text, environ={})
    assert "sets" in paths(info.value)


def test_duplicated_site():
    """A repeated site is reported with its index."""
    text = textwrap.dedent(
        """
        experiment: spectral-averaging
        graph: {kind: chain, n_sites: 6}
        intervals: [[0.0, 0.5], [0.5, 1.0], [1.0, 1.5]]
        sites: [0, 2, 2]
        """
    )
    with pytest.raises(ConfigError) as info:
        parse_config(text, environ={})
    assert "sites[2]" in paths(info.value)


def test_site_out_of_range_and_set_count():
    """Sites beyond the graph and a wrong number of sets are both listed."""
    text = textwrap.dedent(
        """
        experiment: profile-event
        graph: {kind: chain, n_sites: 4}
        intervals: [[0.0, 0.5], [0.5, 1.0]]
        sets: [[0, 7]]
        alpha: 0.2
        """
    )
    with pytest.raises(ConfigError) as info:
        parse_config(text, environ={})
    found = paths(info.value)
    assert "sets[0][1]" in found
    assert "sets" in found


def test_schema_errors_carry_paths():
    """Unknown keys and out-of-range values name their location."""
    text = WEGNER + "bogus: 1\nconfidence_level: 1.5\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text, environ={})
    found = paths(info.value)
    assert "bogus" in found
    assert "confidence_level" in found


def test_experiment_specific_requirements():
    """n-level needs n; torus needs a shape; two-by-two needs c != 0."""
    n_level = WEGNER.replace("experiment: wegner", "experiment: n-level")
    with pytest.raises(ConfigError) as info:
        parse_config(n_level, environ={})
    assert "n" in paths(info.value)

    torus = "experiment: gap-rounding\ngraph: {kind: torus}\n"
    with pytest.raises(ConfigError) as info:
        parse_config(torus, environ={})
    assert "graph.shape" in paths(info.value)

    two_by_two = "experiment: two-by-two\ntwo_by_two: {c: 0.0, widths: [-1.0]}\n"
    with pytest.raises(ConfigError) as info:
        parse_config(two_by_two, environ={})
    assert {"two_by_two.c", "two_by_two.widths[0]"} <= set(paths(info.value))


def test_multiplicity_block_checks():
    """Explicit problems need distinct targets, one per free site."""
    text = textwrap.dedent(
        """
        experiment: multiplicity
        graph: {kind: chain, n_sites: 3}
        multiplicity:
          free_sites: [0, 1]
          targets: [0.5, 0.5, 1.0]
        """
    )
    with pytest.raises(ConfigError) as info:
        parse_config(text, environ={})
    assert paths(info.value).count("multiplicity.targets") == 2


def test_bad_distribution_is_attributed():
    """Constructor failures are reported against their block."""
    text = WEGNER.replace(
        "kind: uniform", "kind: table\n  edges: [0.0, 0.5, 1.0]\n  masses: [0.5, 0.2]"
    )
    with pytest.raises(ConfigError) as info:
        parse_config(text, environ={})
    assert paths(info.value) == ["distribution"]


def test_document_level_errors():
    """Broken YAML and non-mapping documents are refused."""
    with pytest.raises(ConfigError) as info:
        parse_config("experiment: [wegner", environ={})
    assert paths(info.value) == ["<document>"]
    with pytest.raises(ConfigError):
        parse_config("- wegner\n", environ={})


def test_environment_placeholders():
    """${VAR:default} fills the graph size when the variable is unset."""
    text = WEGNER.replace("n_sites: 8", "n_sites: ${CHAIN_LENGTH:5}")
    assert parse_config(text, environ={}).n_sites == 5
    assert parse_config(text, environ={"CHAIN_LENGTH": "12"}).n_sites == 12

    missing = WEGNER.replace("n_sites: 8", "n_sites: ${CHAIN_LENGTH}")
    with pytest.raises(ConfigError) as info:
        parse_config(missing, environ={})
    assert paths(info.value) == ["<environment>"]


def test_environment_substitution_rules(tmp_path):
    """Blank values fall back only under ':-'; nested values resolve; .env loads."""
    env = EnvironmentSubstitution({"BLANK": " ", "OUTER": "${INNER}", "INNER": "7"})
    assert env.substitute("${BLANK:-x}") == "x"
    assert env.substitute("${BLANK:x}") == " "
    assert env.substitute("${OUTER}") == "7"
    assert env.missing("${NOPE} ${NOPE:1} ${INNER}") == ["NOPE"]

    env_file = tmp_path / ".env"
    env_file.write_text("# comment\nFROM_FILE='3'\nINNER=99\n", encoding="utf-8")
    loaded = EnvironmentSubstitution({"INNER": "7"}, env_file)
    assert loaded.substitute("${FROM_FILE}/${INNER}") == "3/7"


def test_seed_precedence():
    """--seed beats LEVELSTAT_SEED, which beats the config value."""
    config = parse_config(WEGNER, environ={})

    assert resolve_seed(config, None, {}) == 3
    assert resolve_seed(config, None, {"LEVELSTAT_SEED": "11"}) == 11
    assert resolve_seed(config, 5, {"LEVELSTAT_SEED": "11"}) == 5
    with pytest.raises(ConfigError):
        resolve_seed(config, None, {"LEVELSTAT_SEED": "eleven"})
    with pytest.raises(ConfigError):
        resolve_seed(config, None, {"LEVELSTAT_SEED": "-1"})


def test_seed_limited_to_64_bits():
    """Seeds beyond 2**64 - 1 are refused rather than silently truncated."""
    too_big = WEGNER.replace("seed: 3", "seed: 18446744073709551616")
    with pytest.raises(ConfigError) as excinfo:
        parse_config(too_big, environ={})
    assert "seed" in paths(excinfo.value)

    config = parse_config(
        WEGNER.replace("seed: 3", "seed: 18446744073709551615"), environ={}
    )
    assert config.seed == 2**64 - 1
    with pytest.raises(ConfigError):
        resolve_seed(config, 2**64, {})
    with pytest.raises(ConfigError):
        resolve_seed(config, None, {"LEVELSTAT_SEED": str(2**64)})


def test_config_hash_tracks_results_only():
    """Threads and output settings do not change the hash; the seed does."""
    config = parse_config(WEGNER, environ={})
    relocated = config.model_copy(
        update={"threads": 4, "output": OutputConfig(directory="elsewhere")}
    )

    assert config.config_hash() == parse_config(WEGNER, environ={}).config_hash()
    assert relocated.config_hash() == config.config_hash()
    assert config.with_seed(4).config_hash() != config.config_hash()
    assert len(config.config_hash()) == 64


def test_format_location():
    """Pydantic locations become dotted paths with indices."""
    assert format_location(("two_by_two", "c")) == "two_by_two.c"
    assert format_location(("sites", 2)) == "sites[2]"
    assert format_location(()) == "<document>"


def test_every_experiment_name_has_a_runner():
    """The schema and the runner registry agree on experiment names."""
    from levelstat.experiments import EXPERIMENT_NAMES, EXPERIMENTS

    assert set(EXPERIMENT_NAMES) == set(EXPERIMENTS)
    assert RunConfig(experiment="two-by-two").n_sites is None


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize(
    "path", sorted(CONFIG_DIR.glob("*.yaml")), ids=lambda path: path.stem
)
def test_shipped_configs_parse(path):
    """Every config under configs/ is valid and names its own experiment."""
    config = parse_config(path.read_text(encoding="utf-8"), environ={})
    assert config.experiment.replace("-", "_") == path.stem
