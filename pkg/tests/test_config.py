# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import argparse
from dataclasses import replace

import pytest

from matgen.commands_verify import settings_from_args
from matgen.config import VerifySettings, load_settings_file, parse_settings_mapping
from matgen.errors import ConfigError


def test_with_samples_leaves_jacobian_counts():
    s = VerifySettings().with_samples(5)
    assert s.burnside_samples == s.montecarlo_samples == s.b2_samples == 5
    assert s.rank_samples == VerifySettings().rank_samples
    with pytest.raises(ConfigError):
        VerifySettings().with_samples(0)


@pytest.mark.parametrize(
    "changes",
    [
        {"r_min": 1},
        {"r_min": 4, "r_max": 3},
        {"threads": 0},
        {"tol": 1.0},
        {"seed": -1},
        {"seed": 2**64},
        {"orbit_samples": -1},
    ],
)
def test_validate_rejects(changes):
    with pytest.raises(ConfigError):
        replace(VerifySettings(), **changes).validate()


def test_mapping_accepts_dashed_keys():
    s = parse_settings_mapping({"r-max": 4, "tol": 1e-8, "jacobian_step": 1})
    assert s.r_max == 4
    assert s.tol == 1e-8
    assert s.jacobian_step == 1.0
    assert isinstance(s.jacobian_step, float)


@pytest.mark.parametrize(
    "data",
    [[], {"colour": 1}, {"threads": "2"}, {"threads": True}, {"r_max": 4.0}, {"tol": "small"}],
)
def test_mapping_rejects(data):
    with pytest.raises(ConfigError):
        parse_settings_mapping(data)


def test_jsonc_file(tmp_path):
    path = tmp_path / "suites.jsonc"
    path.write_text(
        "{\n  // quick run\n  \"r_max\": 3,\n  \"b2_samples\": 50 # trailing\n}\n", encoding="utf-8"
    )
    s = load_settings_file(str(path))
    assert s.r_max == 3
    assert s.b2_samples == 50


def test_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        load_settings_file(str(tmp_path / "missing.jsonc"))
    broken = tmp_path / "broken.jsonc"
    broken.write_text("{ \"r_max\": ", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_settings_file(str(broken))


def _args(**kw) -> argparse.Namespace:
    base = dict(config=None, samples=None, r_min=None, r_max=None, threads=None, tol=None, seed=11)
    base.update(kw)
    return argparse.Namespace(**base)


def test_flags_override_file(tmp_path):
    path = tmp_path / "suites.jsonc"
    path.write_text('{"r_max": 5, "orbit_samples": 7, "threads": 3}', encoding="utf-8")
    s = settings_from_args(_args(config=str(path), r_max=4))
    assert (s.seed, s.r_max, s.orbit_samples, s.threads) == (11, 4, 7, 3)
    s = settings_from_args(_args(config=str(path), samples=2))
    assert s.orbit_samples == 2
    assert s.r_max == 5
