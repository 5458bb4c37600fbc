import numpy as np
import pytest

from irsplan.errors import KnowledgeFormatError, ValidationError
from irsplan.knowledge import (
    ChannelKnowledge,
    load_knowledge,
    save_knowledge,
    validate_knowledge,
)


def _sample_knowledge():
    rng = np.random.default_rng(411)
    know = ChannelKnowledge()
    for n in range(1, 7):
        know.direct[n] = (float(10.0 ** rng.uniform(-8, -2)), int(rng.integers(1, 4)))
    # a floor marker: power present, no surviving path
    know.direct[7] = (1e-12, 0)
    for i in (1, 2):
        for j in (1, 2):
            for k in (1, 2):
                know.irs_incident[(i, j, k)] = (
                    float(10.0 ** rng.uniform(-6, -1)), int(rng.integers(1, 5)))
                for n in (1, 3, 7):
                    know.irs_departing[(i, j, k, n)] = (
                        float(10.0 ** rng.uniform(-9, -3)), int(rng.integers(1, 3)))
    return know


def test_round_trip_lossless(tmp_path):
    know = _sample_knowledge()
    save_knowledge(know, tmp_path)
    back = load_knowledge(tmp_path)
    assert set(back.direct) == set(know.direct)
    for n, (power, count) in know.direct.items():
        got_p, got_c = back.direct[n]
        assert got_c == count
        assert got_p == pytest.approx(power, rel=1e-11)
    assert set(back.irs_incident) == set(know.irs_incident)
    for key, (power, count) in know.irs_incident.items():
        got_p, got_c = back.irs_incident[key]
        assert got_c == count
        assert got_p == pytest.approx(power, rel=1e-11)
    assert set(back.irs_departing) == set(know.irs_departing)
    for key, (gain, count) in know.irs_departing.items():
        got_g, got_c = back.irs_departing[key]
        assert got_c == count
        assert got_g == pytest.approx(gain, rel=1e-11)
    assert back.n_grids == 7


def test_save_is_deterministic(tmp_path):
    know = _sample_knowledge()
    a = tmp_path / "a"
    b = tmp_path / "b"
    save_knowledge(know, a)
    # insertion order must not leak into the files
    shuffled = ChannelKnowledge(
        direct=dict(reversed(list(know.direct.items()))),
        irs_incident=dict(reversed(list(know.irs_incident.items()))),
        irs_departing=dict(reversed(list(know.irs_departing.items()))),
    )
    save_knowledge(shuffled, b)
    for name in ("direct.csv", "bs_irs.csv", "irs_grid.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_header_and_shape_errors(tmp_path):
    know = _sample_knowledge()
    save_knowledge(know, tmp_path)

    direct = tmp_path / "direct.csv"
    lines = direct.read_text().splitlines()

    direct.write_text("\n".join(["grid,beta,L"] + lines[1:]) + "\n")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)

    direct.write_text("\n".join(lines + [lines[1]]) + "\n")
    with pytest.raises(KnowledgeFormatError) as exc:
        load_knowledge(tmp_path)
    assert "duplicate" in str(exc.value)

    direct.write_text("\n".join(lines + ["8,not-a-number,1"]) + "\n")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)

    direct.write_text("\n".join(lines + ["8,-50.0"]) + "\n")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)

    direct.write_text("")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)

    direct.unlink()
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)


def test_non_finite_rejected(tmp_path):
    know = _sample_knowledge()
    save_knowledge(know, tmp_path)
    direct = tmp_path / "direct.csv"
    lines = direct.read_text().splitlines()
    direct.write_text("\n".join(lines + ["8,inf,1"]) + "\n")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)
    direct.write_text("\n".join(lines + ["8,nan,1"]) + "\n")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)


def test_positive_power_needs_paths(tmp_path):
    know = _sample_knowledge()
    save_knowledge(know, tmp_path)
    incident = tmp_path / "bs_irs.csv"
    lines = incident.read_text().splitlines()
    incident.write_text("\n".join(lines + ["3,1,1,-20.0,0"]) + "\n")
    with pytest.raises(KnowledgeFormatError):
        load_knowledge(tmp_path)


def test_validate_contiguous_grid_ids():
    know = ChannelKnowledge(direct={1: (1e-6, 1), 3: (1e-6, 1)})
    with pytest.raises(ValidationError):
        validate_knowledge(know)
    ok = ChannelKnowledge(direct={1: (1e-6, 1), 2: (1e-9, 0)})
    validate_knowledge(ok)


def test_validate_sign_rules():
    with pytest.raises(ValidationError):
        validate_knowledge(ChannelKnowledge(direct={1: (-1e-6, 1)}))
    with pytest.raises(ValidationError):
        validate_knowledge(ChannelKnowledge(
            direct={1: (1e-6, 1)}, irs_incident={(1, 1, 1): (1e-6, 0)}))
    with pytest.raises(ValidationError):
        validate_knowledge(ChannelKnowledge(
            direct={1: (1e-6, 1)}, irs_departing={(1, 1, 1, 1): (1e-6, 0)}))
