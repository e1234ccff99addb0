import json
from pathlib import Path

import pytest

from affine_image.cli import EXIT_ENGINE, EXIT_INPUT, EXIT_OK, EXIT_UNVERIFIED, run

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def _write(tmp_path, text, name="problem.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _json(capsys):
    return json.loads(capsys.readouterr().out)


PARABOLA = """
[ring]
domain = z
codomain = w1, w2

[map]
w1 = z
w2 = z^2
"""


def test_construct_line(capsys):
    code = run(["construct", str(PROBLEMS / "line_pure_powers.ini"), "--json", "-"])
    assert code == EXIT_OK
    report = _json(capsys)
    assert report["schema"] == 1
    assert report["command"] == "construct"
    construction = report["construction"]
    assert construction["variant"] == "pure-powers"
    assert construction["surjection"]["coordinates"] == [
        "a2*c + 1",
        "a1",
        "a2*c^2 + a2 + c",
    ]
    assert construction["degree"]["within"]


def test_construct_summary(capsys):
    assert run(["construct", str(PROBLEMS / "cubic_construct.ini")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "surjection (theorem-main)" in out
    assert "bound 13 (ok)" in out


def test_variant_flag_overrides_the_file(capsys):
    path = str(PROBLEMS / "cubic_construct.ini")
    assert run(["construct", path, "--variant", "pure-powers", "--json", "-"]) == 0
    assert _json(capsys)["construction"]["variant"] == "pure-powers"


def test_pure_powers_needs_generic_change(tmp_path, capsys):
    path = _write(
        tmp_path,
        "[ring]\ncodomain = w1, w2, w3\n[target]\nq1 = w2*w3\n"
        "[options]\nvariant = pure-powers\n",
    )
    assert run(["construct", path]) == EXIT_INPUT
    assert "generic" in capsys.readouterr().err
    assert run(["construct", path, "--generic-change", "--json", "-"]) == EXIT_OK
    construction = _json(capsys)["construction"]
    assert construction["change_coefficients"][0] != 0


def test_identity_fails_verification(capsys):
    code = run(["verify", str(PROBLEMS / "identity_verify.ini"), "--json", "-"])
    assert code == EXIT_UNVERIFIED
    certificate = _json(capsys)["certificate"]
    assert certificate["avoidance"] is False
    assert certificate["verdict"] is False


def test_verify_summary_verdict(capsys):
    run(["verify", str(PROBLEMS / "identity_verify.ini")])
    assert "verdict: FAIL" in capsys.readouterr().out


@pytest.mark.parametrize(
    "text",
    [
        "[ring]\ndomain = a\ncodomain = w1, w2\n[map]\nw1 = 1 + * a\nw2 = a\n",
        "[ring]\ncodomain = w1, w2\n[target]\nq1 = w2\n[options]\ncolour = red\n",
        "[ring]\ncodomain = w1, w2\n[target]\nx1 = w2\n",
        "[ring]\ncodomain = w1, w2\n[target]\nq1 = w1 + w2\n",
        "[ring]\ncodomain = w1, w2\n[surface]\nq1 = w2\n",
        "[ring]\ncodomain = w1, w2\n[target]\nq1 = w2\n[options]\nvariant = other\n",
        "[ring]\ncodomain = w1, w2\n[target]\nq1 = w2\ngeneral = maybe\n",
        "not an ini file",
    ],
)
def test_invalid_problems(tmp_path, text):
    assert run(["construct", _write(tmp_path, text)]) == EXIT_INPUT


def test_parse_error_names_the_key(tmp_path, capsys):
    path = _write(tmp_path, "[ring]\ndomain = a\ncodomain = w1\n[map]\nw1 = a +\n")
    assert run(["image", path]) == EXIT_INPUT
    assert "[map] w1" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert run(["image", str(tmp_path / "absent.ini")]) == EXIT_INPUT


def test_bad_environment(monkeypatch):
    monkeypatch.setenv("AFFINE_IMAGE_JOBS", "0")
    assert run(["construct", str(PROBLEMS / "cubic_construct.ini")]) == EXIT_INPUT


def test_bad_flag():
    with pytest.raises(SystemExit):
        run(["construct", str(PROBLEMS / "cubic_construct.ini"), "--variant", "x"])


def test_round_limit(tmp_path, capsys):
    path = _write(
        tmp_path,
        "[ring]\ndomain =\ncodomain = w1, w2\n[map]\nw1 = 1\nw2 = 2\n"
        "[options]\nround_limit_extra = 0\n",
    )
    assert run(["image", path, "--json", "-"]) == EXIT_ENGINE
    report = _json(capsys)
    assert report["exit_status"] == EXIT_ENGINE
    assert "rounds" in report["error"]


def test_image_json_is_deterministic(tmp_path, capsys):
    path = _write(tmp_path, PARABOLA)
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    assert run(["image", path, "--json", str(first)]) == EXIT_OK
    assert run(["image", path, "--json", str(second), "--jobs", "2"]) == EXIT_OK
    assert first.read_text() == second.read_text()
    image = json.loads(first.read_text())["image"]
    assert image["surjective"] is False
    assert image["complement"] is None
    assert len(image["pieces"]) == 1
    assert "image is not the complement" in capsys.readouterr().out


def test_orbit(capsys):
    assert run(["orbit", str(PROBLEMS / "cubic_orbit.ini"), "--json", "-"]) == EXIT_OK
    orbit = _json(capsys)["orbit"]
    assert orbit["domain"] == ["a", "b", "c", "d"]
    assert orbit["coordinates"][1] == "a"


@pytest.mark.slow
def test_cubic_image_session(capsys):
    assert run(["image", str(PROBLEMS / "cubic_image.ini"), "--json", "-"]) == EXIT_OK
    image = _json(capsys)["image"]
    assert len(image["trace"]["rounds"]) == 2
    assert image["complement"] is not None


@pytest.mark.slow
@pytest.mark.parametrize("name", ["cubic_verify.ini", "twisted_cubic_verify.ini"])
def test_verify_examples(name):
    assert run(["verify", str(PROBLEMS / name)]) == EXIT_OK


@pytest.mark.slow
def test_twisted_cubic_orbit(capsys):
    path = str(PROBLEMS / "twisted_cubic_orbit.ini")
    assert run(["orbit", path, "--json", "-"]) == EXIT_OK
    report = _json(capsys)
    assert report["orbit"]["coordinates"] == [
        "a^2 + b*c + 1",
        "a",
        "a^3 + b*c^2 + b + c",
    ]
    assert report["image"]["surjective"] is False


def test_stated_complement_of_a_non_open_image(tmp_path, capsys):
    path = _write(tmp_path, PARABOLA + "\n[expect]\ncomplement = w2\n")
    assert run(["image", path, "--json", "-"]) == EXIT_OK
    notes = _json(capsys)["image"]["notes"]
    assert len(notes) == 1
    assert "V(w2)" in notes[0]
    assert "not the complement of a closed set" in notes[0]


def test_matching_stated_complement_adds_no_note(tmp_path, capsys):
    path = _write(
        tmp_path,
        "[ring]\ndomain = a, b\ncodomain = w1, w2\n[map]\nw1 = a\nw2 = b\n"
        "[expect]\ncomplement = 1\n",
    )
    assert run(["image", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "image = A^n" in out
    assert "note:" not in out


@pytest.mark.slow
def test_line_image_notes_the_stated_complement(capsys):
    assert run(["image", str(PROBLEMS / "line_image.ini")]) == EXIT_OK
    out = capsys.readouterr().out
    note = next(line for line in out.splitlines() if line.startswith("note:"))
    assert "V(w2)" in note
    computed = note.split("computed V(")[1].split(")")[0]
    assert "w1" in computed and "w3" in computed
    assert "w2" not in computed
    assert "hypersurface" in note
