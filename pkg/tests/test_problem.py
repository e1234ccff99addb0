from fractions import Fraction
from pathlib import Path

import pytest

from affine_image.config import Config
from affine_image.errors import GroupLawError, ParseError, ProblemFileError
from affine_image.problem import load_problem, parse_problem
from conftest import poly, ring

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def test_cubic_image_file(cubic_map):
    problem = load_problem(PROBLEMS / "cubic_image.ini")
    assert problem.polynomial_map() == cubic_map
    assert problem.source.endswith("cubic_image.ini")


def test_target(cubic):
    problem = load_problem(PROBLEMS / "cubic_construct.ini")
    assert problem.target_variety() == cubic
    assert problem.options.variant == "theorem-main"


def test_general_target(twisted_cubic):
    problem = load_problem(PROBLEMS / "twisted_cubic_verify.ini")
    assert problem.target_variety() == twisted_cubic


def test_generators_are_ordered_by_number(w_ring):
    problem = parse_problem(
        "[ring]\ncodomain = w1, w2, w3\n[target]\nq10 = w2\nq2 = w3\n"
    )
    assert problem.target_variety().q_list == (w_ring.gen("w3"), w_ring.gen("w2"))


def test_orbit_steps_are_ordered():
    problem = parse_problem(
        "[ring]\ncodomain = w1, w2\n[actions]\npoint = 1, 1/2\n"
        "action2 = s: w1, w2 + s\naction1 = t: w1 + t, w2\n"
    )
    assert problem.actions.steps == ["t: w1 + t, w2", "s: w1, w2 + s"]
    assert problem.base_point() == (1, Fraction(1, 2))
    f = problem.orbit_map()
    assert f.domain.variables == ("a1", "a2")
    assert f.coordinates == (poly("1 + a1", f.domain), poly("1/2 + a2", f.domain))


def test_explicit_action_must_be_an_action():
    problem = parse_problem(
        "[ring]\ncodomain = w1, w2\n"
        "[actions]\npoint = 0, 0\naction1 = t: w1 + t^2, w2\n"
    )
    with pytest.raises(GroupLawError) as info:
        problem.action_list()
    assert "phi(s, phi(t, w))" in str(info.value)


def test_restriction():
    problem = load_problem(PROBLEMS / "twisted_cubic_orbit.ini")
    f = problem.orbit_map()
    assert f.domain == ring("a", "b", "c")


@pytest.mark.parametrize(
    "actions",
    [
        "point = 1, 0\naction1 = winkelmann 2\n",
        "point = 1, 0, 0\naction1 = rotate\n",
        "point = 1, 0, 0\nautomorphism = w1, w2, w3\naction1 = winkelmann 2\n",
        "point = 1, x, 0\naction1 = winkelmann 2\n",
        "point = 1, 0, 0\naction1 = winkelmann 2\nrestrict = d = c\n",
    ],
)
def test_bad_actions(actions):
    problem = parse_problem(
        "[ring]\ncodomain = w1, w2, w3\n[target]\nq1 = w3\n[actions]\n" + actions
    )
    with pytest.raises(ProblemFileError):
        problem.orbit_map()


def test_map_needs_every_coordinate():
    problem = parse_problem("[ring]\ndomain = a\ncodomain = w1, w2\n[map]\nw1 = a\n")
    with pytest.raises(ProblemFileError):
        problem.polynomial_map()


def test_parse_error_position():
    problem = parse_problem("[ring]\ndomain = a\ncodomain = w1\n[map]\nw1 = a ^ ^ 2\n")
    with pytest.raises(ParseError) as info:
        problem.polynomial_map()
    assert info.value.message.startswith("[map] w1:")
    assert info.value.column > 1


def test_configure_prefers_command_line_values():
    problem = parse_problem(
        "[ring]\ncodomain = w1, w2\n[target]\nq1 = w2\n"
        "[options]\nseed = 4\nsamples = 6\nround_limit_extra = 1\n"
    )
    config = problem.configure(Config())
    assert (config.seed, config.sampling.samples) == (4, 6)
    assert config.engine.round_limit_extra == 1
    overridden = problem.configure(Config(), seed=9, samples=2)
    assert (overridden.seed, overridden.sampling.samples) == (9, 2)


def test_invalid_option_values():
    problem = parse_problem(
        "[ring]\ncodomain = w1, w2\n[target]\nq1 = w2\n[options]\nslice_retries = 0\n"
    )
    with pytest.raises(ProblemFileError):
        problem.configure(Config())


@pytest.mark.parametrize(
    "flag, in_hyperplane",
    [("true", False), ("yes", False), ("1", False), ("off", True), ("false", True)],
)
def test_general_flag_is_a_boolean(flag, in_hyperplane):
    problem = parse_problem(
        f"[ring]\ncodomain = w1, w2\n[target]\nq1 = w2 - w1\ngeneral = {flag}\n"
    )
    assert problem.target.general is not in_hyperplane
    assert problem.target_variety().in_hyperplane is in_hyperplane


@pytest.mark.parametrize(
    "section", ["q1 = w2\ngeneral = maybe\n", "qq = w2\n", "q1 = w2\nq2 = \n"]
)
def test_bad_target_sections(section):
    with pytest.raises(ProblemFileError):
        parse_problem("[ring]\ncodomain = w1, w2\n[target]\n" + section)


def test_empty_target_section():
    problem = parse_problem("[ring]\ncodomain = w1, w2\n[target]\n")
    with pytest.raises(ProblemFileError):
        problem.target_variety()


def test_stated_complement(w_ring):
    problem = load_problem(PROBLEMS / "line_image.ini")
    stated = problem.stated_complement()
    assert stated.generators == (w_ring.gen("w2"),)
    assert parse_problem("[ring]\ncodomain = w1\n").stated_complement() is None
    with pytest.raises(ProblemFileError):
        parse_problem("[ring]\ncodomain = w1\n[expect]\nimage = w1\n")
