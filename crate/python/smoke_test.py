"""Smoke test for the Python extension.

Build first:
    cargo build --release -p tourney-py --features extension-module
    cp target/release/libtourney.so python/tourney.so
"""

import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import tourney


def main():
    c9 = tourney.carousel(9)
    assert c9.n == 9
    assert set(c9.out_degrees()) == {4}
    counts = c9.census()["counts"]
    assert counts["c4"] == 90 == tourney.c4_max_formula(9)
    assert counts["c3plus"] == 0 and counts["c3minus"] == 0

    c3 = tourney.Tournament(3, "101")
    assert c3.count("C3") == 1
    assert c3.is_isomorphic(c3.reverse())

    r = tourney.random_tournament(30, seed=5)
    assert r == tourney.random_tournament(30, seed=5)
    assert r.census()["counts"] == r.census(bruteforce=True)["counts"]
    small = tourney.random_tournament(12, seed=2)
    assert small.relabel(list(range(12))[::-1]).canonical_form() == small.canonical_form()

    best = tourney.exhaustive_max("C4", 6)
    assert best["best_count"] == 12
    assert sorted(best["maximizers"]) == sorted(tourney.carousel_class(6))
    assert len(tourney.enumerate_tournaments(5)) == 12

    opt = tourney.optimize_alpha(1e-9)
    assert abs(opt["alpha_star"] - 0.1435836) < 1e-7
    assert abs(tourney.alpha_objective(0.5) - 0.075) < 1e-15

    t, levels = tourney.iterated_blowup(4000, seed=7)
    assert len(levels) == 4000
    assert tourney.diagnose(t)["cut"]["partition"]["cut_violation_count"] == 0

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "x.tour")
        tourney.write_tour(path, [c9, c3])
        assert tourney.read_tour(path) == [c9, c3]

    try:
        tourney.Tournament(3, "10")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed bits accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
