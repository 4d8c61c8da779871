import math

import numpy as np

from pwcycles.corpus import case_names, load_case
from pwcycles.cycles import SolutionKind, SolverConfig, find_cycles
from pwcycles.oracle import brute_force_cycles


def test_oracle_one_cycle_angles():
    res = brute_force_cycles(load_case("constant-center-one").system)
    assert res.kind == "Finite" and len(res.roots) == 1
    want = sorted([math.atan2(1, -2), math.atan2(-1, 2) % (2 * math.pi)])
    assert np.allclose(res.roots[0], want, atol=1e-8)


def test_oracle_outcome_kinds():
    assert brute_force_cycles(load_case("constant-center-continuum").system).kind == "Continuum"
    assert brute_force_cycles(load_case("constant-saddle-empty").system).kind == "Empty"
    res = brute_force_cycles(load_case("saddle-center-two").system)
    assert res.kind == "Finite" and len(res.roots) == 2


def test_oracle_roots_are_canonical():
    res = brute_force_cycles(load_case("saddle-center-homoclinic").system)
    for a, t in res.roots:
        assert 0 <= a < t < 2 * math.pi


def test_corpus_angles_agree_to_1e8():
    for name in case_names():
        Z = load_case(name).system
        rep = find_cycles(Z, SolverConfig(enforce_bounds=False))
        res = brute_force_cycles(Z)
        if rep.kind is SolutionKind.CONTINUUM:
            assert res.kind == "Continuum", name
            continue
        assert len(res.roots) == len(rep.solution_angles), name
        for got, want in zip(res.roots, rep.solution_angles):
            assert np.abs(np.subtract(got, want)).max() < 1e-8, name
