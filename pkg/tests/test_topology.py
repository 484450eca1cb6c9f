import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loggen.errors import GridError, ValidationError
from loggen.evolution import Forcing, constant, scalar_family, solve_cauchy, zero_family
from loggen.operators import Functional, basis, left_shift
from loggen.topology import (
    TOPOLOGIES,
    OperatorSequence,
    ProbeSet,
    check_locally_strong,
    check_strong,
    check_uniform,
    check_weak,
    classify,
    constant_identity,
    dual_residual,
    left_shift_powers,
    right_shift_powers,
    run_all,
    run_suite,
    scaled_rank_one,
    separation_suite,
)

e = [None] + [basis(k) for k in range(1, 8)]


def dense_sequence(T, B, power):
    """``T_n = T + B / n^power`` (``power = 0`` never converges)."""
    return OperatorSequence(lambda n: T + B / n**power, T, "dense")


# -- classify ------------------------------------------------------------------------------


def test_classify_rules():
    assert classify([1.0, 0.5, 1e-9], 1e-8) == "converges"
    assert classify(np.ones(64), 1e-8) == "diverges"
    assert classify(np.arange(1.0, 65.0), 1e-8) == "diverges"
    assert classify([1.0, np.inf], 1e-8) == "diverges"
    # still decaying like 1/n: not enough evidence either way
    assert classify(1.0 / np.arange(1.0, 65.0), 1e-8) == "inconclusive"
    assert classify([1.0, 1e-9], 1e-8, allow_converge=False) == "inconclusive"


def test_probe_set_validation():
    with pytest.raises(ValidationError):
        ProbeSet((), (), e[1])
    with pytest.raises(ValidationError):
        ProbeSet((e[1],), (), e[2])


def test_sequence_indexing():
    with pytest.raises(IndexError):
        left_shift_powers()[0]
    assert left_shift_powers()[2].descriptor == left_shift(2).descriptor


# -- uniform -------------------------------------------------------------------------------


def test_uniform_one_over_n():
    seq = OperatorSequence(lambda n: np.eye(3) / n, np.zeros((3, 3)), "I/n")
    rep = check_uniform(seq, tol=0.02)
    assert rep.verdict == "converges"
    assert rep.residuals == pytest.approx(1.0 / np.arange(1, 65), rel=1e-12)


def test_uniform_left_shift_diverges():
    rep = check_uniform(left_shift_powers())
    assert rep.verdict == "diverges"
    assert np.all(rep.residuals == 1.0)
    # witness L^n e_{n+1} = e_1
    for n in (1, 5, 64):
        assert np.array_equal(left_shift(n)(basis(n + 1))[:1], [1.0])


def test_uniform_constant_identity():
    seq = OperatorSequence(lambda n: np.eye(2), np.eye(2), "I")
    rep = check_uniform(seq)
    assert rep.verdict == "converges" and np.all(rep.residuals == 0)


def test_uniform_action_never_converges():
    rep = check_uniform(constant_identity())
    assert rep.verdict == "inconclusive" and rep.final_residual == 0.0


# -- strong ---------------------------------------------------------------------------------


def test_strong_left_shift_converges():
    x = np.array([1.0, 0.0, 1 / 3])
    rep = check_strong(left_shift_powers(), ProbeSet((e[1], e[2], x), (), e[2]))
    assert rep.verdict == "converges" and rep.final_residual == 0.0


def test_strong_right_shift_diverges():
    rep = check_strong(right_shift_powers(), ProbeSet((e[1],), (), e[1]))
    assert rep.verdict == "diverges" and np.all(rep.residuals == 1.0)


def test_strong_identity():
    rep = check_strong(constant_identity(), ProbeSet((e[1], e[3]), (), e[1]))
    assert rep.verdict == "converges" and np.all(rep.residuals == 0)


# -- weak ------------------------------------------------------------------------------------


def test_weak_right_shift_converges():
    probes = ProbeSet(tuple(e[1:5]), tuple(e[1:5]), e[1])
    rep = check_weak(right_shift_powers(), probes)
    assert rep.verdict == "converges"
    # <R^n e_i, e_j> = [i + n = j]; nonzero only while n <= 3
    assert np.all(rep.residuals[3:] == 0) and rep.residuals[0] == 1.0


def test_weak_rank_one_diverges():
    rep = check_weak(scaled_rank_one(), ProbeSet((e[2],), (e[3],), e[2]))
    assert rep.verdict == "diverges"
    assert rep.residuals == pytest.approx(np.arange(1, 65))


def test_weak_identity_and_validation():
    assert check_weak(constant_identity(), ProbeSet((e[1],), (e[1],), e[1])).verdict == "converges"
    with pytest.raises(ValidationError):
        check_weak(constant_identity(), ProbeSet((e[1],), (), e[1]))


# -- locally strong ---------------------------------------------------------------------------


def test_locally_strong_examples():
    assert check_locally_strong(scaled_rank_one(), e[1]).verdict == "converges"
    rep = check_locally_strong(left_shift_powers(), e[3])
    assert rep.verdict == "converges"
    assert np.all(rep.residuals[2:] == 0) and np.all(rep.residuals[:2] == 1)
    assert check_locally_strong(constant_identity(), e[4] + 2j * e[4]).verdict == "converges"
    with pytest.raises(ValidationError):
        check_locally_strong(constant_identity(), [0.0, 0.0])


# -- suite -------------------------------------------------------------------------------------


def test_suite_has_three_families():
    suite = separation_suite()
    assert [s.family.descriptor for s in suite] == ["left_shift^n", "right_shift^n", "scaled_rank_one"]
    for entry in suite:
        assert set(entry.expected) == set(TOPOLOGIES)


def test_suite_reproduces_matrix():
    result = run_suite()
    assert len(result.rows) == 12
    mismatches = [r for r in result.rows if r[2] != r[3]]
    assert not mismatches
    assert all(ok for _, _, ok in result.implications)
    assert result.matches


def test_suite_left_shift_locally_strong_at_e2():
    assert check_locally_strong(left_shift_powers(), e[2]).verdict == "converges"


def test_separation_witness_rank_one():
    reps = run_all(scaled_rank_one(), ProbeSet((e[1], e[2]), (e[3],), e[1]))
    assert reps["locally_strong"].verdict == "converges"
    assert reps["weak"].verdict == "diverges"


def test_witness_table():
    rep = check_strong(right_shift_powers(), ProbeSet((e[1],), (), e[1]), n_max=4)
    assert rep.witness() == [(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)]


# -- implications on random dense sequences -----------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.sampled_from([0.0, 1.0, 2.0, 12.0]))
def test_implications_dense(seed, dim, power):
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    B = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    vecs = [rng.standard_normal(dim) + 1j * rng.standard_normal(dim) for _ in range(3)]
    funcs = [Functional(f / np.linalg.norm(f)) for f in (rng.standard_normal(dim) for _ in range(3))]
    probes = ProbeSet(tuple(vecs), tuple(funcs), vecs[1])
    reps = run_all(dense_sequence(T, B, power), probes, n_max=32, tol=1e-8)
    u, s, w, ls = (reps[k].residuals for k in TOPOLOGIES)
    slack = 1e-12 * (1 + u)
    assert np.all(u + slack >= s)
    assert np.all(s + slack >= w)
    assert np.all(s + slack >= ls)
    if reps["uniform"].verdict == "converges":
        assert reps["strong"].verdict == "converges"
    if reps["strong"].verdict == "converges":
        assert reps["locally_strong"].verdict == "converges"
        assert reps["weak"].verdict == "converges"
    if power == 0.0:
        assert reps["uniform"].verdict == "diverges"


# -- dual residual ----------------------------------------------------------------------------------


def test_dual_residual_trivial():
    fam = zero_family(2)
    traj = solve_cauchy(fam, [1.0, -1.0], None, np.linspace(0.0, 1.0, 16))
    assert np.all(dual_residual(traj, fam, None, [1.0, 2.0]) <= 1e-12)


def scalar_dual(points):
    fam = scalar_family()
    f = Forcing([1.0], constant(1.0))
    traj = solve_cauchy(fam, [0.0], f, np.linspace(0.0, 1.0, points))
    return dual_residual(traj, fam, f, Functional([1.0]))


def test_dual_residual_scalar():
    assert scalar_dual(256).max() <= 1e-4


def test_dual_residual_second_order():
    # 256 points has step 1/255; 511 points halves it
    ratio = scalar_dual(256).max() / scalar_dual(511).max()
    assert ratio == pytest.approx(4.0, rel=0.05)


def test_dual_residual_grid_error():
    fam = scalar_family()
    traj = solve_cauchy(fam, [1.0], None, [0.0, 1.0])
    with pytest.raises(GridError):
        dual_residual(traj, fam, None, [1.0])
