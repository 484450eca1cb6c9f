import math

import numpy as np
import pytest

from loggen import logrep
from loggen.dunford import fit_certificate
from loggen.errors import CertificateError, DomainError, HorizonError, SingularFactorError, ValidationError
from loggen.evolution import (
    EvolutionFamily,
    EvolutionOperator,
    Profile,
    evolution_operator,
    nilpotent_family,
    rotation_family,
    scalar_family,
    solve_cauchy,
    zero_family,
)
from loggen.logrep import (
    alt_generator,
    dt_alt_generator,
    observed_order,
    pre_infinitesimal,
    proof_chain_check,
    reconstruct_generator,
    reconstruction_sweep,
    regularized_trajectory,
    window_certificate,
)
from loggen.operators import operator_norm

E = math.e
M_NIL = np.array([[0.0, 1.0], [0.0, 0.0]])


def scalar_setup(kappa=1.0):
    fam = scalar_family()
    return fam, window_certificate(fam, 0.0, kappa=kappa)


def nil_setup(kappa=1.0):
    fam = nilpotent_family()
    return fam, window_certificate(fam, 0.0, kappa=kappa)


def random_family(seed=3, dim=4):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    M /= operator_norm(M)
    return EvolutionFamily(M, Profile("sin", {"omega": 2.0, "amplitude": 1.2}), 2.0)


# -- alt_generator ------------------------------------------------------------------------


def test_window_certificate_covers_window():
    fam = rotation_family()
    cert = window_certificate(fam, 0.0)
    for t in np.linspace(0.0, fam.T_max, 17):
        spectral, origin = cert.margins(evolution_operator(fam, t, 0.0).U)
        assert spectral > 0 and origin > 0


def test_alt_generator_equal_times():
    fam, cert = scalar_setup()
    assert alt_generator(fam, 0.5, 0.5, cert).a[0, 0] == pytest.approx(math.log(2), abs=1e-13)
    fam, cert = nil_setup()
    assert np.abs(alt_generator(fam, 0.3, 0.3, cert).a - math.log(2) * np.eye(2)).max() <= 1e-13


def test_alt_generator_scalar():
    fam, cert = scalar_setup()
    a = alt_generator(fam, 1.0, 0.0, cert).a
    assert a[0, 0] == pytest.approx(math.log(E + 1), abs=1e-12)


def test_alt_generator_nilpotent():
    fam, cert = nil_setup()
    a = alt_generator(fam, 1.0, 0.0, cert).a
    assert np.abs(a - (math.log(2) * np.eye(2) + 0.75 * M_NIL)).max() <= 1e-12


def test_alt_generator_rejects_foreign_certificate():
    fam = scalar_family(rate=3.0, T_max=2.0)
    cert = window_certificate(scalar_family(T_max=0.1), 0.0)
    with pytest.raises(CertificateError):
        alt_generator(fam, 2.0, 0.0, cert)


# -- dt_alt_generator ------------------------------------------------------------------------


def test_dt_alt_generator_zero_family():
    fam = zero_family(2)
    cert = window_certificate(fam, 0.0, kappa=1.0)
    for h in (1e-1, 1e-3):
        assert np.abs(dt_alt_generator(fam, 1.0, 0.0, cert, h)).max() <= 1e-12


def test_dt_alt_generator_scalar():
    fam, cert = scalar_setup()
    D = dt_alt_generator(fam, 1.0, 0.0, cert, 1e-3)
    assert abs(D[0, 0] - E / (E + 1)) <= 1e-6


def test_dt_alt_generator_nilpotent():
    # a(t, 0) = ln 2 I + phi(t)/2 M with phi(t) = t + t^2/2, so da/dt = (1 + t)/2 M
    fam, cert = nil_setup()
    for t in (0.5, 1.0, 1.5):
        D = dt_alt_generator(fam, t, 0.0, cert, 1e-3)
        assert np.abs(D - (1 + t) / 2 * M_NIL).max() <= 1e-9


def test_dt_alt_generator_stencil_checks():
    fam, cert = scalar_setup()
    with pytest.raises(DomainError):
        dt_alt_generator(fam, 0.0005, 0.0, cert, 1e-3)
    with pytest.raises(DomainError):
        dt_alt_generator(fam, 1.9999, 0.0, cert, 1e-3)
    with pytest.raises(ValidationError):
        dt_alt_generator(fam, 1.0, 0.0, cert, 0.0)


# -- reconstruct_generator -------------------------------------------------------------------


def test_reconstruct_zero_family():
    fam = zero_family(3)
    cert = window_certificate(fam, 0.0, kappa=1.0)
    rep = reconstruct_generator(fam, 1.0, 0.0, cert, 1e-3)
    assert np.abs(rep.A_hat).max() <= 1e-10


def test_reconstruct_scalar():
    fam, cert = scalar_setup()
    rep = reconstruct_generator(fam, 1.0, 0.0, cert, 1e-3)
    assert rep.error <= 1e-6
    assert rep.N == 128 and rep.kappa == 1.0 and rep.h == 1e-3 and not rep.richardson


def test_reconstruct_nilpotent():
    fam, cert = nil_setup()
    rep = reconstruct_generator(fam, 1.0, 0.0, cert, 1e-3)
    assert np.abs(rep.A_hat - 2 * M_NIL).max() <= 1e-6
    assert rep.error <= 1e-6


def test_reconstruct_default_certificate_rotation():
    fam = rotation_family()
    cert = window_certificate(fam, 0.0)
    rep = reconstruct_generator(fam, 1.0, 0.0, cert, 1e-3)
    assert rep.error <= 1e-5


def test_reconstruct_is_reproducible():
    fam, cert = scalar_setup()
    r1 = reconstruct_generator(fam, 1.0, 0.0, cert, 1e-3)
    r2 = reconstruct_generator(fam, r1.t, r1.s, cert.with_nodes(r1.N), r1.h, r1.richardson)
    assert np.array_equal(r1.A_hat, r2.A_hat)


def test_differencing_order():
    fam, cert = scalar_setup()
    hs = [1e-2, 5e-3, 2.5e-3]
    reps = reconstruction_sweep(fam, 1.0, 0.0, cert, hs, [128])
    assert math.isnan(reps[0].order_estimate)
    for rep in reps[1:]:
        assert 1.8 <= rep.order_estimate <= 2.2


def test_richardson_order():
    fam, cert = scalar_setup()
    reps = reconstruction_sweep(fam, 1.0, 0.0, cert, [0.1, 0.05, 0.025], [128], richardson=True)
    assert all(rep.order_estimate >= 3.5 for rep in reps[1:])


def test_sweep_ordering():
    fam = scalar_family()
    cert = window_certificate(fam, 0.0)
    reps = reconstruction_sweep(fam, 1.0, 0.0, cert, [1e-2, 5e-3], [64, 128])
    assert [(r.N, r.h) for r in reps] == [(64, 1e-2), (64, 5e-3), (128, 1e-2), (128, 5e-3)]


def test_observed_order_degenerate():
    assert math.isnan(observed_order(0.1, 0.0, 0.05, 1.0))
    assert observed_order(0.1, 4.0, 0.05, 1.0) == pytest.approx(2.0)


def test_s_independence():
    for fam in (scalar_family(), nilpotent_family(), rotation_family()):
        t = 1.0
        r0 = reconstruct_generator(fam, t, 0.0, window_certificate(fam, 0.0), 1e-3)
        r1 = reconstruct_generator(fam, t, t / 2, window_certificate(fam, t / 2), 1e-3)
        bound = 2 * max(r0.error, r1.error)
        assert operator_norm(r0.A_hat - r1.A_hat) <= max(bound, 1e-12)


def test_singular_factor(monkeypatch):
    # a singular U puts kappa itself in the spectrum of U + kappa I
    fam = nilpotent_family()
    cert = fit_certificate(1.0, [1.0, 2.0])

    def singular(fam_, t, s, method="closed_form", h_step=None):
        return EvolutionOperator(np.diag([0.0, 1.0]), t, s, method, None)

    monkeypatch.setattr(logrep, "evolution_operator", singular)
    with pytest.raises(SingularFactorError):
        reconstruct_generator(fam, 1.0, 0.0, cert, 1e-3)


# -- pre_infinitesimal -------------------------------------------------------------------------


def test_probe_zero_family():
    probe = pre_infinitesimal(zero_family(2), 0.5, [1.0, 0.0])
    assert probe.converged
    assert not np.any(probe.limits)
    assert probe.error == 0.0


def test_probe_scalar_images():
    probe = pre_infinitesimal(scalar_family(), 0.0, [1.0])
    k = probe.h_sequence.index(1e-4)
    assert probe.limits[k][0].real == pytest.approx(math.expm1(1e-4) / 1e-4, rel=1e-10)
    assert probe.limits[k][0].real == pytest.approx(1.00005, abs=1e-8)
    assert probe.converged and probe.error <= 1e-5


def test_probe_nilpotent():
    probe = pre_infinitesimal(nilpotent_family(), 0.0, [0.0, 1.0])
    assert probe.converged
    assert np.abs(probe.limit - [1.0, 0.0]).max() <= 1e-5


def test_probe_nonconvergence_is_a_verdict():
    probe = pre_infinitesimal(scalar_family(), 0.0, [1.0], h_sequence=[0.5, 0.25, 0.125])
    assert not probe.converged
    assert probe.limit is None and probe.error == math.inf


def test_probe_validation():
    fam = scalar_family()
    with pytest.raises(ValidationError):
        pre_infinitesimal(fam, 0.0, [0.0])
    with pytest.raises(ValidationError):
        pre_infinitesimal(fam, 0.0, [1.0], h_sequence=[1e-2, 1e-1])
    with pytest.raises(HorizonError):
        pre_infinitesimal(fam, 1.95, [1.0])


def test_probe_matches_reconstruction():
    fam = rotation_family()
    u = np.array([1.0, -2.0])
    t = 1.0
    probe = pre_infinitesimal(fam, t, u)
    rep = reconstruct_generator(fam, t, 0.0, window_certificate(fam, 0.0), 1e-3)
    assert probe.converged
    assert np.linalg.norm(probe.limit - rep.A_hat @ u) <= 1e-5 + rep.error * np.linalg.norm(u)


# -- regularized_trajectory --------------------------------------------------------------------


def test_regularized_equal_times():
    fam, cert = scalar_setup()
    assert regularized_trajectory(fam, 0.7, 0.7, cert, [1.0])[0] == pytest.approx(1.0, abs=1e-13)


def test_regularized_scalar():
    fam, cert = scalar_setup()
    assert regularized_trajectory(fam, 1.0, 0.0, cert, [1.0])[0] == pytest.approx(E, abs=1e-12)


def test_regularized_random_family():
    fam = random_family()
    cert = window_certificate(fam, 0.0)
    rng = np.random.default_rng(0)
    u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    for t in np.linspace(0.0, 2.0, 9):
        diff = regularized_trajectory(fam, t, 0.0, cert, u) - evolution_operator(fam, t, 0.0).U @ u
        assert np.linalg.norm(diff) <= 1e-9


def test_regularized_identity_on_solved_trajectory():
    fam = random_family(5)
    cert = window_certificate(fam, 0.0)
    u0 = np.ones(4, dtype=complex)
    traj = solve_cauchy(fam, u0, None, np.linspace(0.0, 2.0, 33))
    for t, u in zip(traj.grid, traj.states):
        assert np.linalg.norm(regularized_trajectory(fam, t, 0.0, cert, u0) - u) <= 1e-9


# -- proof chain ----------------------------------------------------------------------------------


def test_proof_chain_zero_family():
    fam = zero_family(2)
    cert = window_certificate(fam, 0.0, kappa=1.0)
    rows = proof_chain_check(fam, 1.0, 0.0, cert, 1e-3)
    assert [name for name, _ in rows] == ["log_derivative", "chain_i", "chain_ii"]
    assert all(r <= 1e-12 for _, r in rows)


@pytest.mark.parametrize("setup", [scalar_setup, nil_setup], ids=["scalar", "nilpotent"])
def test_proof_chain_families(setup):
    fam, cert = setup()
    rows = proof_chain_check(fam, 1.0, 0.0, cert, 1e-3)
    assert all(r <= 1e-6 for _, r in rows)
