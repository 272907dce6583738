"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
All tolerances are pinned here; every expected number is a frozen closed-form
oracle (geometric-spectrum arithmetic, Shannon sums) computed independently
of the code paths under test.
"""

import functools
import math

import numpy as np

from nongauss import (
    FockDiagonal,
    GaussianParams,
    ModeConfig,
    brute_force_closest_gaussian,
    build_operators,
    coherent_state,
    closest_gaussian_fds,
    covariance,
    dephase,
    dephasing_entropy_gain,
    extract,
    fds_covariance,
    fit_associate,
    fock_projector,
    gaussian_cross_entropy,
    gaussian_entropy,
    log_form,
    max_entropy_sampling,
    nearest_fds_search,
    nongauss_fds,
    nongauss_product,
    nongaussianity,
    product_state,
    relative_entropy,
    single_mode_fds,
    single_mode_gaussian,
    synthesize_gaussian,
    tensor,
    theorem1_identity,
    thermal_state,
    to_density_matrix,
    total_mutual_information,
    von_neumann,
    williamson,
)
from nongauss.gaussian_states import single_mode_symplectic
from nongauss.moments import symplectic_form

from helpers import random_covariance, random_fds, random_state, random_symplectic

LN2 = math.log(2.0)

# Frozen independent oracles.
DELTA_FOCK1 = 2 * LN2                       # g(1), Shannon term zero
DELTA_FDS_HALF = 0.2616240718822739         # g(1/2) - ln 2
DELTA_FDS2 = 1.216395324324493              # 2 g(1/2) - ln 2
S_TH1_TH2 = 0.1177830356563836              # 2 ln 3 - 3 ln 2


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] {name}: FAIL")
                raise
            print(f"[acceptance] {name}: PASS")

        return wrapper

    return deco


@criterion("1. closed-form delta_S values (tol 1e-6)")
def test_criterion_1_closed_form_values():
    # Eq.-(38)-style closed form vs the generic moment pipeline, both against
    # frozen oracles and against the decimals quoted in the plan.
    cases = [
        (single_mode_fds([0.0, 1.0], cutoff=30), DELTA_FOCK1, 1.386294),
        (single_mode_fds([0.5, 0.5], cutoff=30), DELTA_FDS_HALF, 0.261624),
    ]
    lam = np.zeros((12, 12))
    lam[0, 0] = lam[1, 1] = 0.5
    cases.append(
        (FockDiagonal(config=ModeConfig((12, 12)), probabilities=lam), DELTA_FDS2, 1.216396)
    )
    for fds, oracle, quoted in cases:
        closed = nongauss_fds(fds)
        pipeline = nongaussianity(to_density_matrix(fds)).delta_S
        assert abs(closed - oracle) < 1e-6
        assert abs(pipeline - oracle) < 1e-6
        assert abs(closed - pipeline) < 1e-6
        assert abs(closed - quoted) < 1e-6

    gaussians = [
        thermal_state(1.0, 30),
        single_mode_gaussian(0.3, 0.2, 0.7, 0.4 - 0.2j, 36),
        single_mode_gaussian(0.0, 0.0, 0.0, 0.8, 30),   # coherent, pure
        single_mode_gaussian(0.5, 0.0, 0.0, 0.3j, 30),  # displaced thermal
    ]
    for rho in gaussians:
        assert abs(nongaussianity(rho).delta_S) < 1e-6


@criterion("2. Theorem 1 identity suite, 20 randomized pairs (tol 1e-5)")
def test_criterion_2_identity_suite():
    rng = np.random.default_rng(20240)
    pairs = []
    cfg1 = ModeConfig((30,))
    for _ in range(14):
        rho = random_state(cfg1, rng, levels=(7,), damping=0.4)
        ref = GaussianParams(
            occupancies=np.array([rng.uniform(0.8, 1.5)]),
            symplectic=single_mode_symplectic(rng.uniform(0, 0.25), rng.uniform(0, np.pi)),
            displacement=np.sqrt(2.0) * rng.uniform(-0.35, 0.35, size=2),
        )
        pairs.append((rho, ref))
    cfg2 = ModeConfig((16, 16))
    for _ in range(6):
        rho = random_state(cfg2, rng, levels=(3, 3), damping=0.8)
        ref = GaussianParams(
            occupancies=rng.uniform(0.5, 0.65, size=2),
            symplectic=random_symplectic(2, rng, scale=0.08),
            displacement=rng.uniform(-0.3, 0.3, size=4),
        )
        pairs.append((rho, ref))

    for rho, ref in pairs:
        ops = build_operators(rho.config)
        m = extract(rho, ops)
        rep = nongaussianity(rho)

        # Eq. (19): the Gaussian cross entropy depends on rho only through
        # its moments, so the associate Gaussian gives the same value.
        tau = synthesize_gaussian(fit_associate(m).params, rho.config, tail_tol=1e-4)
        lf = log_form(ref)
        eq19 = abs(gaussian_cross_entropy(m, lf) - gaussian_cross_entropy(extract(tau, ops), lf))
        assert eq19 < 1e-5, eq19

        # Eq. (24): S(rho|rho_G) - S(rho|tau_G) = S(tau_G|rho_G) >= 0
        chk = theorem1_identity(rho, ref)
        assert math.isfinite(chk.gap)
        assert chk.residual < 1e-5, chk.residual
        assert chk.gap >= -1e-9

        # Eq. (26): dense relative entropy equals the entropy difference
        dense = relative_entropy(rho, tau)
        assert abs(dense - rep.delta_S) < 1e-5


@criterion("3. Theorem 1 brute force + thermal spot value")
def test_criterion_3_brute_force():
    targets = [
        fock_projector(ModeConfig((30,)), (1,)),
        fock_projector(ModeConfig((30,)), (2,)),
        to_density_matrix(single_mode_fds([0.5, 0.5], cutoff=30)),
        to_density_matrix(dephase(coherent_state(1.0, 30))),
    ]
    for rho in targets:
        res = brute_force_closest_gaussian(rho)
        fit = fit_associate(extract(rho, build_operators(rho.config)))
        nbar_t = float(fit.nu[0] - 0.5)
        # all four targets are undisplaced and unsqueezed
        assert abs(res.nbar - nbar_t) <= 1.5 * res.resolution[0] + 1e-6
        assert abs(res.r) <= 1.5 * res.resolution[1] + 1e-6
        assert abs(res.alpha_re) <= 1.5 * res.resolution[3] + 1e-6
        assert abs(res.alpha_im) <= 1.5 * res.resolution[4] + 1e-6
        assert -1e-9 <= res.gap <= res.resolution_bound
        assert res.skipped == 0

    got = relative_entropy(thermal_state(1.0, 48), thermal_state(2.0, 48))
    assert abs(got - S_TH1_TH2) < 1e-6
    assert abs(got - 0.117783) < 1e-6


@criterion("4. Theorem 2: FDS covariance closed form and thermal fits")
def test_criterion_4_theorem2():
    rng = np.random.default_rng(42)
    battery = [
        single_mode_fds([0.0, 1.0], cutoff=30),
        single_mode_fds([0.5, 0.5], cutoff=30),
        random_fds(ModeConfig((30,)), rng, levels=(8,)),
        random_fds(ModeConfig((10, 10)), rng, levels=(5, 5)),
    ]
    lam = np.zeros((12, 12))
    lam[0, 0] = lam[1, 1] = 0.5
    fds2 = FockDiagonal(config=ModeConfig((12, 12)), probabilities=lam)
    battery.append(fds2)

    for fds in battery:
        ops = build_operators(fds.config)
        closed = fds_covariance(fds)
        dense = covariance(to_density_matrix(fds), ops)
        assert np.abs(closed.covariance - dense).max() < 1e-10

        from nongauss import marginals

        params = closest_gaussian_fds(fds)
        means = marginals(fds).means
        np.testing.assert_allclose(params.occupancies, means, atol=1e-12)
        np.testing.assert_array_equal(params.symplectic, np.eye(2 * fds.num_modes))
        np.testing.assert_array_equal(params.displacement, np.zeros(2 * fds.num_modes))

    # the pipeline's associate Gaussian of the two-mode FDS is the thermal
    # product with the same mean occupancies
    rep = nongaussianity(to_density_matrix(fds2))
    np.testing.assert_allclose(rep.associate.occupancies, [0.5, 0.5], atol=1e-9)
    tau = synthesize_gaussian(rep.associate, fds2.config, tail_tol=1e-3)
    expect = tensor([thermal_state(0.5, 12), thermal_state(0.5, 12)])
    assert np.abs(tau.data - expect.data).max() < 1e-7


@criterion("5. Corollary 3 on 50 random FDSs (tol 1e-9)")
def test_criterion_5_corollary_3():
    rng = np.random.default_rng(99)
    for k in range(50):
        if k % 2 == 0:
            fds = random_fds(ModeConfig((16,)), rng, levels=(8,))
        else:
            fds = random_fds(ModeConfig((8, 8)), rng, levels=(4, 4))
        nf = nongauss_fds(fds)
        npr = nongauss_product(fds)
        tmi = total_mutual_information(fds)
        assert abs(nf - npr - tmi) < 1e-9
        assert nf >= npr - 1e-12
        if fds.num_modes == 2 and tmi > 1e-9:
            assert nf > npr  # equality only on products
        prod = product_state(fds)
        assert abs(nongauss_fds(prod) - nongauss_product(prod)) < 1e-12


@criterion("6. Propositions 1-2: dephasing gain and 200 perturbations per state")
def test_criterion_6_propositions():
    rng = np.random.default_rng(7)
    states = [random_state(ModeConfig((30,)), rng, levels=(7,)) for _ in range(30)]
    states += [
        random_state(ModeConfig((8, 8)), rng, levels=(4, 4)) for _ in range(20)
    ]
    for i, rho in enumerate(states):
        gain = dephasing_entropy_gain(rho, check_tol=1e-5)  # raises if gain != S(rho|L(rho))
        assert gain >= -1e-9
        rep = nearest_fds_search(rho, num_perturbations=200, seed=1000 + i)
        assert rep.min_margin >= -1e-9
        assert rep.all_ok


@criterion("7. maximum-entropy property, 100 moment-constrained samples")
def test_criterion_7_max_entropy():
    cfg = ModeConfig((30,))
    m = extract(thermal_state(1.0, 30), build_operators(cfg))
    rep = max_entropy_sampling(m, 100, seed=2024, config=cfg)
    assert rep.num_samples == 100
    assert rep.max_sample_entropy <= rep.entropy_reference + 1e-8
    assert rep.all_ok


@criterion("8. numerical infrastructure: Williamson, synthesis, entropy")
def test_criterion_8_infrastructure():
    rng = np.random.default_rng(314)
    # Williamson round trip on 100 random valid covariance matrices
    for k in range(100):
        n = 1 if k % 2 == 0 else 2
        v, _ = random_covariance(
            n, rng, nu_range=(0.51, 6.0) if n == 1 else (0.55, 3.0), scale=0.4
        )
        s, nu = williamson(v)
        resid = np.abs(v - s @ np.diag(np.repeat(nu, 2)) @ s.T).max()
        assert resid < 1e-8 * np.abs(v).max()
        om = symplectic_form(n)
        assert np.abs(s @ om @ s.T - om).max() < 1e-10

    # synthesis moment round trip < 1e-6
    single_cases = [
        (0.4, 0.25, 0.9, 0.5 - 0.3j),
        (1.0, 0.0, 0.0, 0.0),
        (0.2, 0.3, 2.1, 0.2 + 0.6j),
    ]
    cfg = ModeConfig((36,))
    ops = build_operators(cfg)
    for nbar, r, phi, alpha in single_cases:
        rho = single_mode_gaussian(nbar, r, phi, alpha, 36)
        m = extract(rho, ops)
        s_mat = single_mode_symplectic(r, phi)
        target_v = (nbar + 0.5) * s_mat @ s_mat.T
        target_d = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
        assert np.abs(m.covariance - target_v).max() < 1e-6
        assert np.abs(m.displacement - target_d).max() < 1e-6

    cfg2 = ModeConfig((12, 12))
    ops2 = build_operators(cfg2)
    for _ in range(3):
        v, _ = random_covariance(2, rng, nu_range=(0.52, 0.62), scale=0.1)
        s, nu = williamson(v)
        params = GaussianParams(
            occupancies=nu - 0.5,
            symplectic=s,
            displacement=rng.uniform(-0.3, 0.3, size=4),
        )
        rho = synthesize_gaussian(params, cfg2, tail_tol=1e-6)
        import warnings as _w

        with _w.catch_warnings():
            _w.simplefilter("ignore")
            m = extract(rho, ops2)
        assert np.abs(m.covariance - v).max() < 1e-6
        assert np.abs(m.displacement - params.displacement).max() < 1e-6

    # gaussian_entropy vs dense von Neumann entropy < 1e-5
    for nbar, r, phi in [(1.0, 0.0, 0.0), (0.8, 0.2, 1.0), (0.3, 0.25, 0.4)]:
        params = GaussianParams(
            occupancies=np.array([nbar]),
            symplectic=single_mode_symplectic(r, phi),
            displacement=np.zeros(2),
        )
        rho = synthesize_gaussian(params, ModeConfig((36,)))
        assert abs(gaussian_entropy(params.nu) - von_neumann(rho)) < 1e-5
