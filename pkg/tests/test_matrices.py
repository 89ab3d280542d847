"""Twisted matrices: inversion, triangularization, F-torsion, identities."""

import pytest
from gmpy2 import mpq

from novikov import sampling, series as ts
from novikov.errors import NotInvertibleError
from novikov.linalg import mat_identity
from novikov.matrices import (
    TwistedMatrix,
    block_diag,
    constant_pair,
    det_cofactor,
    det_linear_pencil,
    invert_series_matrix,
    relative_f_torsion,
    replay_ops,
    swap_sign_matrix,
    theta_shift,
    witt_triangularize,
)
from novikov.rings import Rationals, identity_auto
from novikov.series import LAURENT, POLY, SERIES, TwistCtx

Q = Rationals()
QCTX = TwistCtx(Q, identity_auto(Q))


def qm(rows):
    return [[mpq(x) for x in r] for r in rows]


def test_identity_and_involution():
    m = TwistedMatrix.from_const(QCTX, qm([[2, 1], [3, 5]]))
    ident = TwistedMatrix.identity(QCTX, 2)
    assert ident.mul(m) == m
    swap = TwistedMatrix.from_const(QCTX, qm([[0, 1], [1, 0]]))
    assert swap.mul(swap) == ident


def test_twist_forced_value():
    # moving a coefficient past z: (i as 1x1) * (z) = z * rho(i) = z*(-i)
    gctx = sampling.stock_contexts()["gaussian-conj"]
    G = gctx.ring
    i_mat = TwistedMatrix.from_const(gctx, [[G.i()]])
    z_mat = TwistedMatrix.monomial(gctx, 1, [[G.one()]])
    prod = i_mat.mul(z_mat)
    assert prod.coeffs == {1: ((G.neg(G.i()),),)}
    # while (z)*(i) keeps the right-form coefficient i
    assert z_mat.mul(i_mat).coeffs == {1: ((G.i(),),)}


def test_unipotent_inverse():
    m = TwistedMatrix(QCTX, SERIES, 2, 2,
                      {0: qm([[1, 0], [0, 1]]), 1: qm([[0, 1], [0, 0]])}, 6)
    pair = invert_series_matrix(m, 6)
    assert pair.beta.coeffs == {0: ((mpq(1), mpq(0)), (mpq(0), mpq(1))),
                                1: ((mpq(0), mpq(-1)), (mpq(0), mpq(0)))}


def test_series_inversion_example():
    m = TwistedMatrix(QCTX, SERIES, 2, 2,
                      {0: qm([[1, 0], [0, 1]]), 1: qm([[0, 1], [1, 0]])}, 4)
    pair = invert_series_matrix(m, 4)
    assert pair.beta.entry(0, 0).coeffs == {0: mpq(1), 2: mpq(1)}
    assert pair.beta.entry(0, 1).coeffs == {1: mpq(-1), 3: mpq(-1)}
    assert pair.beta.entry(1, 0).coeffs == {1: mpq(-1), 3: mpq(-1)}
    assert pair.beta.entry(1, 1).coeffs == {0: mpq(1), 2: mpq(1)}


def test_series_inversion_singular_definitive():
    m = TwistedMatrix(QCTX, SERIES, 1, 1, {1: qm([[1]])}, 6)
    with pytest.raises(NotInvertibleError):
        invert_series_matrix(m, 6)


def test_series_inversion_random_all_kinds():
    for name, ctx in sampling.stock_contexts().items():
        rng = sampling.rng_for(f"inv-mat-{name}")
        for _ in range(10):
            n = rng.randint(1, 4)
            m = sampling.sample_series_matrix(ctx, rng, n, rng.randint(1, 3), 10)
            pair = invert_series_matrix(m, 10)
            assert pair.verified_to >= 10


def test_triangularize_identity():
    ident = TwistedMatrix.identity(QCTX, 3, SERIES, 8)
    cert = witt_triangularize(ident, 8)
    assert not cert.ops
    assert cert.diag_product().coeffs == {0: mpq(1)}


def test_triangularize_example():
    m = TwistedMatrix(QCTX, SERIES, 2, 2,
                      {0: qm([[1, 0], [0, 1]]), 1: qm([[0, 1], [1, 0]])}, 6)
    cert = witt_triangularize(m, 6)
    assert len(cert.ops) == 1
    assert cert.diag_product().coeffs == {0: mpq(1), 2: mpq(-1)}
    assert cert.gamma.entry(1, 0).is_zero()
    # replay reproduces gamma exactly
    assert replay_ops(m, cert.ops, 6).agrees_with(cert.gamma, 6)
    # determinant oracle
    det = det_cofactor(m)
    assert det.agrees_with(cert.diag_product(), 6)


def test_triangularize_needs_identity_constant():
    m = TwistedMatrix.from_const(QCTX, qm([[2]]), POLY)
    with pytest.raises(NotInvertibleError):
        witt_triangularize(m, 4)


def test_triangularize_already_triangular_matrix_base():
    m2 = sampling.stock_contexts()["m2q-swap"]
    e12 = m2.ring.unit_elem(0, 1)
    # coefficients are 1x1 matrices whose single entry lives in M2(Q)
    b = TwistedMatrix(m2, SERIES, 1, 1, {0: ((m2.ring.one(),),), 1: ((e12,),)}, 8)
    cert = witt_triangularize(b, 8)
    assert not cert.ops
    assert cert.diag_product().coeffs == {0: m2.ring.one(), 1: e12}


def test_triangularize_random_oracle_and_replay():
    rng = sampling.rng_for("tri-oracle")
    for _ in range(40):
        n = rng.randint(1, 4)
        m, _ = sampling.sample_invertible_const(Q, rng, n)
        coeffs = {0: mat_identity(Q, n)}
        for d in range(1, rng.randint(2, 4)):
            coeffs[d] = [[sampling.sample_elem(Q, rng, 2) for _ in range(n)]
                         for _ in range(n)]
        b = TwistedMatrix(QCTX, SERIES, n, n, coeffs, 8)
        cert = witt_triangularize(b, 8)
        assert replay_ops(b, cert.ops, 8).agrees_with(cert.gamma, 8)
        for op in cert.ops:
            assert op.lam.coeff(0) == mpq(0)  # unipotent operations
        det = det_cofactor(b)
        assert det.agrees_with(cert.diag_product(), 8)


def test_relative_f_torsion_examples():
    c = TwistedMatrix.from_const(QCTX, qm([[5, 0], [0, 5]]), POLY)
    m0, second = relative_f_torsion(c)
    assert second.is_identity_mod(1) and not second.coeffs.get(1)
    one_plus_z = TwistedMatrix(QCTX, POLY, 1, 1, {0: qm([[1]]), 1: qm([[1]])})
    m0, second = relative_f_torsion(one_plus_z)
    assert m0 == ((mpq(1),),)
    assert second.entry(0, 0).coeffs == {0: mpq(1), 1: mpq(1)}
    two_plus = TwistedMatrix(QCTX, POLY, 1, 1, {0: qm([[2]]), 1: qm([[2]])})
    m0, second = relative_f_torsion(two_plus)
    assert m0 == ((mpq(2),),)
    assert second.entry(0, 0).coeffs == {0: mpq(1), 1: mpq(1)}


def test_theta_shift_examples():
    assert theta_shift(QCTX, 2, 0) == TwistedMatrix.identity(QCTX, 2, LAURENT)
    t = theta_shift(QCTX, 2, 1)
    assert t.coeffs == {1: ((mpq(1), mpq(0)), (mpq(0), mpq(1)))}
    gctx = sampling.stock_contexts()["gaussian-conj"]
    G = gctx.ring
    th = theta_shift(gctx, 1, 1)
    from novikov.modules import VecSeries
    x = VecSeries.from_plain(gctx, (G.i(),))
    y = x.apply_matrix(th)
    assert y.coeffs == {1: (G.neg(G.i()),)}  # x -> z rho(x)


def test_swap_sign_matrix():
    s = swap_sign_matrix(QCTX, 1, 1)
    assert s.coeffs[0] == ((mpq(0), mpq(1)), (mpq(1), mpq(0)))
    assert swap_sign_matrix(QCTX, 0, 3) == TwistedMatrix.identity(QCTX, 3)
    _, second = relative_f_torsion(swap_sign_matrix(QCTX, 2, 1))
    assert second.is_identity_mod(1) and len(second.coeffs) == 1


def test_whitehead_lemma_identity():
    # diag(a, a^-1) as the four-factor unipotent/swap product, exactly
    rng = sampling.rng_for("whitehead")
    for name, ctx in sampling.stock_contexts().items():
        ring = ctx.ring
        for _ in range(10):
            a = sampling.sample_unit(ring, rng)
            ai = ring.invert(a)
            z, o = ring.zero(), ring.one()
            lhs = TwistedMatrix.from_const(ctx, [[a, z], [z, ai]])
            f1 = TwistedMatrix.from_const(ctx, [[o, a], [z, o]])
            f2 = TwistedMatrix.from_const(ctx, [[o, z], [ring.neg(ai), o]])
            f3 = TwistedMatrix.from_const(ctx, [[o, a], [z, o]])
            f4 = TwistedMatrix.from_const(ctx, [[z, ring.neg(o)], [o, z]])
            assert f1.mul(f2).mul(f3).mul(f4) == lhs


def test_elementary_commutator_identity():
    rng = sampling.rng_for("elem-comm")
    for name, ctx in sampling.stock_contexts().items():
        ring = ctx.ring
        for _ in range(10):
            e = sampling.sample_elem(ring, rng)
            z, o = ring.zero(), ring.one()
            g = TwistedMatrix.from_const(ctx, [[o, z, o], [z, o, z], [z, z, o]])
            h = TwistedMatrix.from_const(ctx, [[o, z, z], [z, o, z], [z, e, o]])
            gi = TwistedMatrix.from_const(ctx, [[o, z, ring.neg(o)], [z, o, z], [z, z, o]])
            hi = TwistedMatrix.from_const(ctx, [[o, z, z], [z, o, z], [z, ring.neg(e), o]])
            target = TwistedMatrix.from_const(ctx, [[o, e, z], [z, o, z], [z, z, o]])
            assert g.mul(h).mul(gi).mul(hi) == target


def test_det_linear_pencil_matches_cofactor():
    rng = sampling.rng_for("pencil")
    for _ in range(25):
        n = rng.randint(1, 4)
        a = [[sampling.sample_elem(Q, rng, 2) for _ in range(n)] for _ in range(n)]
        b = [[sampling.sample_elem(Q, rng, 2) for _ in range(n)] for _ in range(n)]
        m = TwistedMatrix(QCTX, LAURENT, n, n, {0: a, 1: b})
        lhs = det_cofactor(m)
        rhs = det_linear_pencil(QCTX, a, b, 1)
        assert lhs == rhs


def test_block_diag_and_constant_pair():
    m, mi = sampling.sample_invertible_const(Q, sampling.rng_for("cp"), 2)
    pair = constant_pair(QCTX, m)
    assert pair.verified_to == float("inf")
    b = block_diag([pair.alpha, TwistedMatrix.identity(QCTX, 1)])
    assert b.nrows == 3
