"""Witt vector group structure and the noninjectivity counterexample."""

import pytest
from gmpy2 import mpq

from novikov import sampling, series as ts
from novikov.errors import NoWitnessError
from novikov.rings import GroupRing, MatrixRing, Rationals, identity_auto
from novikov.groups import symmetric3
from novikov.series import SERIES, TwistCtx, TwistedSeries
from novikov.witt import (
    conjugation_kernel_report,
    first_coefficient,
    kernel_element,
    noninjectivity_witness,
    witt_commutator,
    witt_group_op,
    witt_inv,
    witt_mul,
)

Q = Rationals()
QCTX = TwistCtx(Q, identity_auto(Q))
M2 = MatrixRing(2, Rationals())
M2CTX = TwistCtx(M2, identity_auto(M2))
QS3 = GroupRing(symmetric3(), Rationals())
S3CTX = TwistCtx(QS3, identity_auto(QS3))


def test_commutator_of_self_is_one():
    rng = sampling.rng_for("comm-self")
    u = sampling.sample_witt(M2CTX, rng, 10)
    c = witt_commutator(u, u)
    assert c.coeffs == {0: M2.one()}


def test_commutator_commutative_ring():
    u = TwistedSeries(QCTX, SERIES, {0: mpq(1), 1: mpq(1)}, 10)
    v = TwistedSeries(QCTX, SERIES, {0: mpq(1), 2: mpq(1)}, 10)
    assert witt_group_op("commutator", u, v).coeffs == {0: mpq(1)}


def test_commutator_matrix_ring_degree_two():
    e12, e21 = M2.unit_elem(0, 1), M2.unit_elem(1, 0)
    e11, e22 = M2.unit_elem(0, 0), M2.unit_elem(1, 1)
    u = TwistedSeries(M2CTX, SERIES, {0: M2.one(), 1: e12}, 8)
    v = TwistedSeries(M2CTX, SERIES, {0: M2.one(), 1: e21}, 8)
    c = witt_commutator(u, v)
    assert c.coeff(0) == M2.one()
    assert M2.is_zero(c.coeff(1))
    assert c.coeff(2) == M2.sub(e11, e22)


def test_first_coefficient_examples_and_additivity():
    s = TwistedSeries(QCTX, SERIES, {0: mpq(1), 1: mpq(3), 2: mpq(5)}, 8)
    assert first_coefficient(s) == mpq(3)
    for name, ctx in sampling.stock_contexts().items():
        rng = sampling.rng_for(f"fc-{name}")
        for _ in range(40):
            u = sampling.sample_witt(ctx, rng, 8)
            v = sampling.sample_witt(ctx, rng, 8)
            lhs = first_coefficient(witt_mul(u, v))
            rhs = ctx.ring.add(first_coefficient(u), first_coefficient(v))
            assert lhs == rhs


def test_products_of_commutators_have_zero_first_coefficient():
    for name, ctx in (("m2", M2CTX), ("s3", S3CTX)):
        rng = sampling.rng_for(f"commprod-{name}")
        for _ in range(40):
            prod = None
            for _ in range(rng.randint(1, 4)):
                u = sampling.sample_witt(ctx, rng, 8)
                v = sampling.sample_witt(ctx, rng, 8)
                c = witt_commutator(u, v)
                prod = c if prod is None else witt_mul(prod, c)
            assert ctx.ring.is_zero(first_coefficient(prod))


def test_kernel_element_central_unit():
    rng = sampling.rng_for("kc")
    x = sampling.sample_witt(M2CTX, rng, 8)
    two = M2.add(M2.one(), M2.one())
    y = kernel_element(M2CTX, two, x)  # scalars are central
    assert y.coeffs == {0: M2.one()}


def test_kernel_element_swap_example():
    swap = M2.add(M2.unit_elem(0, 1), M2.unit_elem(1, 0))
    e11, e22 = M2.unit_elem(0, 0), M2.unit_elem(1, 1)
    x = TwistedSeries(M2CTX, SERIES, {0: M2.one(), 1: e11}, 8)
    y = kernel_element(M2CTX, swap, x)
    assert first_coefficient(y) == M2.sub(e22, e11)


def test_kernel_element_s3():
    g = QS3.basis_elem(QS3.group.index["s"])      # a transposition
    h = QS3.basis_elem(QS3.group.index["r"])      # a 3-cycle
    x = TwistedSeries(S3CTX, SERIES, {0: QS3.one(), 1: h}, 8)
    y = kernel_element(S3CTX, g, x)
    conj = QS3.mul(QS3.mul(g, h), QS3.invert(g))
    assert first_coefficient(y) == QS3.sub(conj, h)
    assert not QS3.is_zero(first_coefficient(y))


def test_noninjectivity_witness_m2():
    y, obstruction, cert = noninjectivity_witness(M2CTX)
    e11, e22 = M2.unit_elem(0, 0), M2.unit_elem(1, 1)
    assert obstruction == M2.sub(e22, e11)
    assert cert.verify()
    assert first_coefficient(y) == obstruction


def test_noninjectivity_witness_s3():
    y, obstruction, cert = noninjectivity_witness(S3CTX)
    assert not QS3.is_zero(obstruction)
    assert cert.verify()


def test_noninjectivity_witness_commutative_raises():
    with pytest.raises(NoWitnessError):
        noninjectivity_witness(QCTX)


def test_conjugation_kernel_report():
    rng = sampling.rng_for("kergr")
    for ctx, ring in ((M2CTX, M2), (S3CTX, QS3)):
        for _ in range(5):
            k = sampling.sample_unit(ring, rng)
            h = sampling.sample_witt(ctx, rng, 8)
            rep = conjugation_kernel_report(ctx, k, h)
            assert rep["certificate_ok"]
            assert rep["b2_equals_y"]


def test_witt_inverse_precision():
    rng = sampling.rng_for("winv")
    w = sampling.sample_witt(QCTX, rng, 12)
    wi = witt_inv(w)
    assert witt_mul(w, wi).coeffs == {0: mpq(1)}
