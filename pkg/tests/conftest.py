import random

import pytest

from fedosov import (
    ChartContext,
    FedosovSolution,
    Poly,
    SymplecticConnection,
    SymplecticVectorField,
)


@pytest.fixture(scope="session")
def ctx8():
    return ChartContext.standard(1, 8)


@pytest.fixture(scope="session")
def ctx6():
    return ChartContext.standard(1, 6)


@pytest.fixture(scope="session")
def x1(ctx8):
    return ctx8.poly_var(0)


@pytest.fixture(scope="session")
def x2(ctx8):
    return ctx8.poly_var(1)


@pytest.fixture(scope="session")
def sol_flat6(ctx6):
    return FedosovSolution.solve(SymplecticConnection.flat(ctx6))


@pytest.fixture(scope="session")
def sol_flat8(ctx8):
    return FedosovSolution.solve(SymplecticConnection.flat(ctx8))


@pytest.fixture(scope="session")
def conn_curved(ctx8, x2):
    # Gamma_111 = x2: the standard nonflat test connection
    return SymplecticConnection.from_entries(ctx8, [(0, 0, 0, x2)])


@pytest.fixture(scope="session")
def sol_curved(conn_curved):
    return FedosovSolution.solve(conn_curved)


@pytest.fixture(scope="session")
def conn_curved2(ctx8, x1):
    # Gamma_112 = x1: a second nonflat connection with even-degree r terms
    return SymplecticConnection.from_entries(ctx8, [(0, 0, 1, x1)])


@pytest.fixture(scope="session")
def sol_curved2(conn_curved2):
    return FedosovSolution.solve(conn_curved2)


@pytest.fixture(scope="session")
def field_p(ctx8):
    return SymplecticVectorField.from_scalars(ctx8, [1, 0])


@pytest.fixture(scope="session")
def field_q(ctx8):
    return SymplecticVectorField.from_scalars(ctx8, [0, 1])


@pytest.fixture(scope="session")
def field_l(ctx8, x1, x2):
    return SymplecticVectorField.from_scalars(ctx8, [x1, -x2])


@pytest.fixture(scope="session")
def field_w(ctx8, x1, x2):
    return SymplecticVectorField.from_scalars(ctx8, [x1**2, -2 * x1 * x2])


@pytest.fixture(scope="session")
def field_cubic(ctx8, x1, x2):
    return SymplecticVectorField.hamiltonian(ctx8, x1**2 * x2 + x2**3)


@pytest.fixture()
def rng():
    return random.Random(20240811)


def make_random_poly(rng, dim, degree=2, terms=3):
    from fractions import Fraction

    acc = {}
    for _ in range(rng.randint(1, terms)):
        exp = [0] * dim
        for _ in range(rng.randint(0, degree)):
            exp[rng.randrange(dim)] += 1
        c = Fraction(rng.randint(-3, 3))
        if c:
            acc[tuple(exp)] = c
    return Poly(dim, acc)


def make_random_form(rng, ctx, terms=4):
    entries = []
    for _ in range(rng.randint(1, terms)):
        ydeg = rng.randint(0, 3)
        if ydeg == 0:
            hpow = rng.randint(0, 2)
        else:
            hpow = rng.randint(-1, 2)
            if ydeg + 2 * hpow < 1:
                hpow += 1
        if ydeg + 2 * hpow > ctx.trunc:
            continue
        ys = tuple(rng.randrange(ctx.dim) for _ in range(ydeg))
        dxs = tuple(rng.sample(range(ctx.dim), rng.randint(0, 2)))
        p = make_random_poly(rng, ctx.dim)
        if p:
            entries.append((p, ys, dxs, hpow))
    return ctx.form(entries)
