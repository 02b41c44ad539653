import numpy as np
import pytest

import fermiskin as fs


def pytest_addoption(parser):
    parser.addoption(
        "--regen-golden",
        action="store_true",
        default=False,
        help="rewrite the CLI golden files instead of comparing against them",
    )


@pytest.fixture(scope="session")
def regen_golden(request):
    return request.config.getoption("--regen-golden")


@pytest.fixture(scope="session")
def na():
    return fs.get_material("na")


@pytest.fixture(scope="session")
def au():
    return fs.get_material("au")


@pytest.fixture(scope="session")
def al():
    return fs.get_material("al")


@pytest.fixture(scope="session")
def na_params_1em4(na):
    return fs.params_for(na, 1e-2, 1e-4)


@pytest.fixture(scope="session")
def na_params_1em5(na):
    return fs.params_for(na, 1e-2, 1e-5)


def mp_eps_tr(q, Omega, eps, im_sign=1, dps=50):
    """Independent permittivity evaluation at high precision.

    Deliberately coded from the integral's closed form in one line of
    mpmath arithmetic, with no shared helpers with the package.
    """
    import mpmath as mp

    with mp.workdps(dps):
        z = mp.mpf(Omega) + im_sign * mp.mpc(0, 1) * mp.mpf(eps)
        q = mp.mpf(q)
        if eps == 0:
            # limit from the physical half-plane: real log plus the
            # absorption step beyond |q| = Omega
            r = mp.log(abs((Omega - q) / (Omega + q)))
            i = mp.pi * im_sign * mp.sign(q) if abs(q) > Omega else mp.mpf(0)
            L = r + mp.mpc(0, 1) * i
        else:
            L = mp.log((z - q) / (z + q))
        val = 1 - 3 / (4 * Omega * q**3) * (2 * z * q + (z**2 - q**2) * L)
        return complex(val)


@pytest.fixture(scope="session")
def eps_tr_oracle():
    return mp_eps_tr
