import numpy as np
import pytest

from framescatter.frames import FrameCollection, build_wavelet_frame
from framescatter.signal import Grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid2_32():
    return Grid(2, 32)


@pytest.fixture(scope="session")
def wavelet_collection_32(grid2_32):
    return FrameCollection([build_wavelet_frame(grid2_32, J=3, K=4)])


def brute_dft(values, grid):
    """Fourier coefficients by explicit summation over the grid."""
    x = grid.coordinates().reshape(grid.d, -1)
    k = grid.frequencies().reshape(grid.d, -1)
    kernel = np.exp(-2j * np.pi * k.T @ x)
    return (kernel @ values.reshape(-1) * grid.cell_volume).reshape(grid.shape)


def brute_convolve(f, g, grid):
    """``(f * g)[y] = sum_x f[x] g[y - x] h^d`` by direct double sum."""
    n = grid.n
    out = np.zeros(grid.shape, dtype=complex)
    for y in np.ndindex(*grid.shape):
        acc = 0j
        for x in np.ndindex(*grid.shape):
            acc += f[x] * g[tuple((yi - xi) % n for yi, xi in zip(y, x))]
        out[y] = acc * grid.cell_volume
    return out


_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    """Store the verdict for acceptance criterion ``number`` and echo it."""
    _CRITERIA[number] = (bool(passed), detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
