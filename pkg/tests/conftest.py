import numpy as np
import pytest

from fockbell import TransferMatrix


def random_isometry(rng: np.random.Generator, n_rows: int, n_cols: int) -> TransferMatrix:
    z = rng.normal(size=(n_rows, n_rows)) + 1j * rng.normal(size=(n_rows, n_rows))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return TransferMatrix(
        entries=q[:, :n_cols],
        detector_labels=tuple(f"d{i}" for i in range(n_rows)),
        source_labels=tuple(f"s{g}" for g in range(n_cols)),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
