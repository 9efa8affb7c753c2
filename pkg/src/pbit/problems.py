"""Problem encoders: SK spin glasses, image-encoded Max-Cut lattices, and
Suzuki-Trotter replica lattices for the 1D transverse-field Ising chain."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .network import CouplingNetwork, NetworkError


class ProblemError(ValueError):
    pass


# --- Sherrington-Kirkpatrick instances --------------------------------------

def sk_random(n_spins: int, seed: int, beta: float = 1.0) -> CouplingNetwork:
    """All-to-all instance with W_ij and h_i uniform in [-1, 1]."""
    if n_spins < 2:
        raise ProblemError("SK instance needs at least 2 spins")
    rng = np.random.default_rng(seed)
    w = rng.uniform(-1.0, 1.0, size=(n_spins, n_spins))
    w = np.triu(w, 1)
    w = w + w.T
    h = rng.uniform(-1.0, 1.0, size=n_spins)
    return CouplingNetwork.from_dense(w, bias=h, beta=beta)


# --- image-encoded nearest-neighbor Max-Cut ---------------------------------

@dataclass(frozen=True)
class LatticeSpec:
    rows: int
    cols: int
    wrap: bool = False

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ProblemError("lattice dimensions must be positive")


def lattice_coloring(spec: LatticeSpec) -> np.ndarray:
    """Checkerboard 2-coloring of the lattice sites, row-major order."""
    if spec.wrap and (spec.rows % 2 or spec.cols % 2):
        raise ProblemError("periodic lattice needs even dimensions to 2-color")
    r, c = np.meshgrid(np.arange(spec.rows), np.arange(spec.cols), indexing="ij")
    return ((r + c) % 2).astype(np.uint8).ravel()


def lattice_edges(spec: LatticeSpec):
    """Yield 4-neighbor site pairs (row-major indices)."""
    idx = lambda r, c: r * spec.cols + c
    for r in range(spec.rows):
        for c in range(spec.cols):
            if c + 1 < spec.cols:
                yield idx(r, c), idx(r, c + 1)
            elif spec.wrap and spec.cols > 2:
                yield idx(r, c), idx(r, 0)
            if r + 1 < spec.rows:
                yield idx(r, c), idx(r + 1, c)
            elif spec.wrap and spec.rows > 2:
                yield idx(r, c), idx(0, c)


def lattice_from_image(bitmap: np.ndarray, spec: LatticeSpec,
                       beta: float = 1.0):
    """Encode a binary image as a nearest-neighbor net with {-1, +1} bonds.

    Neighboring pixels of equal color couple ferromagnetically (+1),
    unequal colors antiferromagnetically (-1), h = 0; the image pattern
    (and its global inversion) are then the two degenerate ground states.

    Returns (network, checkerboard coloring, target SpinState) where the
    target reads foreground (bitmap value 1 / black) as +1.
    """
    bitmap = np.asarray(bitmap)
    if bitmap.shape != (spec.rows, spec.cols):
        raise ProblemError(
            f"bitmap shape {bitmap.shape} does not match spec "
            f"({spec.rows}, {spec.cols})"
        )
    if not np.isin(bitmap, (0, 1)).all():
        raise ProblemError("bitmap must be binary (0/1)")
    target = np.where(bitmap.ravel() > 0, 1, -1).astype(np.int8)
    edges = [(i, j, float(target[i] * target[j])) for i, j in lattice_edges(spec)]
    net = CouplingNetwork.from_edges(spec.rows * spec.cols, edges, beta=beta)
    return net, lattice_coloring(spec), target


def ground_state_energy(net: CouplingNetwork) -> float:
    """Analytic minimum for an image-encoded lattice: every bond satisfied."""
    return -sum(abs(w) for _, _, w in net.edges())


# --- bitmap I/O -------------------------------------------------------------

def load_bitmap(path) -> np.ndarray:
    """Read a PGM (P2/P5, thresholded at mid-gray) or JSON 0/1 matrix.

    PGM convention: dark pixels (< half maxval) are foreground (1).
    """
    path = str(path)
    if path.endswith(".json"):
        with open(path) as f:
            mat = np.asarray(json.load(f))
        if not np.isin(mat, (0, 1)).all():
            raise ProblemError("JSON bitmap must contain only 0/1")
        return mat.astype(np.uint8)
    pixels, maxval = _read_pgm(path)
    return (pixels <= maxval // 2).astype(np.uint8)


def _read_pgm(path):
    with open(path, "rb") as f:
        raw = f.read()
    tokens = []
    i = 0
    # header: magic, width, height, maxval with '#' comments
    while len(tokens) < 4:
        while i < len(raw) and raw[i:i + 1].isspace():
            i += 1
        if raw[i:i + 1] == b"#":
            while i < len(raw) and raw[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(raw) and not raw[j:j + 1].isspace():
            j += 1
        tokens.append(raw[i:j])
        i = j
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == b"P5":
        i += 1  # single whitespace after maxval
        pixels = np.frombuffer(raw, dtype=np.uint8, count=w * h, offset=i)
    elif magic == b"P2":
        pixels = np.array(raw[i:].split()[: w * h], dtype=int)
    else:
        raise ProblemError(f"unsupported bitmap format {magic!r}")
    return pixels.reshape(h, w), maxval


def save_pgm(path, values: np.ndarray) -> None:
    """Write spins (+1 -> 255, -1 -> 0) or a 0/1 bitmap (1 -> 0, dark)."""
    values = np.asarray(values)
    if np.isin(values, (-1, 1)).all():
        img = np.where(values > 0, 255, 0).astype(np.uint8)
    else:
        img = np.where(values > 0, 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(img.tobytes())


def demo_bitmap(rows: int, cols: int) -> np.ndarray:
    """Deterministic test pattern: a filled disk with a bar, like a domain
    image; any bitmap works, this one just has both domain types."""
    r, c = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    disk = ((r - rows / 2) ** 2 + (c - cols / 2) ** 2) <= (min(rows, cols) / 3) ** 2
    bar = (r > rows // 8) & (r < rows // 4)
    return (disk | bar).astype(np.uint8)


# --- Suzuki-Trotter replica lattice -----------------------------------------

@dataclass(frozen=True)
class TrotterMapping:
    """Replica-lattice construction for the 1D TFIM.

    Maps an M-spin quantum chain at inverse temperature beta with
    couplings J and fields (gamma_x, gamma_z) onto n classical replicas.
    """

    m_spins: int
    n_replicas: int
    j_coupling: float
    gamma_x: float
    gamma_z: float
    beta: float

    def __post_init__(self):
        if self.m_spins < 2 or self.n_replicas < 2:
            raise ProblemError("need M >= 2 spins and n >= 2 replicas")
        if self.beta <= 0:
            raise ProblemError("beta must be positive")
        if self.gamma_x <= 0:
            raise ProblemError(
                "gamma_x must be > 0 (inter-replica coupling diverges at 0)"
            )

    @property
    def j_parallel(self) -> float:
        return self.j_coupling / self.n_replicas

    @property
    def gamma_z_eff(self) -> float:
        return self.gamma_z / self.n_replicas

    @property
    def j_perp(self) -> float:
        t = math.tanh(self.beta * self.gamma_x / self.n_replicas)
        if t <= 0.0:
            raise ProblemError(
                "beta*gamma_x/n underflows tanh; inter-replica coupling "
                "is out of range"
            )
        return -math.log(t) / (2.0 * self.beta)

    @property
    def n_spins(self) -> int:
        return self.m_spins * self.n_replicas

    def site(self, i: int, k: int) -> int:
        """Flat index of chain site i in replica k."""
        return k * self.m_spins + i

    def trotter_error_scale(self) -> float:
        """Leading replica-discretization error scale beta^3 / n^2."""
        return self.beta ** 3 / self.n_replicas ** 2


def trotter_map(mapping: TrotterMapping) -> CouplingNetwork:
    """Classical network over M*n spins realizing the replica Hamiltonian.

    In-replica ring bonds carry J/n, inter-replica ring bonds carry
    J_perp, and every spin gets bias gamma_z/n; network beta is the
    quantum inverse temperature.
    """
    m, n = mapping.m_spins, mapping.n_replicas
    jp, jperp = mapping.j_parallel, mapping.j_perp
    edges = []
    for k in range(n):
        for i in range(m):
            edges.append((mapping.site(i, k), mapping.site((i + 1) % m, k), jp))
            edges.append((mapping.site(i, k), mapping.site(i, (k + 1) % n), jperp))
    bias = np.full(mapping.n_spins, mapping.gamma_z_eff)
    return CouplingNetwork.from_edges(mapping.n_spins, edges, bias=bias,
                                      beta=mapping.beta)
