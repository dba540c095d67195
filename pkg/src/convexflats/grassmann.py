"""The Grassmannian of k-dimensional subspaces of R^d as a metric space.

Distances come from principal angles: the angle between two subspaces is the
largest principal angle, and the Hausdorff distance between their unit-ball
slices is its sine.  Finite coverings ("nets") are built by randomized greedy
packing and then audited with fresh samples; the audit result travels with
the net so downstream consumers can cite it.

Floating point (binary64) throughout; comparisons carry explicit tolerances.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

ANGLE_TOL = 1e-9
ORTHONORMAL_TOL = 1e-12
DEFAULT_MAX_NET_SIZE = 100_000
DEFAULT_AUDIT_SAMPLES = 100_000


def _max_net_size() -> int:
    return int(os.environ.get("CONVEXFLATS_MAX_NET_SIZE", DEFAULT_MAX_NET_SIZE))


class NetBuildError(RuntimeError):
    """Raised when a net cannot be built within the configured resources."""


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional linear subspace of R^d, stored as an orthonormal basis.

    ``basis`` has shape (d, k) with orthonormal columns (checked to 1e-12).
    """

    d: int
    k: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        object.__setattr__(self, "basis", b)
        if b.shape != (self.d, self.k):
            raise ValueError(f"basis shape {b.shape} != ({self.d}, {self.k})")
        gram = b.T @ b
        if np.max(np.abs(gram - np.eye(self.k))) > ORTHONORMAL_TOL:
            raise ValueError("basis is not orthonormal within 1e-12")

    @classmethod
    def from_spanning(cls, d, k, vectors) -> "Subspace":
        """Orthonormalize a spanning set via QR."""
        m = np.asarray(vectors, dtype=np.float64).reshape(-1, d).T
        q, r = np.linalg.qr(m)
        if np.min(np.abs(np.diag(r))) < 1e-12:
            raise ValueError("spanning vectors are numerically dependent")
        return cls(d, k, q[:, :k])


def random_subspace(d: int, k: int, rng: np.random.Generator) -> Subspace:
    """Uniform random element of Gr(k,d): QR of a Gaussian matrix."""
    g = rng.standard_normal((d, k))
    q, _ = np.linalg.qr(g)
    return Subspace(d, k, q[:, :k])


def _random_bases(d: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, d, k) stack of orthonormal bases of uniform random subspaces."""
    g = rng.standard_normal((count, d, k))
    if k == 1:
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    q = np.linalg.qr(g)[0]
    return q[:, :, :k]


def principal_angles(u: Subspace, v: Subspace) -> np.ndarray:
    """The k principal angles between u and v, ascending, in [0, pi/2]."""
    if (u.d, u.k) != (v.d, v.k):
        raise ValueError("subspaces live in different Grassmannians")
    s = np.linalg.svd(u.basis.T @ v.basis, compute_uv=False)
    s = np.clip(s, -1.0, 1.0)
    return np.arccos(s)  # singular values descend, so angles ascend


def max_principal_angle(u: Subspace, v: Subspace) -> float:
    return float(principal_angles(u, v)[-1])


def gr_distance(u: Subspace, v: Subspace) -> float:
    """Hausdorff distance of the unit-ball slices: sin of the largest angle."""
    return float(np.sin(max_principal_angle(u, v)))


def _min_cos_products(elements: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """cos of the largest principal angle, all pairs: (nq, ne) array.

    ``elements`` is (ne, d, k), ``queries`` is (nq, d, k); the cosine is the
    smallest singular value of the k x k basis product, with closed forms for
    k = 1 and k = 2 and batched SVD otherwise.
    """
    k = elements.shape[2]
    if k == 1:
        return np.abs(queries[:, :, 0] @ elements[:, :, 0].T)
    g = np.einsum("qdi,edj->qeij", queries, elements)
    if k == 2:
        # smallest singular value of a 2x2 block in closed form
        sq = g**2
        tr = sq.sum(axis=(-1, -2))
        det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
        disc = np.sqrt(np.maximum(tr**2 - 4.0 * det**2, 0.0))
        smin2 = np.maximum((tr - disc) / 2.0, 0.0)
        return np.sqrt(smin2)
    return np.linalg.svd(g, compute_uv=False)[..., -1]


def _nearest_angles(elements: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Per query: the angle to the nearest element, computed in chunks."""
    nq = queries.shape[0]
    ne = elements.shape[0]
    chunk = max(1, min(nq, 20_000_000 // max(ne, 1)))
    out = np.empty(nq)
    for lo in range(0, nq, chunk):
        hi = min(nq, lo + chunk)
        cos = _min_cos_products(elements, queries[lo:hi])
        out[lo:hi] = np.arccos(np.clip(cos.max(axis=1), -1.0, 1.0))
    return out


@dataclass
class EpsNet:
    """A finite covering of Gr(k,d): every subspace is within angle eps of
    some element, as certified probabilistically by the stored audit."""

    d: int
    k: int
    eps: float
    elements: list[Subspace]
    seed: int
    audit: dict = field(default_factory=dict)
    _stack: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.elements)

    def stack(self) -> np.ndarray:
        if self._stack is None or self._stack.shape[0] != len(self.elements):
            self._stack = np.stack([s.basis for s in self.elements])
        return self._stack

    def to_json(self) -> dict:
        return {
            "format": 1,
            "d": self.d,
            "k": self.k,
            "eps": self.eps,
            "seed": self.seed,
            "audit": self.audit,
            "elements": [s.basis.tolist() for s in self.elements],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EpsNet":
        d, k = obj["d"], obj["k"]
        elements = [Subspace(d, k, np.array(b)) for b in obj["elements"]]
        return cls(d, k, obj["eps"], elements, obj.get("seed", 0), obj.get("audit", {}))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "EpsNet":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def nearest_in_net(net: EpsNet, v: Subspace) -> tuple[int, float]:
    """Index and angle of the net element nearest to v (exhaustive scan)."""
    if not net.elements:
        raise ValueError("empty net")
    if (v.d, v.k) != (net.d, net.k):
        raise ValueError("subspace does not match the net's Grassmannian")
    cos = _min_cos_products(net.stack(), v.basis[None, :, :])[0]
    ang = np.arccos(np.clip(cos, -1.0, 1.0))
    i = int(np.argmin(ang))
    return i, float(ang[i])


def build_eps_net(
    d: int,
    k: int,
    eps: float,
    rng_seed: int,
    *,
    stop_after: int = 400,
    audit_samples: int = DEFAULT_AUDIT_SAMPLES,
    max_size: int | None = None,
) -> EpsNet:
    """Greedy packing at angular radius eps/2, then a fresh-sample audit.

    Candidates are uniform random subspaces; one is kept whenever it is more
    than eps/2 away from everything kept so far.  Packing stops after
    ``stop_after`` consecutive covered candidates.  The audit then measures
    the largest nearest-element angle over fresh samples and must come out
    below eps; an audit failure re-opens the packing phase (bounded rounds).
    """
    if not (0 < k < d):
        raise ValueError("need 0 < k < d")
    if eps <= 0:
        raise ValueError("eps must be positive")
    cap = max_size if max_size is not None else _max_net_size()
    rng = np.random.default_rng(rng_seed)
    radius = eps / 2.0

    store = np.empty((cap, d, k))
    count = 0

    def add(basis: np.ndarray):
        nonlocal count
        if count >= cap:
            raise NetBuildError(
                f"net for Gr({k},{d}) at eps={eps} exceeds the cap of {cap} elements"
            )
        store[count] = basis
        count += 1

    batch = 512
    for _round in range(5):
        misses = 0
        while misses < stop_after:
            cands = _random_bases(d, k, batch, rng)
            if count:
                near = _nearest_angles(store[:count], cands) < radius
            else:
                near = np.zeros(batch, dtype=bool)
            fresh_from = count
            for i in range(batch):
                cand = cands[i]
                is_covered = bool(near[i])
                if not is_covered and count > fresh_from:
                    cos = _min_cos_products(store[fresh_from:count], cand[None])[0]
                    is_covered = bool(np.arccos(np.clip(cos.max(), -1, 1)) < radius)
                if is_covered:
                    misses += 1
                    if misses >= stop_after:
                        break
                else:
                    add(cand)
                    misses = 0
        # fresh-sample audit
        samples = _random_bases(d, k, audit_samples, rng)
        gaps = _nearest_angles(store[:count], samples)
        max_gap = float(gaps.max())
        if max_gap < eps:
            elements = [Subspace(d, k, store[i].copy()) for i in range(count)]
            net = EpsNet(d, k, float(eps), elements, int(rng_seed))
            net.audit = {"samples": int(audit_samples), "max_observed_gap": max_gap}
            return net
        for i in np.nonzero(gaps >= eps)[0]:
            add(samples[i])
    raise NetBuildError("audit kept failing; net did not converge")


def near_orthogonal_pick(net: EpsNet, v_span) -> tuple[int, Subspace, float]:
    """Net element almost orthogonal to the span of the given unit vectors.

    Takes the k top left-singular directions of the projector onto the
    orthogonal complement of span(v_span), then returns the nearest net
    element.  The reported bound is max |u.v| over unit u in the element and
    unit v in the span (the top singular value of the basis product).
    """
    d, k = net.d, net.k
    vs = np.asarray(v_span, dtype=np.float64).reshape(-1, d)
    s = vs.shape[0]
    if s > d - k:
        raise ValueError(f"span dimension {s} exceeds d - k = {d - k}")
    q, _ = np.linalg.qr(vs.T)
    q = q[:, :s]
    proj = np.eye(d) - q @ q.T
    u_full, _, _ = np.linalg.svd(proj)
    target = Subspace(d, k, u_full[:, :k])
    idx, _ = nearest_in_net(net, target)
    element = net.elements[idx]
    bound = float(np.linalg.svd(element.basis.T @ q, compute_uv=False)[0]) if s else 0.0
    return idx, element, bound
