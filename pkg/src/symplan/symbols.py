"""Abstract vocabulary learned per option partition.

An effect symbol is a Gaussian-kernel KDE over the variables an option
actually changes (the mask); a precondition is a kernel density-ratio
classifier over greedily selected variables. Both are deterministic
functions of their training data, which keeps the whole pipeline
reproducible without iterative optimization.
"""

from __future__ import annotations

import json
import warnings
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDimension, InsufficientData
from .kernels import gauss_kde_logpdf, kth_neighbor_dist

_CHANGE_TOL = 1e-9  # states are exact in simulation
_BW_ABS_FLOOR = 1e-6
_DENS_GUARD = 1e-12


def silverman_bandwidths(data: np.ndarray, warn: bool = True) -> np.ndarray:
    """Per-dimension Silverman bandwidths, floored at 1e-3 of the data range."""
    data = np.atleast_2d(data)
    n, d = data.shape
    sd = data.std(axis=0, ddof=1) if n > 1 else np.zeros(d)
    rng_ = data.max(axis=0) - data.min(axis=0)
    factor = (4.0 / ((d + 2) * n)) ** (1.0 / (d + 4))
    bw = sd * factor
    floor = np.maximum(1e-3 * rng_, _BW_ABS_FLOOR)
    if warn and np.any(rng_ == 0.0):
        warnings.warn("constant masked variable; bandwidth floor applies", DegenerateDimension)
    return np.maximum(bw, floor)


@dataclass(frozen=True)
class Kde:
    """Product-Gaussian KDE; zero-dimensional KDEs evaluate to density 1."""

    support: np.ndarray    # (n, d)
    bandwidth: np.ndarray  # (d,)

    @staticmethod
    def fit(samples: np.ndarray) -> "Kde":
        samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
        if samples.shape[1] == 0:
            return Kde(samples, np.zeros(0))
        return Kde(samples, silverman_bandwidths(samples))

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        if self.dim == 0:
            return np.zeros(len(x))
        return gauss_kde_logpdf(x, self.support, self.bandwidth)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return np.exp(self.logpdf(x))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((n, 0))
        idx = rng.integers(len(self.support), size=n)
        return self.support[idx] + rng.normal(size=(n, self.dim)) * self.bandwidth

    def content_seed(self) -> int:
        return zlib.crc32(self.support.tobytes() + self.bandwidth.tobytes())


@dataclass(frozen=True)
class EffectSymbol:
    name: str
    mask: tuple[int, ...]
    density: Kde


@dataclass(frozen=True)
class PreconditionModel:
    """P(option executable | state), via kernel density ratio on selected
    variables; degenerates to an epsilon-support one-class test when no
    negatives exist."""

    relevant: tuple[int, ...]
    positives: Kde
    negatives: Kde | None
    prior: float
    support_radius: float = 0.0
    # full-dimensional training states, kept so that exact revisits of a
    # memorized state get a calibrated 0/1 answer instead of the smoothed
    # density ratio (states are exact in simulation, so an exact match is
    # ground truth whenever the classes do not overlap there)
    pos_full: np.ndarray | None = None
    neg_full: np.ndarray | None = None

    def prob(self, states: np.ndarray) -> np.ndarray:
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        x = states[:, list(self.relevant)]
        if self.negatives is None:
            if len(self.positives.support) == 0:
                return np.zeros(len(x))
            d = kth_neighbor_dist(x, self.positives.support, 1)
            return (d <= self.support_radius).astype(float)
        out = np.empty(len(x))
        rest = np.ones(len(x), dtype=bool)
        if self.pos_full is not None and len(self.pos_full):
            dp = kth_neighbor_dist(states, self.pos_full, 1)
            if self.neg_full is not None and len(self.neg_full):
                dn = kth_neighbor_dist(states, self.neg_full, 1)
            else:
                dn = np.full(len(states), np.inf)
            hit_p = dp <= _CHANGE_TOL
            hit_n = dn <= _CHANGE_TOL
            out[hit_p & ~hit_n] = 1.0
            out[hit_n & ~hit_p] = 0.0
            rest = hit_p == hit_n
            if not rest.any():
                return out
        lp = self.positives.logpdf(x[rest])
        ln = self.negatives.logpdf(x[rest])
        num = self.prior * np.exp(lp)
        den = num + (1.0 - self.prior) * np.exp(ln) + _DENS_GUARD
        out[rest] = num / den
        return out


def compute_mask(x_starts: np.ndarray, x_ends: np.ndarray, tau: float = 0.05) -> tuple[int, ...]:
    """Variables changed in at least a tau fraction of samples."""
    xs = np.atleast_2d(x_starts)
    xe = np.atleast_2d(x_ends)
    if len(xs) < 1:
        raise InsufficientData("need >= 1 sample")
    changed = np.abs(xe - xs) > _CHANGE_TOL
    frac = changed.mean(axis=0)
    return tuple(int(i) for i in np.flatnonzero(frac >= tau))


def fit_effect_density(x_ends: np.ndarray, mask: tuple[int, ...], name: str = "rep") -> EffectSymbol:
    xe = np.atleast_2d(x_ends)
    if len(xe) < 2:
        raise InsufficientData("need >= 2 samples")
    return EffectSymbol(name=name, mask=tuple(mask), density=Kde.fit(xe[:, list(mask)]))


def _stride_cap(arr: np.ndarray, cap: int) -> np.ndarray:
    if len(arr) <= cap:
        return arr
    return arr[np.linspace(0, len(arr) - 1, cap).astype(int)]


def _cv_accuracy(pos: np.ndarray, neg: np.ndarray, feats: list[int], folds: int = 3) -> float:
    """3-fold CV balanced accuracy of the density-ratio classifier.

    Balanced (per-class mean) accuracy: positives are typically heavily
    outnumbered by negatives, and raw accuracy would make the majority-class
    baseline unbeatable."""
    cp = cn = tp = tn = 0
    for f in range(folds):
        ptest = pos[f::folds]
        ptrain = np.delete(pos, slice(f, None, folds), axis=0)
        ntest = neg[f::folds]
        ntrain = np.delete(neg, slice(f, None, folds), axis=0)
        if len(ptrain) < 2 or len(ntrain) < 2:
            continue
        model = PreconditionModel(
            relevant=tuple(range(len(feats))),  # columns already selected below
            positives=Kde.fit(ptrain[:, feats]),
            negatives=Kde.fit(ntrain[:, feats]),
            prior=len(ptrain) / (len(ptrain) + len(ntrain)),
        )
        if len(ptest):
            cp += int((model.prob(ptest[:, feats]) >= 0.5).sum())
            tp += len(ptest)
        if len(ntest):
            cn += int((model.prob(ntest[:, feats]) < 0.5).sum())
            tn += len(ntest)
    if not tp or not tn:
        return 0.0
    return 0.5 * (cp / tp + cn / tn)


def fit_precondition(
    positives: np.ndarray,
    negatives: np.ndarray | None,
    min_improvement: float = 0.01,
    max_features: int | None = None,
) -> PreconditionModel:
    """Greedy forward feature selection + kernel density-ratio classifier."""
    pos = np.atleast_2d(np.asarray(positives, dtype=np.float64))
    if len(pos) < 5:
        raise InsufficientData("need >= 5 positives")
    if negatives is None or len(negatives) == 0:
        radius = _BW_ABS_FLOOR
        if len(pos) > 1:
            radius = max(float(kth_neighbor_dist(pos, pos, 1, exclude_self=True).max()) * 1.5, radius)
        return PreconditionModel(
            relevant=tuple(range(pos.shape[1])),
            positives=Kde(pos, np.zeros(0)),  # bandwidth unused in one-class mode
            negatives=None,
            prior=1.0,
            support_radius=radius,
        )
    neg = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    dim = pos.shape[1]
    if max_features is None:
        max_features = dim
    # only variables that vary somewhere can help
    spread = np.vstack([pos, neg])
    candidates = [i for i in range(dim) if np.ptp(spread[:, i]) > 0]
    prior = len(pos) / (len(pos) + len(neg))
    # feature selection on an evenly-strided subsample: the CV inner loop is
    # quadratic in sample count and the ranking is stable well below full n
    cv_pos = _stride_cap(pos, 200)
    cv_neg = _stride_cap(neg, 200)
    selected: list[int] = []
    best_acc = 0.5  # balanced-accuracy baseline
    while candidates and len(selected) < max_features:
        scores = [(_cv_accuracy(cv_pos, cv_neg, selected + [c]), -c) for c in candidates]
        acc, negc = max(scores)
        c = -negc
        if acc - best_acc < min_improvement:
            break
        selected.append(c)
        candidates.remove(c)
        best_acc = acc
    selected.sort()
    return PreconditionModel(
        relevant=tuple(selected),
        positives=Kde.fit(pos[:, selected]),
        negatives=Kde.fit(neg[:, selected]),
        prior=prior,
        pos_full=pos,
        neg_full=neg,
    )


def kde_symmetric_kl(a: Kde, b: Kde, n: int = 512) -> float:
    """Symmetrized KL between two KDEs, by sampling each deterministically
    (seed derived from the KDE contents, so the result is symmetric and
    exactly zero for identical densities)."""
    if a.dim != b.dim:
        return float("inf")
    if a.dim == 0:
        return 0.0
    sa = a.sample(n, np.random.default_rng(a.content_seed()))
    sb = b.sample(n, np.random.default_rng(b.content_seed()))
    kl_ab = float(np.mean(a.logpdf(sa) - b.logpdf(sa)))
    kl_ba = float(np.mean(b.logpdf(sb) - a.logpdf(sb)))
    return max(0.0, 0.5 * (kl_ab + kl_ba))


def symbols_equivalent(a: EffectSymbol, b: EffectSymbol, threshold: float = 0.1) -> bool:
    """True iff masks match and the densities are close in symmetrized KL."""
    if a.mask != b.mask:
        return False
    return kde_symmetric_kl(a.density, b.density) < threshold


# --- serialization -----------------------------------------------------------

def _arr(a: np.ndarray) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def kde_to_doc(k: Kde) -> dict:
    return {"support": _arr(k.support), "bandwidth": _arr(k.bandwidth)}


def kde_from_doc(doc: dict) -> Kde:
    sup = np.array(doc["support"], dtype=np.float64)
    if sup.ndim == 1:
        sup = sup.reshape(len(sup), 0) if len(doc["bandwidth"]) == 0 else np.atleast_2d(sup)
    if sup.size == 0:
        sup = sup.reshape((0, len(doc["bandwidth"])))
    return Kde(sup, np.array(doc["bandwidth"], dtype=np.float64))


def symbol_to_doc(s: EffectSymbol) -> dict:
    return {"name": s.name, "mask": list(s.mask), "density": kde_to_doc(s.density)}


def symbol_from_doc(doc: dict) -> EffectSymbol:
    return EffectSymbol(doc["name"], tuple(doc["mask"]), kde_from_doc(doc["density"]))


def precondition_to_doc(p: PreconditionModel) -> dict:
    return {
        "relevant": list(p.relevant),
        "positives": kde_to_doc(p.positives),
        "negatives": None if p.negatives is None else kde_to_doc(p.negatives),
        "prior": p.prior,
        "support_radius": p.support_radius,
        "pos_full": None if p.pos_full is None else _arr(p.pos_full),
        "neg_full": None if p.neg_full is None else _arr(p.neg_full),
    }


def precondition_from_doc(doc: dict) -> PreconditionModel:
    return PreconditionModel(
        relevant=tuple(doc["relevant"]),
        positives=kde_from_doc(doc["positives"]),
        negatives=None if doc["negatives"] is None else kde_from_doc(doc["negatives"]),
        prior=doc["prior"],
        support_radius=doc["support_radius"],
        pos_full=None if doc.get("pos_full") is None else np.array(doc["pos_full"], dtype=np.float64),
        neg_full=None if doc.get("neg_full") is None else np.array(doc["neg_full"], dtype=np.float64),
    )


def save_symbol_library(symbols: list[EffectSymbol], path: str) -> None:
    with open(path, "w") as f:
        json.dump({"format": "symplan-symbols v1", "symbols": [symbol_to_doc(s) for s in symbols]}, f)


def load_symbol_library(path: str) -> list[EffectSymbol]:
    with open(path) as f:
        doc = json.load(f)
    return [symbol_from_doc(d) for d in doc["symbols"]]
