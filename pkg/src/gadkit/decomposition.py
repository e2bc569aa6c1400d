"""Block partition of the extended operator and the norm/risk sweep engine.

Given the full operator over training plus prediction rows, a model size m
splits its columns into a modeled prefix and a nescient remainder.  The
aliasing operator (pseudoinverse of the modeled training block applied to
the nescient training block) describes how unmodeled coefficients leak into
the fitted ones; the invertibility operator collects the kernel projector of
the modeled block and the identity on the nescient coordinates.  Sweeping m
produces the label-independent anatomy of the risk curve.

Regularized variants augment the modeled training block with sqrt(n*lambda)
times the identity; lambda = 0 routes through the unregularized code path so
the two agree exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bases import BasisSpec, evaluate_columns
from .designs import ParameterSpec, SampleDesign, make_theta
from .errors import DecompositionMismatchError, GadkitError, InvalidInputError
from .linalg import (
    DEFAULT_REL_TOL,
    as_matrix,
    as_vector,
    kernel_projector,
    pseudoinverse,
    spectral_norm,
    svd,
)


@dataclass(frozen=True, eq=False)
class OperatorPanel:
    """The four blocks of the extended operator at one model size."""

    m: int
    train_modeled: np.ndarray
    train_nescient: np.ndarray
    pred_modeled: np.ndarray
    pred_nescient: np.ndarray
    rank: int
    rel_tol: float

    @property
    def n_train(self) -> int:
        return self.train_modeled.shape[0]

    @property
    def budget(self) -> int:
        return self.m + self.train_nescient.shape[1]


@dataclass(frozen=True)
class RidgeConfig:
    """Ridge strength and the training count entering the sqrt(n*lambda) scale."""

    lam: float
    n: int

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidInputError("lambda must be nonnegative")
        if self.n < 1:
            raise InvalidInputError("training count must be at least 1")

    @property
    def active(self) -> bool:
        return self.lam > 0


@dataclass(frozen=True)
class SweepRecord:
    """One row of the risk anatomy at a given model size."""

    m: int
    norm_A: float
    norm_pinv_TM: float
    norm_M_TU: float
    alias_error: float
    bias_error: float
    nescience_error: float
    risk_all: float
    risk_prediction_only: float
    rank_TM: int
    new_col_independent: bool
    lam: float
    error: str | None = None


@dataclass(frozen=True, eq=False)
class RiskReport:
    """Risk and error-term breakdown for one fitted model size."""

    theta_hat: np.ndarray
    risk_all: float
    risk_prediction_only: float
    alias_error: float
    bias_error: float
    nescience_error: float
    identity_residual: float


@dataclass(frozen=True)
class NormProfileRecord:
    """Label-free norm anatomy at one model size (no risk terms)."""

    m: int
    norm_pinv: float
    norm_nescience: float
    rank: int
    new_col_independent: bool


def build_panels(M_full, design: SampleDesign, m: int,
                 rel_tol: float = DEFAULT_REL_TOL) -> OperatorPanel:
    """Split the full operator into its four blocks at model size m.

    Rows of ``M_full`` must be ordered training first, then prediction; the
    modeled columns are the first m under the basis ordering already baked
    into ``M_full``.
    """
    full = as_matrix(M_full)
    n = design.n_train
    total_rows = n + design.prediction_points.shape[0]
    if full.shape[0] != total_rows:
        raise InvalidInputError(
            f"operator has {full.shape[0]} rows, design implies {total_rows}"
        )
    budget = full.shape[1]
    if not 1 <= m <= budget:
        raise InvalidInputError(f"model size {m} outside [1, {budget}]")
    train_modeled = full[:n, :m]
    rank = svd(train_modeled, rel_tol).numerical_rank
    return OperatorPanel(
        m=int(m),
        train_modeled=train_modeled,
        train_nescient=full[:n, m:],
        pred_modeled=full[n:, :m],
        pred_nescient=full[n:, m:],
        rank=rank,
        rel_tol=rel_tol,
    )


def _augmented_block(panel: OperatorPanel, ridge: RidgeConfig) -> np.ndarray:
    if ridge.n != panel.n_train:
        raise InvalidInputError(
            f"ridge config n={ridge.n} does not match the design's {panel.n_train} training rows"
        )
    x = panel.train_modeled
    dtype = x.dtype if np.issubdtype(x.dtype, np.complexfloating) else float
    mu = np.sqrt(ridge.n * ridge.lam)
    return np.vstack([x, mu * np.eye(panel.m, dtype=dtype)])


def _zero_padded(block: np.ndarray, extra_rows: int) -> np.ndarray:
    pad = np.zeros((extra_rows, block.shape[1]), dtype=block.dtype)
    return np.vstack([block, pad])


def ridge_panels(panel: OperatorPanel, ridge: RidgeConfig) -> tuple[np.ndarray, float]:
    """Augmented modeled training block and the norm of its pseudoinverse.

    Asserts the shifted-spectrum identity: each singular value of the
    augmented block equals sqrt(sigma_i**2 + n*lambda) over the m base
    singular values (zeros included), to 1e-9 relative.  The returned norm
    is bounded by 1/sqrt(n*lambda) whenever lambda is positive.
    """
    aug = _augmented_block(panel, ridge)
    if not ridge.active:
        base = svd(panel.train_modeled, panel.rel_tol)
        return aug, (1.0 / base.min_positive_singular() if base.numerical_rank else 0.0)
    s_aug = np.linalg.svd(aug, compute_uv=False)
    s_base = np.linalg.svd(panel.train_modeled, compute_uv=False)
    padded = np.zeros(panel.m)
    padded[: s_base.size] = s_base
    expected = np.sqrt(padded**2 + ridge.n * ridge.lam)
    scale = max(float(expected[0]), 1.0)
    if not np.allclose(s_aug, expected, rtol=1e-9, atol=1e-12 * scale):
        worst = float(np.max(np.abs(s_aug - expected)))
        raise DecompositionMismatchError(
            f"augmented spectrum deviates from sqrt(sigma^2 + n*lambda) by {worst:.3e}"
        )
    return aug, float(1.0 / s_aug[-1])


def aliasing_operator(panel: OperatorPanel, ridge: RidgeConfig | None = None) -> np.ndarray:
    """Pseudoinverse of the modeled training block applied to the nescient block."""
    if panel.train_nescient.shape[1] == 0:
        dtype = panel.train_modeled.dtype
        return np.zeros((panel.m, 0), dtype=dtype)
    if ridge is None or not ridge.active:
        return pseudoinverse(panel.train_modeled, panel.rel_tol) @ panel.train_nescient
    aug, _ = ridge_panels(panel, ridge)
    return pseudoinverse(aug, panel.rel_tol) @ _zero_padded(panel.train_nescient, panel.m)


def b_operator(panel: OperatorPanel, ridge: RidgeConfig | None = None) -> np.ndarray:
    """Map from true modeled coefficients to their fitted expectation.

    Unregularized this is the orthogonal projector onto the row space of the
    modeled training block (identity minus the kernel projector); with ridge
    it contracts instead of projecting.
    """
    if ridge is None or not ridge.active:
        return pseudoinverse(panel.train_modeled, panel.rel_tol) @ panel.train_modeled
    aug, _ = ridge_panels(panel, ridge)
    return pseudoinverse(aug, panel.rel_tol) @ _zero_padded(panel.train_modeled, panel.m)


def infer_theta(panel: OperatorPanel, y_train, ridge: RidgeConfig | None = None) -> np.ndarray:
    """Minimum-norm least-squares fit, zero-padded to the full budget length."""
    y = as_vector(y_train, length=panel.n_train)
    if ridge is None or not ridge.active:
        theta_m = pseudoinverse(panel.train_modeled, panel.rel_tol) @ y
    else:
        aug, _ = ridge_panels(panel, ridge)
        padded = np.concatenate([y, np.zeros(panel.m, dtype=y.dtype)])
        theta_m = pseudoinverse(aug, panel.rel_tol) @ padded
    out = np.zeros(panel.budget, dtype=theta_m.dtype)
    out[: panel.m] = theta_m
    return out


def invertibility_operator(panel: OperatorPanel, ridge: RidgeConfig | None = None) -> np.ndarray:
    """Block operator of fitting bias on modeled coordinates and identity on nescient ones.

    The modeled block is the kernel projector of the training design
    (unregularized) or identity minus the ridge-contracted map; the nescient
    block is always the identity, so the overall norm is 1 whenever any
    coordinate is unmodeled.
    """
    m, total = panel.m, panel.budget
    if ridge is None or not ridge.active:
        top = kernel_projector(panel.train_modeled, panel.rel_tol)
    else:
        top = np.eye(m) - b_operator(panel, ridge)
    dtype = top.dtype
    out = np.zeros((total, total), dtype=dtype)
    out[:m, :m] = top
    out[m:, m:] = np.eye(total - m, dtype=dtype)
    return out


def risk_and_errors(panel: OperatorPanel, theta, M_full, y_full,
                    ridge: RidgeConfig | None = None, aliasing: np.ndarray | None = None,
                    identity_tol: float = 1e-8) -> RiskReport:
    """Fit from the training labels and break the prediction error apart.

    ``y_full`` must be the noiseless synthesis ``M_full @ theta``; only its
    training slice reaches the fit, so the decomposition itself stays label
    independent.  Verifies that the fitted signal equals the operator-route
    reconstruction to ``identity_tol`` relative and records the residual.
    """
    full = as_matrix(M_full)
    theta = as_vector(theta, length=panel.budget)
    y = as_vector(y_full, length=full.shape[0])
    n = panel.n_train
    theta_hat = infer_theta(panel, y[:n], ridge)
    y_hat = full @ theta_hat

    theta_m, theta_u = theta[: panel.m], theta[panel.m :]
    if aliasing is None:
        aliasing = aliasing_operator(panel, ridge)
    combo = b_operator(panel, ridge) @ theta_m
    if theta_u.size:
        combo = combo + aliasing @ theta_u
    reconstructed = np.zeros(panel.budget, dtype=combo.dtype)
    reconstructed[: panel.m] = combo
    y_check = full @ reconstructed
    scale = max(float(np.linalg.norm(y_hat)), float(np.linalg.norm(y)), 1e-300)
    residual = float(np.linalg.norm(y_hat - y_check)) / scale
    if residual > identity_tol:
        raise DecompositionMismatchError(
            f"fitted signal deviates from the operator route by {residual:.3e} relative"
        )

    if ridge is None or not ridge.active:
        bias_vec = kernel_projector(panel.train_modeled, panel.rel_tol) @ theta_m
    else:
        bias_vec = theta_m - b_operator(panel, ridge) @ theta_m
    alias_error = float(np.linalg.norm(aliasing @ theta_u)) if theta_u.size else 0.0
    sq = np.abs(y - y_hat) ** 2
    return RiskReport(
        theta_hat=theta_hat,
        risk_all=float(sq.mean()),
        risk_prediction_only=float(sq[n:].mean()) if sq[n:].size else 0.0,
        alias_error=alias_error,
        bias_error=float(np.linalg.norm(bias_vec)),
        nescience_error=float(np.linalg.norm(theta_u)),
        identity_residual=residual,
    )


def expected_unstructured_error(sigma2: float, dim_kernel: int, dim_nescient: int) -> float:
    """Expected squared invertibility error under i.i.d. mean-zero coefficients."""
    if sigma2 < 0 or dim_kernel < 0 or dim_nescient < 0:
        raise InvalidInputError("arguments must be nonnegative")
    return sigma2 * (dim_kernel + dim_nescient)


def _sv_stats(block: np.ndarray, rel_tol: float) -> tuple[int, float, float]:
    """(numerical rank, smallest retained singular value, largest singular value)."""
    if min(block.shape) == 0:
        return 0, 0.0, 0.0
    s = np.linalg.svd(block, compute_uv=False)
    threshold = rel_tol * float(s[0]) * max(block.shape)
    rank = int(np.count_nonzero(s > threshold))
    return rank, (float(s[rank - 1]) if rank else 0.0), float(s[0])


def norm_profile(train_block, m_range=None, rel_tol: float = DEFAULT_REL_TOL,
                 include_nescience: bool = True) -> list[NormProfileRecord]:
    """Label-free norm anatomy over model sizes, without fitting anything.

    Cheaper companion to :func:`sweep` for experiments that only need the
    pseudoinverse and nescience norms plus the independence indicator;
    ``include_nescience=False`` skips the suffix-block norm (reported as 0)
    and halves the work again.
    """
    block = as_matrix(train_block)
    budget = block.shape[1]
    ms = list(range(1, budget + 1)) if m_range is None else sorted({int(m) for m in m_range})
    if ms and (ms[0] < 1 or ms[-1] > budget):
        raise InvalidInputError(f"model sizes must lie in [1, {budget}]")
    rank_cache: dict[int, int] = {0: 0}

    def prefix_rank(k: int) -> int:
        if k not in rank_cache:
            rank_cache[k] = _sv_stats(block[:, :k], rel_tol)[0]
        return rank_cache[k]

    records = []
    for m in ms:
        rank, smallest, _ = _sv_stats(block[:, :m], rel_tol)
        rank_cache[m] = rank
        norm_pinv = 1.0 / smallest if rank else 0.0
        if include_nescience and m < budget:
            norm_nescient = spectral_norm(block[:, m:])
        else:
            norm_nescient = 0.0
        records.append(
            NormProfileRecord(
                m=m,
                norm_pinv=norm_pinv,
                norm_nescience=norm_nescient,
                rank=rank,
                new_col_independent=rank == prefix_rank(m - 1) + 1,
            )
        )
    return records


def sweep(basis: BasisSpec, design: SampleDesign, theta_spec: ParameterSpec,
          m_range, ridge: RidgeConfig | None = None, rel_tol: float = DEFAULT_REL_TOL,
          threads: int = 1) -> list[SweepRecord]:
    """One risk-anatomy record per model size, each computed independently.

    A failing model size yields a record carrying an error message instead of
    aborting the sweep.  Records come back sorted by m and are deterministic
    for fixed seeds regardless of ``threads``.
    """
    budget = basis.column_budget
    ms = sorted({int(m) for m in m_range})
    if not ms:
        raise InvalidInputError("empty model-size range")
    if ms[0] < 1 or ms[-1] > budget:
        raise InvalidInputError(f"model sizes must lie in [1, {budget}]")
    if theta_spec.length != budget:
        raise InvalidInputError(
            f"coefficient length {theta_spec.length} does not match budget {budget}"
        )
    M_full = evaluate_columns(basis, design.all_points, (0, budget))
    theta = make_theta(theta_spec)
    y_full = M_full @ theta
    n = design.n_train
    lam = ridge.lam if ridge is not None else 0.0

    def compute(m: int) -> SweepRecord:
        try:
            panel = build_panels(M_full, design, m, rel_tol)
            aliasing = aliasing_operator(panel, ridge)
            norm_a = spectral_norm(aliasing) if aliasing.size else 0.0
            if ridge is not None and ridge.active:
                _, norm_pinv = ridge_panels(panel, ridge)
            else:
                base = svd(panel.train_modeled, rel_tol)
                norm_pinv = 1.0 / base.min_positive_singular() if base.numerical_rank else 0.0
            norm_nescient = spectral_norm(panel.train_nescient) if m < budget else 0.0
            report = risk_and_errors(panel, theta, M_full, y_full, ridge=ridge, aliasing=aliasing)
            return SweepRecord(
                m=m,
                norm_A=norm_a,
                norm_pinv_TM=float(norm_pinv),
                norm_M_TU=norm_nescient,
                alias_error=report.alias_error,
                bias_error=report.bias_error,
                nescience_error=report.nescience_error,
                risk_all=report.risk_all,
                risk_prediction_only=report.risk_prediction_only,
                rank_TM=panel.rank,
                new_col_independent=False,
                lam=lam,
            )
        except (GadkitError, np.linalg.LinAlgError) as exc:
            nan = float("nan")
            return SweepRecord(
                m=m, norm_A=nan, norm_pinv_TM=nan, norm_M_TU=nan, alias_error=nan,
                bias_error=nan, nescience_error=nan, risk_all=nan,
                risk_prediction_only=nan, rank_TM=-1, new_col_independent=False,
                lam=lam, error=f"{type(exc).__name__}: {exc}",
            )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(compute, ms))
    else:
        records = [compute(m) for m in ms]

    # independence flags need the rank of the previous column prefix; reuse
    # ranks already computed where the range is contiguous
    train_block = M_full[:n]
    rank_cache = {0: 0}
    for record in records:
        if record.error is None:
            rank_cache[record.m] = record.rank_TM

    def prefix_rank(k: int) -> int:
        if k not in rank_cache:
            rank_cache[k] = _sv_stats(train_block[:, :k], rel_tol)[0]
        return rank_cache[k]

    flagged = []
    for record in records:
        if record.error is None:
            independent = record.rank_TM == prefix_rank(record.m - 1) + 1
            record = replace(record, new_col_independent=independent)
        flagged.append(record)
    return flagged
