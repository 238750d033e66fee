"""The affine iterated function system container shared by every analysis."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import CommonFixedPoint, NotContractive
from .mat2 import DEFAULT_RANK_TOL, Mat2

#: Default node budget for word-tree enumerations; the AFFTHERMO_BUDGET
#: environment variable overrides it.
DEFAULT_NODE_BUDGET = 50_000_000


def node_budget(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("AFFTHERMO_BUDGET")
    if env:
        return int(float(env))
    return DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class AffineIFS:
    """An ordered tuple of affine maps x -> A_i x + v_i on the plane.

    The linear parts may be singular; ``invertible_index`` lists the letters
    whose matrix has full rank.
    """

    maps: Tuple[Tuple[Mat2, np.ndarray], ...]
    name: str = ""
    rank_tol: float = DEFAULT_RANK_TOL

    @staticmethod
    def from_matrices(
        matrices: Sequence,
        translations: Optional[Sequence] = None,
        name: str = "",
        rank_tol: float = DEFAULT_RANK_TOL,
    ) -> "AffineIFS":
        mats = [m if isinstance(m, Mat2) else Mat2.from_rows(m) for m in matrices]
        if not mats:
            raise ValueError("an affine IFS needs at least one map")
        if translations is None:
            translations = [np.zeros(2) for _ in mats]
        pairs = tuple(
            (m, np.asarray(v, dtype=float).reshape(2)) for m, v in zip(mats, translations)
        )
        if len(pairs) != len(mats):
            raise ValueError("matrices and translations must have equal length")
        return AffineIFS(pairs, name=name, rank_tol=rank_tol)

    def __len__(self) -> int:
        return len(self.maps)

    @property
    def matrices(self) -> List[Mat2]:
        return [m for m, _ in self.maps]

    @property
    def translations(self) -> List[np.ndarray]:
        return [v for _, v in self.maps]

    @property
    def invertible_index(self) -> List[int]:
        return [i for i, (m, _) in enumerate(self.maps) if m.is_invertible(self.rank_tol)]

    @property
    def noninvertible_index(self) -> List[int]:
        inv = set(self.invertible_index)
        return [i for i in range(len(self.maps)) if i not in inv]

    def norms(self) -> List[float]:
        return [m.norm() for m in self.matrices]

    def max_norm(self) -> float:
        return max(self.norms())

    def is_contractive(self) -> bool:
        return self.max_norm() < 1.0

    def matrix_stack(self) -> np.ndarray:
        """Letter matrices as an array of shape (#J, 2, 2)."""
        return np.stack([m.to_array() for m in self.matrices])

    def translation_stack(self) -> np.ndarray:
        return np.stack(self.translations)

    def restrict(self, letters: Sequence[int], name: str = "") -> "AffineIFS":
        return AffineIFS(
            tuple(self.maps[i] for i in letters),
            name=name or self.name,
            rank_tol=self.rank_tol,
        )

    def rescaled(self, factor: float) -> "AffineIFS":
        return AffineIFS(
            tuple((m * factor, v) for m, v in self.maps),
            name=self.name,
            rank_tol=self.rank_tol,
        )

    def with_translations(self, translations: Sequence) -> "AffineIFS":
        return AffineIFS.from_matrices(
            self.matrices, translations, name=self.name, rank_tol=self.rank_tol
        )

    def check_contractive(self) -> None:
        if not self.is_contractive():
            raise NotContractive(
                f"geometry requires max matrix norm < 1, got {self.max_norm():.6g}"
            )

    def check_no_common_fixed_point(self, tol: float = 1e-9) -> None:
        """Each contraction has a unique fixed point; reject if they all agree."""
        self.check_contractive()
        if len(self.maps) == 1:
            return
        eye = np.eye(2)
        points = [
            np.linalg.solve(eye - m.to_array(), v) for m, v in self.maps
        ]
        base = points[0]
        if all(np.linalg.norm(p - base) <= tol for p in points[1:]):
            raise CommonFixedPoint(
                "the affine maps share a common fixed point; not a valid IFS"
            )
