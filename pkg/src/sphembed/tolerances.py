"""Numerical thresholds shared by the spectral, embedding and classifier stages."""

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class Tolerances:
    # relative gap used to split eigenvalues of the random combination into clusters
    eig_rel: float = 1e-8
    # absolute tolerance for equality of inner products
    gram: float = 1e-9
    # v_i > 1 - faithful is treated as a collapsed pair
    faithful: float = 1e-6
    # integer round trip for multiplicities, valencies and P/Q corner entries
    integral: float = 1e-6
    # smallest singular value allowed for {X_a, X_a+1, X_a+2}
    coplanar: float = 1e-8
    # matching embedded components against catalog fingerprints
    fingerprint: float = 1e-6

    def override(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def as_dict(self):
        return asdict(self)


DEFAULT = Tolerances()
