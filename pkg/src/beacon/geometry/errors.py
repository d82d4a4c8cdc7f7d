from ..errors import ConfigError

__all__ = [
    "GeometricOverlapError",
    "UnknownHostHoleError",
    "ResolutionError",
    "DuplicateHostError",
]


class GeometricOverlapError(ConfigError):
    """Raised when two holes (with shifts and annuli applied) intersect."""

    def __init__(self, first, second, distance_nm: float):
        super().__init__(
            f"Holes ({first.i}, {first.j}) and ({second.i}, {second.j}) overlap: "
            f"centres {distance_nm:.2f} nm apart but outer radii sum to "
            f"{first.outer_radius_nm + second.outer_radius_nm:.2f} nm.",
        )


class UnknownHostHoleError(ConfigError):
    """Raised when a perturbation layer names a hole the lattice does not contain."""

    def __init__(self, label: str, host: tuple[int, int]):
        super().__init__(
            f"Perturbation layer {label} names host hole {host}, which is not in the "
            "lattice (removed by the defect or outside the lattice). "
            "Hint: enlarge nx/ny or check the (i, j) lattice coordinates.",
        )


class ResolutionError(ConfigError):
    """Raised when the raster pitch is coarser than the resolution floor a/12."""

    def __init__(self, dx_nm: float, a_nm: float):
        super().__init__(
            f"Grid pitch {dx_nm} nm is coarser than the floor a/12 = {a_nm / 12:.3f} nm.",
        )


class DuplicateHostError(ConfigError):
    """Raised when one hole is claimed by two perturbation layers."""

    def __init__(self, label: str, host: tuple[int, int], other: str):
        super().__init__(
            f"Host hole {host} of layer {label} already carries layer {other}.",
        )
