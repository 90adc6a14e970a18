"""SE(2,N) group-equivariant CNN layers and transforms."""

try:
    from . import _se2conv as _core  # installed package layout
except ImportError:  # build-tree layout: the extension sits on sys.path alone
    import _se2conv as _core

Network = _core.Network
disk_mask = _core.disk_mask
rotation_operator = _core.rotation_operator
rotate_kernels = _core.rotate_kernels
lift = _core.lift
group_correlate = _core.group_correlate
project = _core.project
roto_translate = _core.roto_translate
shift_twist = _core.shift_twist
synth_rotated_patterns = _core.synth_rotated_patterns
gaussian_mixture_image = _core.gaussian_mixture_image

__all__ = [
    "Network",
    "disk_mask",
    "rotation_operator",
    "rotate_kernels",
    "lift",
    "group_correlate",
    "project",
    "roto_translate",
    "shift_twist",
    "synth_rotated_patterns",
    "gaussian_mixture_image",
]
