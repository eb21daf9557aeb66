from geometry.coordinates import dist_to_cone, st_coords, st_from_yz, yz_coords
from geometry.grid import NodeKind, TriangleGrid, build_grid, energy_constant, sphere_area

__all__ = [
    'NodeKind', 'TriangleGrid', 'build_grid', 'dist_to_cone', 'energy_constant',
    'sphere_area', 'st_coords', 'st_from_yz', 'yz_coords',
]
