from profiles.profile1d import (
    Profile1D,
    build_profile,
    one_d_solution,
    profile_energy_line,
    profile_sector_values,
)

__all__ = ['Profile1D', 'build_profile', 'one_d_solution', 'profile_energy_line', 'profile_sector_values']
