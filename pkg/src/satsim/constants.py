"""Physical constants shared across modules.

Lengths in km and seconds unless a name says otherwise; radio quantities
(frequency, power, noise) stay in SI.
"""

EARTH_RADIUS_KM = 6371.0
MU_EARTH_KM3_S2 = 398600.4418
EARTH_ROTATION_RAD_S = 7.2921159e-5

SPEED_OF_LIGHT_M_S = 299792458.0
SPEED_OF_LIGHT_KM_S = 299792.458

BOLTZMANN_J_K = 1.380649e-23
