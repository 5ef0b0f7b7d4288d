#pragma once

// Type-I crystal numbers shared by several suites.

#include "spinphonon/boundstate.hpp"
#include "spinphonon/units.hpp"

namespace fixtures {

inline constexpr double kA = 150e-9;
inline constexpr double kArea = 100e-9 * 20e-9;

inline spinphonon::BandEdgeModel type_one_band() {
  return spinphonon::make_band_edge_model(spinphonon::hz_to_angular(45.5e9),
                                          spinphonon::hz_to_angular(3.5e9), kA, kArea);
}

inline double type_one_g_eff() { return 0.1 * spinphonon::hz_to_angular(178e6); }

}  // namespace fixtures
