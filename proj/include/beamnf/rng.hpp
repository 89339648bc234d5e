// Deterministic uniform doubles from a seeded engine.  The standard
// distributions are implementation-defined, so byte-reproducible outputs
// (reports, samples) use this fixed mapping instead.
#pragma once

#include <cstdint>
#include <random>

namespace beamnf {

inline double u01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace beamnf
