#pragma once

#include "shiftconc/additive.hpp"
#include "shiftconc/cache.hpp"
#include "shiftconc/concentration.hpp"
#include "shiftconc/decomposition.hpp"
#include "shiftconc/dispersion.hpp"
#include "shiftconc/distribution.hpp"
#include "shiftconc/error.hpp"
#include "shiftconc/fourier.hpp"
#include "shiftconc/golden_section.hpp"
#include "shiftconc/quadrature.hpp"
#include "shiftconc/selberg.hpp"
#include "shiftconc/sieve.hpp"
#include "shiftconc/summation.hpp"

namespace shiftconc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace shiftconc
