#pragma once

// Umbrella header for the order-convolution algebra library.

#include "ordconv/rational.hpp"
#include "ordconv/scalar.hpp"
#include "ordconv/symfunc.hpp"
#include "ordconv/oracle.hpp"
#include "ordconv/algebra.hpp"
#include "ordconv/multiplier.hpp"
#include "ordconv/dsl.hpp"
#include "ordconv/generators.hpp"
#include "ordconv/scenarios.hpp"
