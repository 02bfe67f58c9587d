#pragma once

#include "fedosov/sampling.hpp"

namespace fedosov::testing {
using namespace fedosov::sampling;
}  // namespace fedosov::testing
