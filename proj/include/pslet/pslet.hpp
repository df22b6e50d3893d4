#pragma once

#include "pslet/error.hpp"
#include "pslet/potential.hpp"
#include "pslet/expansion.hpp"
#include "pslet/parity_polynomial.hpp"
#include "pslet/riccati.hpp"
#include "pslet/pade.hpp"
#include "pslet/numerov.hpp"
#include "pslet/workbench.hpp"
