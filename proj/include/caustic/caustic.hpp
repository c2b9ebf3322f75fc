#pragma once

#include "assembly.hpp"
#include "banded.hpp"
#include "config.hpp"
#include "core.hpp"
#include "cyclic_reduction.hpp"
#include "driver.hpp"
#include "gmres.hpp"
#include "grid.hpp"
#include "hydro.hpp"
#include "io.hpp"
#include "paraxial.hpp"
#include "precond.hpp"
#include "spectral.hpp"
#include "tridiag.hpp"
