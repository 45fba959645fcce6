#pragma once

#include "cone_kkt/cones.hpp"
#include "cone_kkt/fixtures.hpp"
#include "cone_kkt/io.hpp"
#include "cone_kkt/kkt.hpp"
#include "cone_kkt/linalg.hpp"
#include "cone_kkt/oracle.hpp"
#include "cone_kkt/problem.hpp"
#include "cone_kkt/regularity.hpp"
#include "cone_kkt/solver.hpp"
