#pragma once

#include "cgalopt/atom.hpp"
#include "cgalopt/cgal.hpp"
#include "cgalopt/errors.hpp"
#include "cgalopt/harness.hpp"
#include "cgalopt/instances.hpp"
#include "cgalopt/lanczos.hpp"
#include "cgalopt/linalg.hpp"
#include "cgalopt/oracles.hpp"
#include "cgalopt/problem.hpp"
#include "cgalopt/reference.hpp"
#include "cgalopt/smoothing.hpp"
#include "cgalopt/state.hpp"
#include "cgalopt/step_rules.hpp"
#include "cgalopt/steps.hpp"
