#pragma once

// Umbrella header.

#include "dmp/errors.hpp"
#include "dmp/manifold.hpp"
#include "dmp/phase.hpp"
#include "dmp/basis.hpp"
#include "dmp/trajectory.hpp"
#include "dmp/learning.hpp"
#include "dmp/targets.hpp"
#include "dmp/discrete.hpp"
#include "dmp/periodic.hpp"
#include "dmp/geometric.hpp"
#include "dmp/joining.hpp"
#include "dmp/coupling.hpp"
#include "dmp/model.hpp"
#include "dmp/library.hpp"
#include "dmp/io.hpp"
#include "dmp/demos.hpp"
#include "dmp/scenarios.hpp"
