#pragma once

#include "branchnet/chains.hpp"
#include "branchnet/construct.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/energy.hpp"
#include "branchnet/errors.hpp"
#include "branchnet/io.hpp"
#include "branchnet/metrics.hpp"
#include "branchnet/metrization.hpp"
#include "branchnet/optimize.hpp"
#include "branchnet/svg.hpp"
