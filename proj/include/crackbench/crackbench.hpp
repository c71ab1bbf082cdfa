#pragma once

#include "crackbench/baselines.hpp"
#include "crackbench/bench.hpp"
#include "crackbench/column.hpp"
#include "crackbench/optimized.hpp"
#include "crackbench/piece_index.hpp"
#include "crackbench/stochastic.hpp"
#include "crackbench/types.hpp"
#include "crackbench/workload.hpp"
