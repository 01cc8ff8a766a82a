#pragma once

#include "bladyg/block.hpp"
#include "bladyg/degree.hpp"
#include "bladyg/graph.hpp"
#include "bladyg/io.hpp"
#include "bladyg/kcore.hpp"
#include "bladyg/mce.hpp"
#include "bladyg/metrics.hpp"
#include "bladyg/partition_algo.hpp"
#include "bladyg/partitioning.hpp"
#include "bladyg/prefix_tree.hpp"
#include "bladyg/runtime.hpp"
#include "bladyg/scenario.hpp"
#include "bladyg/util.hpp"
