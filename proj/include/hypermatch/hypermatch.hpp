#pragma once

#include "hypermatch/accounting.hpp"
#include "hypermatch/engine.hpp"
#include "hypermatch/leveled_structure.hpp"
#include "hypermatch/parallel.hpp"
#include "hypermatch/primitives.hpp"
#include "hypermatch/rng.hpp"
#include "hypermatch/set_cover.hpp"
#include "hypermatch/static_matching.hpp"
#include "hypermatch/stream_io.hpp"
#include "hypermatch/types.hpp"
#include "hypermatch/work_counters.hpp"
#include "hypermatch/workload_gen.hpp"
