#pragma once

#include "kvtier/analysis.hpp"
#include "kvtier/bf16.hpp"
#include "kvtier/chunk.hpp"
#include "kvtier/codecs.hpp"
#include "kvtier/corpus.hpp"
#include "kvtier/error.hpp"
#include "kvtier/fp8.hpp"
#include "kvtier/gse.hpp"
#include "kvtier/hotness.hpp"
#include "kvtier/io.hpp"
#include "kvtier/lru.hpp"
#include "kvtier/pipeline.hpp"
#include "kvtier/placement.hpp"
#include "kvtier/random.hpp"
#include "kvtier/simulator.hpp"
#include "kvtier/workload.hpp"
