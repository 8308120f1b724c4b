#pragma once

#include "triest/closed_forms.hpp"
#include "triest/counters.hpp"
#include "triest/edge_sample.hpp"
#include "triest/estimators.hpp"
#include "triest/mascot.hpp"
#include "triest/metrics.hpp"
#include "triest/montecarlo.hpp"
#include "triest/oracle.hpp"
#include "triest/random.hpp"
#include "triest/sampling.hpp"
#include "triest/stream.hpp"
#include "triest/types.hpp"
