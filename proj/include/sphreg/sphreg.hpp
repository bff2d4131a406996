#pragma once

#include "sphreg/chain.hpp"
#include "sphreg/diagnostics.hpp"
#include "sphreg/distributions.hpp"
#include "sphreg/metrics.hpp"
#include "sphreg/model.hpp"
#include "sphreg/rng.hpp"
#include "sphreg/sampler_core.hpp"
#include "sphreg/slice.hpp"
#include "sphreg/special_math.hpp"
#include "sphreg/sph_model.hpp"
#include "sphreg/spike_slab.hpp"
#include "sphreg/stats.hpp"
#include "sphreg/synthetic.hpp"
#include "sphreg/version.hpp"
