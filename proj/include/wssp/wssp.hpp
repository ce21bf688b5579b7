#pragma once

#include "wssp/rng.hpp"
#include "wssp/core.hpp"
#include "wssp/policies.hpp"
#include "wssp/analytics.hpp"
#include "wssp/parallel.hpp"
#include "wssp/montecarlo.hpp"
#include "wssp/multiround.hpp"
#include "wssp/io.hpp"
