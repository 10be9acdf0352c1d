#pragma once

// Convenience include for the whole library.

#include "dmsim/decision.hpp"
#include "dmsim/digest.hpp"
#include "dmsim/engine.hpp"
#include "dmsim/entities.hpp"
#include "dmsim/geometry.hpp"
#include "dmsim/links.hpp"
#include "dmsim/metrics.hpp"
#include "dmsim/mule.hpp"
#include "dmsim/processing.hpp"
#include "dmsim/rng.hpp"
#include "dmsim/scenario.hpp"
#include "dmsim/sensing.hpp"
#include "dmsim/sweep.hpp"
#include "dmsim/trace.hpp"
#include "dmsim/validation.hpp"
