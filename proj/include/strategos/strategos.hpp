#pragma once

// Umbrella header.

#include "strategos/actions.hpp"
#include "strategos/backend.hpp"
#include "strategos/catalog.hpp"
#include "strategos/common.hpp"
#include "strategos/config.hpp"
#include "strategos/eval.hpp"
#include "strategos/machine.hpp"
#include "strategos/memory.hpp"
#include "strategos/observation.hpp"
#include "strategos/orchestrator.hpp"
#include "strategos/predicate.hpp"
#include "strategos/prompt.hpp"
#include "strategos/world.hpp"
