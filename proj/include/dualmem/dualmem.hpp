/*
 * Umbrella header for the dualmem conversational-memory toolkit.
 */
#pragma once

#include "dualmem/backends.hpp"
#include "dualmem/baseline_scenario.hpp"
#include "dualmem/bench.hpp"
#include "dualmem/chunker.hpp"
#include "dualmem/context.hpp"
#include "dualmem/episodic.hpp"
#include "dualmem/evaluation.hpp"
#include "dualmem/facts.hpp"
#include "dualmem/full_context.hpp"
#include "dualmem/http_backend.hpp"
#include "dualmem/index.hpp"
#include "dualmem/message.hpp"
#include "dualmem/persistence.hpp"
#include "dualmem/profile.hpp"
#include "dualmem/simulation.hpp"
#include "dualmem/tokens.hpp"
#include "dualmem/util.hpp"
