#pragma once

// Umbrella include for the whole library: deterministic lane-graph traffic
// world, ego agent with two-tier safety enforcement, pluggable reasoners,
// short-term memory, coach/guideline loop, and the episode/ablation harness.

#include <surreal/actions.hpp>
#include <surreal/agent.hpp>
#include <surreal/coach.hpp>
#include <surreal/config.hpp>
#include <surreal/context.hpp>
#include <surreal/guidelines.hpp>
#include <surreal/harness.hpp>
#include <surreal/memory.hpp>
#include <surreal/perception.hpp>
#include <surreal/prompt.hpp>
#include <surreal/remote_coach.hpp>
#include <surreal/remote_reasoner.hpp>
#include <surreal/rng.hpp>
#include <surreal/road_network.hpp>
#include <surreal/routing.hpp>
#include <surreal/safety.hpp>
#include <surreal/scripted_reasoner.hpp>
#include <surreal/trace.hpp>
#include <surreal/world.hpp>
#include <surreal/world_sim.hpp>
