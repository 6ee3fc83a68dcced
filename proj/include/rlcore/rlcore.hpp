#pragma once

// Umbrella header: the full framework.

#include "rlcore/agent.hpp"
#include "rlcore/agents/batch.hpp"
#include "rlcore/agents/dqn.hpp"
#include "rlcore/agents/pg.hpp"
#include "rlcore/agents/td.hpp"
#include "rlcore/agents/true_online_sarsa.hpp"
#include "rlcore/core.hpp"
#include "rlcore/dataset.hpp"
#include "rlcore/environment.hpp"
#include "rlcore/envs/cart_pole.hpp"
#include "rlcore/envs/chain.hpp"
#include "rlcore/envs/factory.hpp"
#include "rlcore/envs/grid_world.hpp"
#include "rlcore/envs/mountain_car.hpp"
#include "rlcore/experiment/factory.hpp"
#include "rlcore/experiment/runner.hpp"
#include "rlcore/features.hpp"
#include "rlcore/mlp.hpp"
#include "rlcore/policy.hpp"
#include "rlcore/q_regressor.hpp"
#include "rlcore/regressor.hpp"
#include "rlcore/rng.hpp"
#include "rlcore/schedule.hpp"
#include "rlcore/space.hpp"
