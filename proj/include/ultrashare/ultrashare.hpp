#pragma once

#include "ultrashare/sim_core.hpp"
#include "ultrashare/command_model.hpp"
#include "ultrashare/allocator.hpp"
#include "ultrashare/accel_controller.hpp"
#include "ultrashare/sg_engine.hpp"
#include "ultrashare/transfer_link.hpp"
#include "ultrashare/metrics.hpp"
#include "ultrashare/scenario_config.hpp"
#include "ultrashare/engine.hpp"
#include "ultrashare/config_io.hpp"
