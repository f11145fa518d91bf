#pragma once
// Umbrella header for the soft-error vulnerability toolkit.

#include "ssvf/cache.hpp"
#include "ssvf/campaign.hpp"
#include "ssvf/config.hpp"
#include "ssvf/consequence.hpp"
#include "ssvf/driver.hpp"
#include "ssvf/ecc.hpp"
#include "ssvf/engine.hpp"
#include "ssvf/events.hpp"
#include "ssvf/injection.hpp"
#include "ssvf/metrics.hpp"
#include "ssvf/report.hpp"
#include "ssvf/rng.hpp"
#include "ssvf/ser.hpp"
#include "ssvf/system.hpp"
#include "ssvf/workload.hpp"
