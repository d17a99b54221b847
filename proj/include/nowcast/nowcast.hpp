#pragma once

#include "nowcast/apportionment.hpp"
#include "nowcast/config.hpp"
#include "nowcast/dates.hpp"
#include "nowcast/density.hpp"
#include "nowcast/errors.hpp"
#include "nowcast/events.hpp"
#include "nowcast/polls.hpp"
#include "nowcast/posterior.hpp"
#include "nowcast/report.hpp"
#include "nowcast/rng.hpp"
