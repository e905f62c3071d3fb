#pragma once

// Umbrella header.

#include "sqoa/brute_force.hpp"
#include "sqoa/checks.hpp"
#include "sqoa/common.hpp"
#include "sqoa/corpus.hpp"
#include "sqoa/instance.hpp"
#include "sqoa/partition.hpp"
#include "sqoa/pending.hpp"
#include "sqoa/policies.hpp"
#include "sqoa/power.hpp"
#include "sqoa/proof_cases.hpp"
#include "sqoa/replay.hpp"
#include "sqoa/schedule.hpp"
#include "sqoa/simulate.hpp"
#include "sqoa/yds.hpp"
