#pragma once

// Umbrella header for the fatigue-aware recommendation bandit library.

#include "fatigue_bandit/checks.hpp"
#include "fatigue_bandit/episode.hpp"
#include "fatigue_bandit/harness.hpp"
#include "fatigue_bandit/interaction.hpp"
#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/oracle.hpp"
#include "fatigue_bandit/policies.hpp"
#include "fatigue_bandit/posterior.hpp"
#include "fatigue_bandit/rng.hpp"
