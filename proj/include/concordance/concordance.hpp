#pragma once

// Umbrella header for the statistics engine (without the CLI layer).

#include "concordance/disorder.hpp"
#include "concordance/error.hpp"
#include "concordance/exact_distribution.hpp"
#include "concordance/half_count.hpp"
#include "concordance/kendall.hpp"
#include "concordance/kruskal_wallis.hpp"
#include "concordance/lop.hpp"
#include "concordance/monte_carlo.hpp"
#include "concordance/ranking.hpp"
