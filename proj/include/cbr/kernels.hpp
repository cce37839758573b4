#pragma once

#include <span>

#include "cbr/case.hpp"
#include "cbr/similarity.hpp"

namespace cbr {

// Fills scores[i] = global_similarity(config, query, cases[i].problem).
// OpenMP-parallel over cases; the first exception raised by any thread is
// rethrown after the loop.
void score_cases(std::span<const Case> cases, const Problem& query, const SimilarityConfig& config,
                 std::span<double> scores);

// Sequential version of score_cases. Produces bit-identical scores.
void score_cases_serial(std::span<const Case> cases, const Problem& query,
                        const SimilarityConfig& config, std::span<double> scores);

}  // namespace cbr
