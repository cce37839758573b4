#include "cbr/kernels.hpp"

#include <exception>

#include <omp.h>

namespace cbr {

void score_cases(std::span<const Case> cases, const Problem& query, const SimilarityConfig& config,
                 std::span<double> scores)
{
    const auto n = static_cast<std::ptrdiff_t>(cases.size());
    std::exception_ptr failure;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            scores[i] = global_similarity(config, query, cases[i].problem);
        } catch (...) {
#pragma omp critical(cbr_score_failure)
            if (!failure) failure = std::current_exception();
        }
    }

    if (failure) std::rethrow_exception(failure);
}

void score_cases_serial(std::span<const Case> cases, const Problem& query, const SimilarityConfig& config,
                        std::span<double> scores)
{
    for (std::size_t i = 0; i < cases.size(); ++i) {
        scores[i] = global_similarity(config, query, cases[i].problem);
    }
}

}  // namespace cbr
