#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fasc/spectra.hpp"

namespace fasc::testing {

// ARI by enumerating every unordered pair (Hubert-Arabie form).
double pair_counting_ari(std::span<const int> truth, std::span<const int> predicted);

// NMI from joint and marginal frequencies computed independently of the
// contingency-table code.
double entropy_nmi(std::span<const int> truth, std::span<const int> predicted);

// Minimiser of `f` over the box [lo, hi]^dim by repeated grid refinement.
// Returns the best point found.
std::vector<double> grid_search_min(const std::function<double(std::span<const double>)>& f,
                                    std::size_t dim, double lo, double hi,
                                    std::size_t steps = 21, int levels = 60);

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim, double density,
                       std::uint64_t first_id = 0);

Dataset dataset_from_rows(const std::vector<std::vector<double>>& rows,
                          std::optional<std::size_t> split = std::nullopt);

// Random permutation of the dataset positions, ids travelling with rows.
Dataset permuted(const Dataset& data, std::mt19937_64& rng);

}  // namespace fasc::testing
