#pragma once

#include <optional>
#include <span>
#include <vector>

namespace uapids {

// Pearson correlation coefficient. Empty when n < 2, the lengths differ, or
// either vector has zero variance.
std::optional<double> pcc(std::span<const double> x, std::span<const double> y);

// d PCC(u, w) / du with w held constant; empty where pcc() is undefined.
std::optional<std::vector<double>> pcc_gradient(std::span<const double> u, std::span<const double> w);

// Cosine similarity; empty if either vector has zero norm.
std::optional<double> cosine_similarity(std::span<const double> u, std::span<const double> v);

// d cos(u, v) / du with v held constant.
std::optional<std::vector<double>> cosine_gradient(std::span<const double> u, std::span<const double> v);

}  // namespace uapids
