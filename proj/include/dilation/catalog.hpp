#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dilation/dynamics.hpp"

namespace dilation {

struct CatalogEntry {
  std::string id;
  std::string description;
  Params defaults;
  /// Builds the system; unknown parameter keys are rejected.
  SystemDef (*make)(const Params&);
  /// Exact Lyapunov spectrum (sorted nonincreasing) when it is known in closed form.
  std::optional<std::vector<double>> (*ground_truth)(const Params&);
};

/// Every catalog system. All use the flat metric.
///   identity        x -> x on T^d                       (param d)
///   diag_toral      (x, y) -> (a x, b y) mod 1          (params a, b; integers)
///   cat_map         [[2,1],[1,1]] mod 1
///   doubling        x -> 2x mod 1 on the circle
///   doubling_nd     x -> 2x mod 1 on T^d                (param d)
///   standard_map    Chirikov map on T^2                 (param K)
///   perturbed_cat   cat map + eps trigonometric term    (param eps, |eps| <= 0.05)
///   contraction     x -> c + s (x - c) on [0,1]^d       (params d, s with 0 < s < 1)
const std::vector<CatalogEntry>& catalog();

const CatalogEntry& catalog_entry(const std::string& id);

/// Looks up `id`, fills unspecified parameters with defaults, and builds it.
SystemDef make_system(const std::string& id, const Params& overrides = {});

std::optional<std::vector<double>> known_spectrum(const std::string& id, const Params& overrides = {});

}  // namespace dilation
