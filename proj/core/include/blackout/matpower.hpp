#pragma once

#include <string_view>

#include "blackout/grid_model.hpp"

namespace blackout {

enum class MaintainableSelection { transformers, lines, all, none };

struct MatpowerImportOptions {
  MaintainableSelection maintainable = MaintainableSelection::transformers;
  /// Branches with rateA = 0 get this multiple of their base-case DC flow...
  double unlimited_rating_factor = 1.5;
  /// ...but never less than this, MW.
  double min_flow_limit = 10.0;
};

/// Parses a MATPOWER case (`baseMVA`, `bus`, `gen`, `branch`; `bus_name` is
/// optional) into a validated Network.
///
/// Out-of-service branches and generators are dropped. Branch ids are the
/// 1-based row numbers of the branch matrix. A branch is a transformer iff its
/// tap ratio is nonzero. Bus Pd becomes a load; negative Pd becomes a
/// generator with p_min = 0. Generator Pg is rescaled proportionally (subject
/// to limits) so that total dispatch equals total demand.
///
/// Throws ParseError for malformed rows and ValidationError for dangling bus
/// references, zero reactances and other invariant violations.
Network parse_matpower(std::string_view case_text, const MatpowerImportOptions& options = {});

/// Reads a file and calls parse_matpower.
Network load_matpower(const std::string& path, const MatpowerImportOptions& options = {});

}  // namespace blackout
