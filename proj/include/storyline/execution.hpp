#pragma once

namespace storyline {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// identical results.
enum class Execution { Serial, Parallel };

}  // namespace storyline
