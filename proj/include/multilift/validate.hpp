#pragma once

#include <iosfwd>

namespace multilift {

// Quick oracle/property sweep backing the `validate` CLI subcommand:
// rotation orthonormality, quaternion round trips, smootherstep endpoint
// derivatives, process-Jacobian finite differences, sensor round trip,
// fusion order independence. Prints one line per check; returns true when
// everything passes.
bool run_validation(std::ostream& out);

}  // namespace multilift
