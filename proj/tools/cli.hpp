#pragma once

#include <ostream>

namespace fpqmc::cli {

/// Entry point of the fpqmc tool. Returns the process exit status: 0 on
/// success, 1 for runtime failures, 2 for usage or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpqmc::cli
