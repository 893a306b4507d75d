#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wiretap::cli {

/// Entry point shared by the binary and the tests. Exit codes are a total
/// function of the outcome category: 0 ok/certified, 2 parse error,
/// 3 validation failure, 4 uncertified saddle, 5 verification failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wiretap::cli
