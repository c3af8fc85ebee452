#pragma once

#include <iosfwd>

namespace sbst {

/// Entry point of the sbstgen tool. Returns 0 on success, 1 when
/// verification finds undetected non-redundant faults, 2 on usage or
/// configuration errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sbst
