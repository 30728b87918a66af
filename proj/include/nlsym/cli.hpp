#pragma once

#include <iosfwd>

namespace nlsym {

// Exit codes: 0 success, 1 verification failure or failed computation,
// 2 usage error (bad flags, malformed expressions, schema errors).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlsym
