#pragma once

#include <string>
#include <string_view>

namespace povm {

// Git blob hash: SHA-1 over "blob <len>\0" + data, lowercase hex.
std::string content_hash(std::string_view data);

} // namespace povm
