#pragma once

#include <string_view>

namespace exvocab {

// Contents of a file shipped under core/data/, compiled into the library so
// the CLI works without an install tree. Throws for unknown names.
std::string_view embedded_file(std::string_view name);

}  // namespace exvocab
