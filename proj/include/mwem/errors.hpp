#pragma once

#include <stdexcept>
#include <string>

namespace mwem {

// Exit-code taxonomy: argument errors -> std::invalid_argument (1),
// protocol/communication -> ProtocolError (2), data/format -> FormatError (3).

struct ProtocolError : std::runtime_error {
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

// A replicated component received twice did not match.
struct ConsistencyError : ProtocolError {
  explicit ConsistencyError(const std::string& what) : ProtocolError(what) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mwem
