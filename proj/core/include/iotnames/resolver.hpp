#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iotnames/dns_message.hpp"
#include "iotnames/error.hpp"
#include "iotnames/names.hpp"

namespace iotnames {

/// Socket-level failure; distinct from an Indeterminate verdict.
class TransportError : public IoError {
 public:
  using IoError::IoError;
};

/// Numeric host plus port: "192.0.2.1", "192.0.2.1:5353", "::1", "[::1]:53".
struct Endpoint {
  std::string host;
  std::uint16_t port = 53;
};

Endpoint parse_endpoint(std::string_view text);

enum class Resolvability { Resolvable, Unresolvable, Indeterminate };

std::string_view to_string(Resolvability status) noexcept;

struct ResolutionVerdict {
  DomainName name;
  Resolvability status = Resolvability::Indeterminate;
  /// Rcode of the last response seen, if any response arrived.
  std::optional<std::uint8_t> rcode;
  std::size_t answer_count = 0;
  std::size_t attempts = 0;
};

struct ProbeOptions {
  Endpoint server{"127.0.0.1", 53};
  std::chrono::milliseconds timeout{3000};
  std::size_t retries = 2;
  std::size_t max_inflight = 64;
  /// Seeds the per-name query IDs.
  std::uint64_t seed = 0;
};

/// Asks `server` for the A record of `name`.
///
/// NOERROR, with or without answers, is Resolvable; NXDOMAIN is
/// Unresolvable. Timeouts and other rcodes consume one of the `retries + 1`
/// attempts; when all are used up the verdict is Indeterminate. A truncated
/// reply is retried once and is Indeterminate if it repeats.
ResolutionVerdict probe_resolvable(const DomainName& name, const ProbeOptions& options,
                                   std::uint16_t query_id);

/// Probes every name with at most `max_inflight` outstanding queries.
/// Results are in input order.
std::vector<ResolutionVerdict> probe_all(std::span<const DomainName> names, const ProbeOptions& options);

/// Collapses the three-way verdict to the binary resolvable/unresolvable split.
inline bool counts_as_resolvable(Resolvability status) noexcept {
  return status == Resolvability::Resolvable;
}

}  // namespace iotnames
