#include "iotnames/resolver.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "iotnames/random.hpp"

namespace iotnames {
namespace {

class UdpSocket {
 public:
  explicit UdpSocket(const Endpoint& server) {
    addrinfo hints{};
    hints.ai_socktype = SOCK_DGRAM;
    hints.ai_flags = AI_NUMERICHOST | AI_NUMERICSERV;
    addrinfo* result = nullptr;
    const std::string port = std::to_string(server.port);
    if (int rc = ::getaddrinfo(server.host.c_str(), port.c_str(), &hints, &result); rc != 0) {
      throw TransportError("cannot parse resolver address '" + server.host + "': " + ::gai_strerror(rc));
    }
    std::memcpy(&addr_, result->ai_addr, result->ai_addrlen);
    addr_len_ = result->ai_addrlen;
    fd_ = ::socket(result->ai_family, SOCK_DGRAM, 0);
    ::freeaddrinfo(result);
    if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
    if (::connect(fd_, reinterpret_cast<const sockaddr*>(&addr_), addr_len_) != 0) {
      const int err = errno;
      ::close(fd_);
      throw TransportError(std::string("connect: ") + std::strerror(err));
    }
  }
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket() { ::close(fd_); }

  void send(std::span<const std::uint8_t> payload) {
    if (::send(fd_, payload.data(), payload.size(), 0) < 0) {
      throw TransportError(std::string("send: ") + std::strerror(errno));
    }
  }

  /// Waits until `deadline` for a datagram. Connection-refused errors from
  /// the ICMP path are treated like silence.
  std::optional<dns::Bytes> receive(std::chrono::steady_clock::time_point deadline) {
    while (true) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd pfd{fd_, POLLIN, 0};
      int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll: ") + std::strerror(errno));
      }
      if (ready == 0) return std::nullopt;
      dns::Bytes buf(65535);
      ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
      if (n < 0) {
        if (errno == EINTR || errno == ECONNREFUSED || errno == EAGAIN) continue;
        throw TransportError(std::string("recv: ") + std::strerror(errno));
      }
      buf.resize(static_cast<std::size_t>(n));
      return buf;
    }
  }

 private:
  int fd_ = -1;
  sockaddr_storage addr_{};
  socklen_t addr_len_ = 0;
};

bool answers_query(const dns::Message& reply, std::uint16_t id, const DomainName& name) {
  if (!reply.header.qr || reply.header.id != id) return false;
  if (reply.questions.size() != 1) return false;
  const auto& q = reply.questions.front();
  if (q.qtype != static_cast<std::uint16_t>(dns::RecordType::A) || q.qclass != dns::kClassIn) return false;
  // Resolvers may echo the name with altered case.
  return normalize(q.qname.text()).text == name.text();
}

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  std::string_view port;
  if (text.starts_with('[')) {
    auto close = text.find(']');
    if (close == std::string_view::npos) throw InputError("bad endpoint '" + std::string(text) + "'");
    ep.host = std::string(text.substr(1, close - 1));
    auto rest = text.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') throw InputError("bad endpoint '" + std::string(text) + "'");
      port = rest.substr(1);
    }
  } else if (std::count(text.begin(), text.end(), ':') == 1) {
    auto colon = text.find(':');
    ep.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  } else {
    ep.host = std::string(text);
  }
  if (ep.host.empty()) throw InputError("bad endpoint '" + std::string(text) + "'");
  in6_addr scratch{};
  if (::inet_pton(AF_INET, ep.host.c_str(), &scratch) != 1 && ::inet_pton(AF_INET6, ep.host.c_str(), &scratch) != 1) {
    throw InputError("endpoint host must be a numeric address: '" + ep.host + "'");
  }
  if (!port.empty()) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value == 0 || value > 65535) {
      throw InputError("bad port in endpoint '" + std::string(text) + "'");
    }
    ep.port = static_cast<std::uint16_t>(value);
  }
  return ep;
}

std::string_view to_string(Resolvability status) noexcept {
  switch (status) {
    case Resolvability::Resolvable: return "resolvable";
    case Resolvability::Unresolvable: return "unresolvable";
    case Resolvability::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

ResolutionVerdict probe_resolvable(const DomainName& name, const ProbeOptions& options,
                                   std::uint16_t query_id) {
  ResolutionVerdict verdict{name, Resolvability::Indeterminate, std::nullopt, 0, 0};
  const auto query = dns::encode_query(name, dns::RecordType::A, query_id,
                                       {.recursion_desired = true, .edns_payload = dns::kEdnsPayload});
  UdpSocket socket(options.server);

  std::size_t budget = options.retries + 1;
  bool truncation_retry_used = false;
  while (verdict.attempts < budget) {
    ++verdict.attempts;
    socket.send(query);
    const auto deadline = std::chrono::steady_clock::now() + options.timeout;
    std::optional<dns::Message> reply;
    while (auto datagram = socket.receive(deadline)) {
      try {
        auto message = dns::decode(*datagram);
        if (answers_query(message, query_id, name)) {
          reply = std::move(message);
          break;
        }
      } catch (const dns::DecodeError&) {
        // Not ours or garbage; keep listening.
      }
    }
    if (!reply) continue;

    verdict.rcode = reply->header.rcode;
    verdict.answer_count = reply->answers.size();
    if (reply->header.tc) {
      if (truncation_retry_used) break;
      truncation_retry_used = true;
      ++budget;
      continue;
    }
    if (reply->header.rcode == static_cast<std::uint8_t>(dns::Rcode::NoError)) {
      verdict.status = Resolvability::Resolvable;
      return verdict;
    }
    if (reply->header.rcode == static_cast<std::uint8_t>(dns::Rcode::NxDomain)) {
      verdict.status = Resolvability::Unresolvable;
      return verdict;
    }
  }
  verdict.status = Resolvability::Indeterminate;
  return verdict;
}

std::vector<ResolutionVerdict> probe_all(std::span<const DomainName> names, const ProbeOptions& options) {
  std::vector<std::optional<ResolutionVerdict>> slots(names.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= names.size()) return;
      {
        std::lock_guard lock(error_mutex);
        if (first_error) return;
      }
      try {
        const auto id = static_cast<std::uint16_t>(derive_seed(options.seed, i));
        slots[i] = probe_resolvable(names[i], options, id);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.max_inflight, 1, std::max<std::size_t>(names.size(), 1));
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ResolutionVerdict> out;
  out.reserve(names.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace iotnames
