#include "mwem/net.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

namespace mwem {

namespace {

struct AddrInfo {
  std::string host;
  std::string port;
};

AddrInfo parse_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr.size()) {
    throw std::invalid_argument("address must be host:port, got '" + addr + "'");
  }
  return {addr.substr(0, colon), addr.substr(colon + 1)};
}

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

int tcp_listen(const std::string& addr) {
  const AddrInfo ai = parse_address(addr);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (getaddrinfo(ai.host.empty() ? nullptr : ai.host.c_str(),
                  ai.port.c_str(), &hints, &res) != 0 ||
      !res) {
    throw ProtocolError("cannot resolve listen address " + addr);
  }
  const int fd = socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    freeaddrinfo(res);
    throw ProtocolError("cannot create listen socket");
  }
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const bool ok = bind(fd, res->ai_addr, res->ai_addrlen) == 0 &&
                  listen(fd, 8) == 0;
  freeaddrinfo(res);
  if (!ok) {
    close(fd);
    throw ProtocolError("cannot bind/listen on " + addr);
  }
  return fd;
}

int tcp_dial(const std::string& addr, std::chrono::milliseconds timeout) {
  const AddrInfo ai = parse_address(addr);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(ai.host.c_str(), ai.port.c_str(), &hints, &res) == 0 &&
        res) {
      const int fd = socket(res->ai_family, res->ai_socktype, res->ai_protocol);
      if (fd >= 0) {
        if (connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
          freeaddrinfo(res);
          set_nodelay(fd);
          return fd;
        }
        close(fd);
      }
      freeaddrinfo(res);
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw ProtocolError("dial timeout connecting to " + addr);
    }
    usleep(100000);
  }
}

bool write_all(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::write(fd, data, len);
    if (n <= 0) return false;
    data += n;
    len -= std::size_t(n);
  }
  return true;
}

bool read_exact(int fd, std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::read(fd, data, len);
    if (n <= 0) return false;
    data += n;
    len -= std::size_t(n);
  }
  return true;
}

}  // namespace

TcpTransport::TcpTransport(int self, const std::string& listen_address,
                           const std::array<std::string, 3>& party_addresses,
                           bool expect_coordinator,
                           std::chrono::milliseconds dial_timeout)
    : Transport(self) {
  fds_.fill(-1);
  for (auto& mu : write_mu_) mu = std::make_unique<std::mutex>();

  int inbound = 0;
  if (self < kNumParties) {
    inbound = (kNumParties - 1 - self) + (expect_coordinator ? 1 : 0);
  }

  int listen_fd = -1;
  if (inbound > 0) {
    if (listen_address.empty()) {
      throw std::invalid_argument("party requires a listen address");
    }
    listen_fd = tcp_listen(listen_address);
  }

  try {
    // Dial every lower-id party; they are already listening or will be
    // shortly (dial retries until the deadline).
    for (int peer = 0; peer < (self < kNumParties ? self : kNumParties);
         peer++) {
      const int fd = tcp_dial(party_addresses[peer], dial_timeout);
      const std::uint8_t preamble = std::uint8_t(self);
      if (!write_all(fd, &preamble, 1)) {
        close(fd);
        throw ProtocolError("failed to identify to peer");
      }
      fds_[peer] = fd;
    }

    // Accept the higher-id parties (and the coordinator), identified by
    // their preamble byte. The whole mesh must come up before the dial
    // deadline or the run aborts.
    const auto deadline = std::chrono::steady_clock::now() + dial_timeout;
    for (int i = 0; i < inbound; i++) {
      pollfd pfd{listen_fd, POLLIN, 0};
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0 || poll(&pfd, 1, int(left.count())) <= 0) {
        throw ProtocolError("timed out waiting for peers to connect");
      }
      const int fd = accept(listen_fd, nullptr, nullptr);
      if (fd < 0) {
        throw ProtocolError("accept failed");
      }
      set_nodelay(fd);
      timeval preamble_timeout{5, 0};
      setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &preamble_timeout,
                 sizeof(preamble_timeout));
      std::uint8_t who = 0xff;
      if (!read_exact(fd, &who, 1) || who >= kMaxEndpoints ||
          int(who) <= self || fds_[who] != -1) {
        close(fd);
        throw ProtocolError("bad connection preamble");
      }
      timeval no_timeout{0, 0};
      setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &no_timeout, sizeof(no_timeout));
      fds_[who] = fd;
    }
  } catch (...) {
    if (listen_fd >= 0) close(listen_fd);
    for (int fd : fds_) {
      if (fd >= 0) close(fd);
    }
    throw;
  }
  if (listen_fd >= 0) close(listen_fd);

  for (int peer = 0; peer < kMaxEndpoints; peer++) {
    if (fds_[peer] >= 0) {
      readers_.emplace_back([this, peer] { reader_loop(peer, fds_[peer]); });
    }
  }
}

TcpTransport::~TcpTransport() {
  for (int fd : fds_) {
    if (fd >= 0) shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : readers_) t.join();
  for (int fd : fds_) {
    if (fd >= 0) close(fd);
  }
}

void TcpTransport::send(int peer, Frame f) {
  if (peer < 0 || peer >= kMaxEndpoints || fds_[peer] < 0) {
    throw std::invalid_argument("send to unconnected peer");
  }
  f.sender = std::uint8_t(self_);
  const auto bytes = encode_frame(f);
  std::lock_guard<std::mutex> lock(*write_mu_[peer]);
  if (!write_all(fds_[peer], bytes.data(), bytes.size())) {
    throw ProtocolError("peer connection lost during send");
  }
  count_send(f);
}

void TcpTransport::reader_loop(int peer, int fd) {
  std::vector<std::uint8_t> header(14);
  for (;;) {
    if (!read_exact(fd, header.data(), 14)) break;
    const std::uint32_t payload_bytes =
        (std::uint32_t(header[0]) << 24) | (std::uint32_t(header[1]) << 16) |
        (std::uint32_t(header[2]) << 8) | std::uint32_t(header[3]);
    std::vector<std::uint8_t> buf(14 + payload_bytes);
    std::memcpy(buf.data(), header.data(), 14);
    if (payload_bytes > 0 &&
        !read_exact(fd, buf.data() + 14, payload_bytes)) {
      break;
    }
    Frame frame;
    try {
      auto decoded = decode_frame(buf.data(), buf.size(), nullptr);
      if (!decoded) break;
      frame = std::move(*decoded);
    } catch (const std::exception&) {
      break;
    }
    queues_[peer].push(std::move(frame));
  }
  // A lost peer aborts the whole computation, not just one channel.
  fail_all();
}

void TcpTransport::fail_all() {
  for (auto& q : queues_) q.close();
}

}  // namespace mwem
